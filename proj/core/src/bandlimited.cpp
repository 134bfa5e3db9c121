#include "frameq/bandlimited.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "frameq/quantizers.hpp"

namespace frameq {

namespace {

template <typename S>
S sinc_t(S t) {
  const S pt = M_PI * t;
  if (std::abs(pt) < 1e-7) return S(1) - pt * pt / S(6);
  return std::sin(pt) / pt;
}

// cos(pi u/2) / (1 - u^2), even, with removable singularities at u = +/-1:
// rewritten through sin(pi t/2)/(t (2+t)) with t = |u|-side shift, stable
// everywhere.
template <typename S>
S cos_factor(S u) {
  if (std::real(std::complex<double>(u)) < 0.0) u = -u;
  const S t = u - S(1);
  return (M_PI / 2.0) * sinc_t(t / S(2)) / (u + S(1));
}

template <typename S>
S raised_cosine_rho(double lambda, S x) {
  const double A = (lambda + 1.0) / 2.0;
  const double gamma = lambda - 1.0;
  return A * sinc_t(S(A) * x) * cos_factor(S(gamma) * x);
}

double rc_rho(double lambda, double x) {
  return raised_cosine_rho<double>(lambda, x);
}

// complex-step derivative: machine precision, no cancellation
double rc_rho_prime(double lambda, double x) {
  constexpr double h = 1e-20;
  const std::complex<double> v =
      raised_cosine_rho<std::complex<double>>(lambda, {x, h});
  return v.imag() / h;
}

// C-infinity transition 1 -> 0 on [0,1]
double smooth_step(double t) {
  auto sigma = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
  const double a = sigma(t), b = sigma(1.0 - t);
  return a / (a + b);
}

// spectral profile G = sqrt(2pi) rho_hat in [0,1]: flat 1 on [0,pi],
// transition to 0 at lambda*pi
double bump_profile(double lambda, double xi) {
  const double edge = lambda * M_PI;
  if (xi <= M_PI) return 1.0;
  if (xi >= edge) return 0.0;
  return smooth_step((edge - xi) / (edge - M_PI));
}

// || rho' ||_L1 as the total variation of rho on [0, x_max], doubled:
// between consecutive extrema rho is monotone, so each increment |d rho| is
// exact; extrema are bisected from sign changes of rho'.
double total_variation_l1(const std::function<double(double)>& rho,
                          const std::function<double(double)>& rho_prime,
                          double scan_step, double x_max) {
  double tv = 0.0;
  double prev_val = rho(0.0);
  double x0 = 0.0, d0 = rho_prime(0.0);
  int quiet = 0;
  for (double x = scan_step; x <= x_max; x += scan_step) {
    const double d1 = rho_prime(x);
    if ((d0 < 0.0 && d1 >= 0.0) || (d0 > 0.0 && d1 <= 0.0)) {
      double lo = x0, hi = x;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double dm = rho_prime(mid);
        if ((d0 < 0.0) == (dm < 0.0))
          lo = mid;
        else
          hi = mid;
      }
      const double ex = 0.5 * (lo + hi);
      const double ev = rho(ex);
      const double inc = std::abs(ev - prev_val);
      tv += inc;
      prev_val = ev;
      quiet = inc < 1e-11 ? quiet + 1 : 0;
      if (quiet > 16) break;
    }
    x0 = x;
    d0 = d1;
  }
  tv += std::abs(prev_val);  // tail off to zero
  return 2.0 * tv;
}

std::vector<double> build_envelope(const std::function<double(double)>& rho,
                                   double step, double x_max) {
  const int count = static_cast<int>(x_max / step) + 2;
  std::vector<double> env(static_cast<std::size_t>(count), 0.0);
  const int sub = 8;
  for (int k = 0; k < count; ++k) {
    double m = 0.0;
    for (int s = 0; s <= sub; ++s)
      m = std::max(m, std::abs(rho(k * step + s * step / sub)));
    env[static_cast<std::size_t>(k)] = m;
  }
  for (int k = count - 2; k >= 0; --k)
    env[static_cast<std::size_t>(k)] = std::max(
        env[static_cast<std::size_t>(k)], env[static_cast<std::size_t>(k + 1)]);
  return env;
}

}  // namespace

double sinc(double x) { return sinc_t<double>(x); }

double BandlimitedSignal::operator()(double x) const {
  double v = 0.0;
  for (const auto& [a, s] : components) v += a * sinc(x - s);
  return v;
}

BandlimitedSignal BandlimitedSignal::from_components(
    std::vector<std::pair<double, double>> comps) {
  BandlimitedSignal f;
  f.components = std::move(comps);
  if (!f.components.empty()) {
    double lo = 0.0, hi = 0.0;
    for (const auto& [a, s] : f.components) {
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    double m = 0.0;
    for (double x = lo - 30.0; x <= hi + 30.0; x += 0.01)
      m = std::max(m, std::abs(f(x)));
    f.sup_norm_estimate = m;
  }
  return f;
}

SpectralWindow window_rho(double lambda, WindowFamily family) {
  if (!(lambda > 1.0))
    throw std::invalid_argument("window_rho: lambda must exceed 1");
  SpectralWindow w;
  w.lambda_ = lambda;
  w.family_ = family;

  if (family == WindowFamily::raised_cosine) {
    auto rho = [lambda](double x) { return rc_rho(lambda, x); };
    auto rhop = [lambda](double x) { return rc_rho_prime(lambda, x); };
    const double scan = 1.0 / (16.0 * lambda);
    w.rho_prime_l1_ = total_variation_l1(rho, rhop, scan, 4000.0);
    w.env_step_ = 1.0 / 16.0;
    w.env_ = std::make_shared<const std::vector<double>>(
        build_envelope(rho, w.env_step_, 3000.0));
    return w;
  }

  // mollified bump: tabulate rho and rho' from the spectral profile once,
  // by trapezoid over a fine xi grid (the integrand is C-infinity and
  // vanishes with all derivatives at the edge, so trapezoid converges
  // superalgebraically)
  const double edge = lambda * M_PI;
  const int M = 8192;
  const double dxi = edge / M;
  std::vector<double> g(static_cast<std::size_t>(M + 1));
  for (int k = 0; k <= M; ++k)
    g[static_cast<std::size_t>(k)] = bump_profile(lambda, k * dxi);

  const double x_tab = 160.0;
  const double step = 1.0 / 256.0;
  const int count = static_cast<int>(x_tab / step) + 1;
  auto tab_rho = std::make_shared<std::vector<double>>(
      static_cast<std::size_t>(count));
  auto tab_rhop = std::make_shared<std::vector<double>>(
      static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double x = i * step;
    double s = 0.0, sp = 0.0;
    for (int k = 0; k <= M; ++k) {
      const double xi = k * dxi;
      const double wgt = (k == 0 || k == M) ? 0.5 : 1.0;
      const double gv = g[static_cast<std::size_t>(k)];
      s += wgt * gv * std::cos(x * xi);
      sp -= wgt * gv * xi * std::sin(x * xi);
    }
    (*tab_rho)[static_cast<std::size_t>(i)] = s * dxi / M_PI;
    (*tab_rhop)[static_cast<std::size_t>(i)] = sp * dxi / M_PI;
  }
  w.table_rho_ = tab_rho;
  w.table_rho_prime_ = tab_rhop;
  w.table_step_ = step;

  auto rho = [&w](double x) { return w.rho(x); };
  auto rhop = [&w](double x) { return w.rho_prime(x); };
  w.rho_prime_l1_ = total_variation_l1(rho, rhop, 1.0 / (16.0 * lambda),
                                       x_tab - 1.0);
  w.env_step_ = 1.0 / 16.0;
  w.env_ = std::make_shared<const std::vector<double>>(
      build_envelope(rho, w.env_step_, x_tab - 1.0));
  return w;
}

namespace {

double table_lookup(const std::vector<double>& tab, double step, double x) {
  x = std::abs(x);
  const double pos = x / step;
  const auto i = static_cast<std::size_t>(pos);
  if (i + 2 >= tab.size()) return 0.0;
  // Catmull-Rom through the four surrounding samples
  const double t = pos - static_cast<double>(i);
  const double p0 = i == 0 ? tab[1] : tab[i - 1];  // even extension at 0
  const double p1 = tab[i], p2 = tab[i + 1], p3 = tab[i + 2];
  return p1 + 0.5 * t *
                  (p2 - p0 +
                   t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                        t * (3.0 * (p1 - p2) + p3 - p0)));
}

}  // namespace

double SpectralWindow::rho(double x) const {
  if (family_ == WindowFamily::raised_cosine) return rc_rho(lambda_, x);
  return table_lookup(*table_rho_, table_step_, x);
}

double SpectralWindow::rho_prime(double x) const {
  if (family_ == WindowFamily::raised_cosine) return rc_rho_prime(lambda_, x);
  const double mag = table_lookup(*table_rho_prime_, table_step_, x);
  return x < 0.0 ? -mag : mag;  // rho even, rho' odd
}

std::string SpectralWindow::family_name() const {
  return family_ == WindowFamily::raised_cosine ? "raised_cosine"
                                                : "mollified_bump";
}

double SpectralWindow::flatness_deviation(int n_freqs) const {
  // sqrt(2pi) rho_hat(xi) = 2 int_0^inf rho(x) cos(xi x) dx should be 1
  const double x_max = family_ == WindowFamily::raised_cosine ? 1500.0 : 158.0;
  const double h = family_ == WindowFamily::raised_cosine ? 0.005 : table_step_;
  int count = static_cast<int>(x_max / h);
  if (count % 2 == 1) ++count;  // composite Simpson needs an even panel count
  std::vector<double> vals(static_cast<std::size_t>(count + 1));
  for (int i = 0; i <= count; ++i)
    vals[static_cast<std::size_t>(i)] = rho(i * h);
  double worst = 0.0;
  for (int t = 0; t < n_freqs; ++t) {
    const double xi = -M_PI + 2.0 * M_PI * t / (n_freqs - 1);
    // composite Simpson
    double s = vals[0];
    for (int i = 1; i < count; ++i)
      s += vals[static_cast<std::size_t>(i)] * std::cos(xi * i * h) *
           (i % 2 == 1 ? 4.0 : 2.0);
    s += vals[static_cast<std::size_t>(count)] * std::cos(xi * count * h);
    const double integral = 2.0 * s * h / 3.0;
    worst = std::max(worst, std::abs(integral - 1.0) / std::sqrt(2.0 * M_PI));
  }
  return worst;
}

double SpectralWindow::envelope(double t) const {
  t = std::abs(t);
  const auto& env = *env_;
  const double pos = t / env_step_;
  if (pos < static_cast<double>(env.size() - 1))
    return env[static_cast<std::size_t>(pos)];
  if (family_ == WindowFamily::raised_cosine) {
    const double gamma = lambda_ - 1.0;
    return 1.0 / (M_PI * gamma * gamma * t * t * t);
  }
  return 0.0;
}

double SpectralWindow::tail_mass(double gap, double lambda_step) const {
  if (gap < 0.0) gap = 0.0;
  const auto& env = *env_;
  const double x_end = env_step_ * static_cast<double>(env.size() - 2);
  double sum = 0.0;
  for (double t = gap; t <= x_end; t += lambda_step)
    sum += env[static_cast<std::size_t>(t / env_step_)];
  double out = sum * lambda_step;
  if (family_ == WindowFamily::raised_cosine) {
    // integrable 1/x^3 envelope beyond the table
    const double gamma = lambda_ - 1.0;
    const double m3 = 1.0 / (M_PI * gamma * gamma);
    out += m3 / (2.0 * std::max(x_end, 1.0) * std::max(x_end, 1.0));
  }
  return out;
}

std::vector<double> sample(const BandlimitedSignal& f, double lambda,
                           double T) {
  if (!(lambda > 1.0)) throw std::invalid_argument("sample: lambda > 1");
  if (!(T > 0.0)) throw std::invalid_argument("sample: T > 0");
  const auto n_max = static_cast<std::int64_t>(std::floor(T * lambda));
  std::vector<double> y;
  y.reserve(static_cast<std::size_t>(2 * n_max + 1));
  for (std::int64_t t = -n_max; t <= n_max; ++t)
    y.push_back(f(static_cast<double>(t) / lambda));
  return y;
}

std::vector<double> reconstruct_expansion(std::span<const double> samples,
                                          const SpectralWindow& window,
                                          double lambda,
                                          std::span<const double> grid,
                                          double max_abs_sample,
                                          double interior_radius,
                                          double* tail_estimate) {
  if (samples.size() % 2 == 0)
    throw std::invalid_argument(
        "reconstruct_expansion: samples must cover -n_max..n_max");
  if (lambda + 1e-12 < window.lambda())
    throw std::invalid_argument(
        "reconstruct_expansion: sampling rate below the window parameter");
  const auto n_max = static_cast<std::int64_t>(samples.size() / 2);
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const double x = grid[gi];
    double s = 0.0;
    for (std::int64_t t = -n_max; t <= n_max; ++t)
      s += samples[static_cast<std::size_t>(t + n_max)] *
           window.rho(x - static_cast<double>(t) / lambda);
    out[gi] = s / lambda;
  }
  if (tail_estimate) {
    const double edge = static_cast<double>(n_max) / lambda;
    const double gap = std::max(edge - interior_radius, 0.0);
    *tail_estimate =
        max_abs_sample * 2.0 * window.tail_mass(gap, 1.0 / lambda);
  }
  return out;
}

std::vector<double> make_grid(double a, double b, double step) {
  std::vector<double> g;
  for (double x = a; x <= b + 1e-12; x += step) g.push_back(x);
  return g;
}

SdReport sd_pipeline(const BandlimitedSignal& f, const SpectralWindow& window,
                     double lambda, double T, std::span<const double> grid) {
  if (f.sup_norm_estimate > 1.0 + 1e-12)
    throw std::invalid_argument(
        "sd_pipeline: ||f||_inf must be <= 1 for one-bit quantization");
  if (lambda + 1e-12 < window.lambda())
    throw std::invalid_argument(
        "sd_pipeline: sampling rate below the window parameter");
  const std::vector<double> y = sample(f, lambda, T);
  const SigmaDeltaResult sd = sigma_delta(y);
  std::vector<double> bits(sd.bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i)
    bits[i] = static_cast<double>(sd.bits[i]);

  SdReport rep;
  rep.lambda = lambda;
  rep.T = T;
  rep.rho_prime_L1 = window.rho_prime_l1();
  rep.bound = rep.rho_prime_L1 / lambda;
  rep.grid.assign(grid.begin(), grid.end());

  const double interior = T / 2.0;
  double series_tail = 0.0;
  rep.f_reconstructed = reconstruct_expansion(bits, window, lambda, grid, 1.0,
                                              interior, &series_tail);
  // Abel-summation boundary term of the sigma-delta error estimate
  const double edge = std::floor(T * lambda) / lambda;
  const double gap = std::max(edge - interior, 0.0);
  rep.tail = series_tail + 2.0 * window.envelope(gap);

  rep.f_exact.resize(grid.size());
  rep.max_error = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    rep.f_exact[i] = f(grid[i]);
    if (std::abs(grid[i]) <= interior)
      rep.max_error = std::max(
          rep.max_error, std::abs(rep.f_exact[i] - rep.f_reconstructed[i]));
  }
  rep.pass = rep.max_error <= rep.bound + rep.tail;
  return rep;
}

}  // namespace frameq
