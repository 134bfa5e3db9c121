#include "frameq/quantizers.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "frameq/rng.hpp"

namespace frameq {

void QuantizerConfig::validate() const {
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::invalid_argument("QuantizerConfig: delta must lie in (0, 1]");
  if (!(C >= 1.0)) throw std::invalid_argument("QuantizerConfig: C >= 1");
  if (!(epsilon_target > 0.0))
    throw std::invalid_argument("QuantizerConfig: epsilon_target > 0");
}

std::vector<std::int64_t> round_coeffs(const Eigen::VectorXd& a, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("round_coeffs: delta > 0");
  std::vector<std::int64_t> k(static_cast<std::size_t>(a.size()));
  for (int i = 0; i < a.size(); ++i)
    k[static_cast<std::size_t>(i)] = std::llround(a[i] / delta);
  return k;
}

namespace {

// sorted table of all values sum_j d_j 2^{-j}, d in {0,+/-1}^m, with the
// digit combination encoded in base 3; among combinations hitting the same
// value only the canonical one (fewest nonzero digits) is kept
struct DigitTable {
  std::vector<std::pair<double, std::uint32_t>> entries;
};

const DigitTable& digit_table(int m) {
  static std::mutex mu;
  static std::unordered_map<int, DigitTable> cache;
  std::scoped_lock lock(mu);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;

  struct Entry {
    double value;
    int nonzeros;
    std::uint32_t code;
  };
  std::vector<Entry> all;
  const std::uint32_t total = static_cast<std::uint32_t>(std::pow(3.0, m));
  all.reserve(total);
  for (std::uint32_t code = 0; code < total; ++code) {
    std::uint32_t c = code;
    double v = 0.0;
    int nz = 0;
    for (int j = 1; j <= m; ++j) {
      const int d = static_cast<int>(c % 3) - 1;
      c /= 3;
      v += d * std::ldexp(1.0, -j);
      nz += d != 0;
    }
    all.push_back({v, nz, code});
  }
  std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.nonzeros != b.nonzeros) return a.nonzeros < b.nonzeros;
    return a.code < b.code;
  });
  DigitTable t;
  t.entries.reserve(all.size());
  for (const Entry& e : all)
    if (t.entries.empty() || t.entries.back().first != e.value)
      t.entries.emplace_back(e.value, e.code);
  return cache.emplace(m, std::move(t)).first->second;
}

std::vector<int> decode_digits(std::uint32_t code, int m) {
  std::vector<int> d(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    d[static_cast<std::size_t>(j)] = static_cast<int>(code % 3) - 1;
    code /= 3;
  }
  return d;
}

constexpr int kExhaustiveDigitLimit = 12;

}  // namespace

std::vector<int> dyadic_digits(double target, int m) {
  if (m < 1) throw std::invalid_argument("dyadic_digits: m >= 1");
  if (m <= kExhaustiveDigitLimit) {
    const auto& tab = digit_table(m).entries;
    auto it = std::lower_bound(
        tab.begin(), tab.end(), target,
        [](const auto& e, double t) { return e.first < t; });
    std::uint32_t best_code = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (auto cand : {it, it == tab.begin() ? it : std::prev(it)}) {
      if (cand == tab.end()) continue;
      const double d = std::abs(cand->first - target);
      if (d < best_dist) {
        best_dist = d;
        best_code = cand->second;
      }
    }
    return decode_digits(best_code, m);
  }
  // greedy, most significant bit first: keeps |remainder| <= 2^{-j};
  // exact halves round toward zero so exactly representable targets get
  // their plain signed-binary digits
  std::vector<int> d(static_cast<std::size_t>(m));
  double rem = target;
  for (int j = 1; j <= m; ++j) {
    const double v = std::ldexp(rem, j);
    std::int64_t r = std::llround(v);
    if (std::abs(v - std::trunc(v)) == 0.5) r = static_cast<std::int64_t>(v);
    const int dj = static_cast<int>(std::clamp<std::int64_t>(r, -1, 1));
    d[static_cast<std::size_t>(j - 1)] = dj;
    rem -= dj * std::ldexp(1.0, -j);
  }
  return d;
}

QuantizationResult dyadic_quantize(const DyadicFrame& dy,
                                   const Eigen::VectorXd& a,
                                   bool with_z_norm) {
  const int n = dy.n, m = dy.m;
  const int N = 2 * n * m;
  if (a.size() != N)
    throw std::invalid_argument("dyadic_quantize: expected " +
                                std::to_string(N) + " coefficients");
  if (a.cwiseAbs().maxCoeff() > 1.0 + 1e-12)
    throw std::invalid_argument(
        "dyadic_quantize: coefficients must lie in [-1, 1]");

  std::vector<std::int64_t> k(static_cast<std::size_t>(N), 0);

  // per row i: signed dyadic digits for the weighted s=1 sum
  for (int i = 1; i <= n; ++i) {
    double tau = 0.0;
    for (int j = 1; j <= m; ++j)
      tau += a[DyadicFrameIndex::flat(i, j, 1, m)] * std::ldexp(1.0, -j);
    const std::vector<int> digits = dyadic_digits(tau, m);
    for (int j = 1; j <= m; ++j)
      k[static_cast<std::size_t>(DyadicFrameIndex::flat(i, j, 1, m))] =
          digits[static_cast<std::size_t>(j - 1)];
  }

  // balance the e_1 mass: spend k_{(i,j,0)} in {-3..3} until the scalar
  // remainder is at most 1/2
  double rem = 0.0;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= m; ++j) {
      rem += a[DyadicFrameIndex::flat(i, j, 1, m)] +
             a[DyadicFrameIndex::flat(i, j, 0, m)] -
             static_cast<double>(
                 k[static_cast<std::size_t>(DyadicFrameIndex::flat(i, j, 1, m))]);
    }
  for (int i = 1; i <= n && rem != 0.0; ++i)
    for (int j = 1; j <= m; ++j) {
      const auto slot =
          static_cast<std::size_t>(DyadicFrameIndex::flat(i, j, 0, m));
      const std::int64_t spend =
          std::clamp<std::int64_t>(std::llround(rem), -3, 3);
      if (spend == 0) break;
      k[slot] = spend;
      rem -= static_cast<double>(spend);
    }

  QuantizationResult res;
  res.k = std::move(k);
  res.delta = 1.0;
  res.algorithm = "dyadic";
  res.params = {{"n", static_cast<double>(n)}, {"m", static_cast<double>(m)}};
  res.input = synthesis(dy.frame, a);
  const Eigen::VectorXd xq = synthesis_scaled(dy.frame, res.k, 1.0);
  res.error = dy.frame.ambient(res.input - xq);
  res.coeff_bound = 0.0;
  for (auto v : res.k)
    res.coeff_bound = std::max(res.coeff_bound, std::abs(static_cast<double>(v)));

  double base_norm = 0.0;
  for (int i = 0; i < dy.base.length(); ++i)
    base_norm = std::max(base_norm, dy.base.ambient(dy.base.synthesis.col(i)));
  if (res.error >
      (1.0 + n * dy.tail_weight()) * std::max(1.0, base_norm) + 1e-9)
    throw std::logic_error("dyadic_quantize: error bound violated");

  if (with_z_norm) {
    Eigen::VectorXd dk(N);
    for (int i = 0; i < N; ++i)
      dk[i] = static_cast<double>(res.k[static_cast<std::size_t>(i)]);
    res.z_norm_value =
        z_norm(dy.frame, dk, ZNormVariant::interval_max).value;
  }
  return res;
}

namespace {

struct KashinAttempt {
  Eigen::VectorXd a;
  int iterations = 0;
  double residual = 0.0;
  bool ok = false;
};

constexpr double kResidualTol = 1e-10;
constexpr double kClipSlack = 1e-9;

// one exact least-squares correction on the unclipped coordinates; returns
// true if it zeroed the residual without breaking the l-inf cap
bool try_slack_correction(const Eigen::MatrixXd& U, const Eigen::VectorXd& x,
                          double scale, Eigen::VectorXd& a,
                          Eigen::VectorXd& r) {
  std::vector<int> free;
  for (int i = 0; i < a.size(); ++i)
    if (std::abs(a[i]) < 1.0 - 1e-9) free.push_back(i);
  if (static_cast<int>(free.size()) < U.rows()) return false;
  Eigen::MatrixXd Uf(U.rows(), static_cast<Eigen::Index>(free.size()));
  for (std::size_t c = 0; c < free.size(); ++c)
    Uf.col(static_cast<Eigen::Index>(c)) = U.col(free[c]);
  const Eigen::MatrixXd W = Uf * Uf.transpose();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(W);
  if (ldlt.info() != Eigen::Success) return false;
  const Eigen::VectorXd d = Uf.transpose() * ldlt.solve(r) / scale;
  Eigen::VectorXd a_new = a;
  for (std::size_t c = 0; c < free.size(); ++c)
    a_new[free[c]] += d[static_cast<Eigen::Index>(c)];
  if (a_new.lpNorm<Eigen::Infinity>() > 1.0 + kClipSlack) return false;
  const Eigen::VectorXd r_new = x - scale * (U * a_new);
  if (r_new.norm() > kResidualTol) return false;
  a = std::move(a_new);
  r = r_new;
  return true;
}

KashinAttempt kashin_attempt(const Eigen::MatrixXd& U, const Eigen::VectorXd& x,
                             double level, int max_iter) {
  const auto N = U.cols();
  const double scale = level / std::sqrt(static_cast<double>(N));
  KashinAttempt out;
  out.a = Eigen::VectorXd::Zero(N);
  Eigen::VectorXd r = x;
  for (int it = 1; it <= max_iter; ++it) {
    out.iterations = it;
    out.a = (out.a + (U.transpose() * r) / scale)
                .cwiseMax(-1.0)
                .cwiseMin(1.0);
    r = x - scale * (U * out.a);
    if (r.norm() <= kResidualTol) break;
    if (it % 32 == 0 && try_slack_correction(U, x, scale, out.a, r)) break;
  }
  if (r.norm() > kResidualTol) try_slack_correction(U, x, scale, out.a, r);
  out.residual = r.norm();
  out.ok = out.residual <= kResidualTol &&
           out.a.lpNorm<Eigen::Infinity>() <= 1.0 + kClipSlack;
  return out;
}

}  // namespace

KashinRepresentation kashin_represent(const KashinFrame& kf,
                                      const Eigen::VectorXd& x, int max_iter,
                                      double level) {
  if (x.size() != kf.dim())
    throw std::invalid_argument("kashin_represent: dimension mismatch");
  if (x.norm() > 1.0 + 1e-9)
    throw std::invalid_argument("kashin_represent: ||x|| must be <= 1");
  double lv = level > 0.0 ? level : kf.K_hat;
  double best_residual = std::numeric_limits<double>::infinity();
  constexpr int kMaxEscalations = 30;
  for (int esc = 0; esc <= kMaxEscalations; ++esc, lv *= 1.5) {
    const KashinAttempt att = kashin_attempt(kf.U, x, lv, max_iter);
    best_residual = std::min(best_residual, att.residual);
    if (att.ok) {
      KashinRepresentation rep;
      rep.a = att.a;
      rep.level = lv;
      rep.escalations = esc;
      rep.iterations = att.iterations;
      rep.residual = att.residual;
      return rep;
    }
  }
  throw std::runtime_error(
      "kashin_represent: no convergence after level escalations "
      "(best residual " +
      std::to_string(best_residual) + ")");
}

double kashin_min_level(const Eigen::MatrixXd& U, const Eigen::VectorXd& x,
                        int max_iter) {
  const double sqrtN = std::sqrt(static_cast<double>(U.cols()));
  if (x.norm() <= 1e-15) return 0.0;
  // any level below ||x|| is infeasible; at ||sqrt(N) U^T x||_inf the first
  // iteration returns the least-squares coefficients unclipped
  double lo = x.norm();
  double hi = std::max((sqrtN * (U.transpose() * x)).lpNorm<Eigen::Infinity>(),
                       lo * (1.0 + 1e-9));
  if (!kashin_attempt(U, x, hi, max_iter).ok)
    throw std::runtime_error("kashin_min_level: least-squares level failed");
  for (int it = 0; it < 30; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (kashin_attempt(U, x, mid, max_iter).ok)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

QuantizationResult kashin_quantize(const KashinFrame& kf,
                                   const Eigen::VectorXd& x, double delta,
                                   int max_iter) {
  if (!(delta > 0.0)) throw std::invalid_argument("kashin_quantize: delta > 0");
  const KashinRepresentation rep = kashin_represent(kf, x, max_iter);
  const Eigen::VectorXd b = rep.level * rep.a;  // x = (1/sqrt(N)) U b

  QuantizationResult res;
  res.k = round_coeffs(b, delta);
  res.delta = delta;
  res.algorithm = "kashin";
  res.params = {{"level", rep.level},
                {"escalations", static_cast<double>(rep.escalations)},
                {"iterations", static_cast<double>(rep.iterations)},
                {"K_hat", kf.K_hat}};
  res.input = x;
  const Frame qf = kf.quantization_frame();
  res.error = qf.ambient(x - synthesis_scaled(qf, res.k, delta));
  res.coeff_bound = 0.0;
  for (auto v : res.k)
    res.coeff_bound =
        std::max(res.coeff_bound, delta * std::abs(static_cast<double>(v)));

  if (res.error > delta / 2.0 + 1e-9)
    throw std::logic_error("kashin_quantize: rounding error bound violated");
  if (res.coeff_bound > rep.level + delta / 2.0 + 1e-9)
    throw std::logic_error("kashin_quantize: coefficient bound violated");
  return res;
}

IterativeQuantizerConfig IterativeQuantizerConfig::from_base(double delta0,
                                                             double C0,
                                                             double q0) {
  if (!(delta0 > 0.0) || !(C0 >= 0.0) || !(q0 > 0.0 && q0 < 1.0))
    throw std::invalid_argument(
        "IterativeQuantizerConfig: need delta0 > 0, C0 >= 0, q0 in (0,1)");
  IterativeQuantizerConfig cfg;
  cfg.delta0 = delta0;
  cfg.C0 = C0;
  cfg.q0 = q0;
  cfg.n1 = static_cast<int>(std::floor(q0 / (1.0 - q0))) + 1;
  while ((cfg.n1 + 1.0) / cfg.n1 * q0 >= 1.0) ++cfg.n1;
  cfg.q1 = (cfg.n1 + 1.0) / cfg.n1 * q0;
  cfg.delta1 = delta0 / cfg.n1;
  cfg.C1 = 2.0 * C0 / (1.0 - cfg.q1);
  return cfg;
}

IterativeQuantizer::IterativeQuantizer(BaseQuantizer base,
                                       std::shared_ptr<const Frame> frame,
                                       NormSpec z,
                                       std::uint64_t validation_seed)
    : base_(std::move(base)), frame_(std::move(frame)), z_(std::move(z)) {
  if (!frame_) throw std::invalid_argument("IterativeQuantizer: null frame");
  frame_->validate();
  cfg_ = IterativeQuantizerConfig::from_base(base_.delta0, base_.C0, base_.q0);

  // the hypothesis is an assumption we can only check empirically
  Rng rng(validation_seed);
  for (int s = 0; s < 100; ++s) {
    const Eigen::VectorXd x =
        sample_ball(frame_->ambient, frame_->dim(), rng);
    const std::vector<std::int64_t> k = base_.quantize(x);
    Eigen::VectorXd dk(frame_->length());
    for (int i = 0; i < frame_->length(); ++i)
      dk[i] = base_.delta0 * static_cast<double>(k[static_cast<std::size_t>(i)]);
    const double zn = z_(dk);
    const double err =
        frame_->ambient(x - synthesis_scaled(*frame_, k, base_.delta0));
    if (zn > base_.C0 + 1e-9 || err > base_.q0 + 1e-9)
      throw std::runtime_error(
          "IterativeQuantizer: base quantizer violates its contract on "
          "sample " +
          std::to_string(s) + " (z = " + std::to_string(zn) +
          ", err = " + std::to_string(err) + ")");
  }
}

// step-rescaling claim: for ||x|| <= 1 and delta <= delta1 the base quantizer
// at delta0 yields coefficients at step delta with z-bound 2 C0 and error q1
std::vector<std::int64_t> IterativeQuantizer::rescaled_base(
    const Eigen::VectorXd& x, double delta) const {
  std::int64_t nn =
      static_cast<std::int64_t>(std::floor(base_.delta0 / delta + 1e-9));
  while (delta > base_.delta0 / static_cast<double>(nn)) --nn;
  while (delta <= base_.delta0 / static_cast<double>(nn + 1)) ++nn;
  const double shrink = base_.delta0 / (delta * static_cast<double>(nn + 1));
  std::vector<std::int64_t> k = base_.quantize(shrink * x);
  for (auto& v : k) v *= (nn + 1);
  return k;
}

QuantizationResult IterativeQuantizer::quantize(
    const Eigen::VectorXd& x) const {
  if (x.size() != frame_->dim())
    throw std::invalid_argument("IterativeQuantizer: dimension mismatch");
  const double norm_x = frame_->ambient(x);
  const int N = frame_->length();

  std::vector<std::int64_t> k(static_cast<std::size_t>(N), 0);
  int steps = 0;
  if (norm_x > 0.0 && norm_x <= 1.0) {
    k = rescaled_base(x, cfg_.delta1);
    steps = 1;
  } else if (norm_x > 1.0) {
    steps = 1;
    double p = cfg_.q1;
    while (p >= 1.0 / norm_x) {
      p *= cfg_.q1;
      ++steps;
    }
    const Eigen::VectorXd xhat = x / norm_x;
    const double delta = cfg_.delta1 / norm_x;
    Eigen::VectorXd r = xhat;
    double scale = 1.0;  // q1^{-t}, capped so delta * scale never leaves
                         // the claim's range (0, delta1]
    for (int t = 0; t < steps; ++t) {
      const double s = std::min(scale, norm_x);
      const std::vector<std::int64_t> kt = rescaled_base(s * r, delta * s);
      for (int i = 0; i < N; ++i)
        k[static_cast<std::size_t>(i)] += kt[static_cast<std::size_t>(i)];
      r = xhat - synthesis_scaled(*frame_, k, delta);
      scale /= cfg_.q1;
    }
  }

  QuantizationResult res;
  res.k = std::move(k);
  res.delta = cfg_.delta1;
  res.algorithm = "iterative";
  res.params = {{"delta0", cfg_.delta0}, {"C0", cfg_.C0},
                {"q0", cfg_.q0},         {"n1", static_cast<double>(cfg_.n1)},
                {"q1", cfg_.q1},         {"delta1", cfg_.delta1},
                {"C1", cfg_.C1},         {"steps", static_cast<double>(steps)}};
  res.input = x;
  res.error = frame_->ambient(x - synthesis_scaled(*frame_, res.k, cfg_.delta1));
  Eigen::VectorXd dk(N);
  for (int i = 0; i < N; ++i)
    dk[i] = cfg_.delta1 * static_cast<double>(res.k[static_cast<std::size_t>(i)]);
  res.z_norm_value = z_(dk);
  res.coeff_bound = dk.cwiseAbs().maxCoeff();
  return res;
}

int SigmaDeltaModulator::step(double y) {
  if (std::abs(y) > 1.0)
    throw std::invalid_argument("sigma_delta: inputs must lie in [-1, 1]");
  const double v = u_ + y;
  const int q = v >= 0.0 ? 1 : -1;  // sign(0) = +1
  u_ = v - q;
  ++index_;
  return q;
}

SigmaDeltaResult sigma_delta(std::span<const double> y) {
  SigmaDeltaResult out;
  out.bits.reserve(y.size());
  out.state.reserve(y.size());
  SigmaDeltaModulator mod;
  for (double v : y) {
    out.bits.push_back(mod.step(v));
    out.state.push_back(mod.state());
  }
  return out;
}

}  // namespace frameq
