#include "frameq/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "frameq/quantizers.hpp"
#include "frameq/rng.hpp"

namespace frameq {

namespace {

Frame with_canonical_dual(Eigen::MatrixXd synthesis, NormSpec ambient) {
  Frame f;
  f.synthesis = std::move(synthesis);
  f.analysis = f.synthesis;  // placeholder, replaced below
  f.ambient = std::move(ambient);
  return canonical_dual(f);
}

}  // namespace

TwoOnbUnion two_onb_union(int n, std::span<const double> eps) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("two_onb_union: n must be even and >= 2");
  if (static_cast<int>(eps.size()) != n / 2)
    throw std::invalid_argument("two_onb_union: need n/2 epsilon values");
  for (double e : eps)
    if (!(e > 0.0 && e < 0.5))
      throw std::invalid_argument("two_onb_union: eps must lie in (0, 1/2)");

  Eigen::MatrixXd synth = Eigen::MatrixXd::Zero(n, 2 * n);
  synth.leftCols(n) = Eigen::MatrixXd::Identity(n, n);
  for (int p = 0; p < n / 2; ++p) {
    const double e = eps[static_cast<std::size_t>(p)];
    const double c = std::sqrt(1.0 - e * e);
    const int r = 2 * p;
    synth(r, n + r) = c;
    synth(r + 1, n + r) = e;
    synth(r, n + r + 1) = -e;
    synth(r + 1, n + r + 1) = c;
  }

  TwoOnbUnion out;
  out.frame.synthesis = synth;
  out.frame.analysis = synth / 2.0;  // tight with bound 2
  out.frame.ambient = NormSpec::l2();
  out.difference = Eigen::MatrixXd::Identity(n, n) - synth.rightCols(n);
  return out;
}

Frame dense_pm1_frame(int n, int levels) {
  if (n < 1 || levels < 1)
    throw std::invalid_argument("dense_pm1_frame: n, L >= 1");
  const int dim = n + n * levels;
  const int N = 2 * n * levels + n;
  Eigen::MatrixXd synth = Eigen::MatrixXd::Zero(dim, N);

  auto aux = [&](int i, int j) { return n + (i - 1) * n + (j - 1); };

  int col = 0;
  // diagonal listing of the (level, coordinate) grid, pairs first
  for (int d = 2; d <= levels + n; ++d) {
    for (int i = std::max(1, d - n); i <= std::min(levels, d - 1); ++i) {
      const int j = d - i;
      const double ci = std::ldexp(1.0, -i);  // 2^{-i}
      synth(j - 1, col) = ci;
      synth(aux(i, j), col) = 1.0;
      ++col;
      synth(aux(i, j), col) = 1.0;
      ++col;
    }
  }
  // base coordinate vectors (the partition members used as base coordinates)
  for (int j = 0; j < n; ++j) {
    synth(j, col) = 1.0;
    ++col;
  }

  return with_canonical_dual(std::move(synth), NormSpec::l2());
}

DenseSchauderFrame dense_schauder_frame(int n, double grid_step) {
  if (n < 1) throw std::invalid_argument("dense_schauder_frame: n >= 1");
  if (!(grid_step > 0.0 && grid_step <= 1.0))
    throw std::invalid_argument("dense_schauder_frame: grid_step in (0, 1]");

  // spacing s = grid_step/sqrt(n): interior covering s*sqrt(n)/2, plus up to
  // the same again for boundary points projected back into the ball
  const double s = grid_step / std::sqrt(static_cast<double>(n));
  const int K = static_cast<int>(std::floor(1.0 / s)) + 1;

  std::vector<Eigen::VectorXd> pts;
  Eigen::VectorXd g(n);
  std::vector<int> idx(static_cast<std::size_t>(n), -K);
  while (true) {
    for (int d = 0; d < n; ++d) g[d] = s * idx[static_cast<std::size_t>(d)];
    const double r = g.norm();
    if (r <= 1.0 + s * std::sqrt(static_cast<double>(n))) {
      Eigen::VectorXd p = r > 1.0 ? Eigen::VectorXd(g / r) : g;
      bool dup = false;
      for (const auto& q : pts)
        if ((q - p).norm() <= 1e-12) {
          dup = true;
          break;
        }
      if (!dup) pts.push_back(std::move(p));
    }
    int d = 0;
    while (d < n && ++idx[static_cast<std::size_t>(d)] > K) {
      idx[static_cast<std::size_t>(d)] = -K;
      ++d;
    }
    if (d == n) break;
  }

  const int count = static_cast<int>(pts.size());
  DenseSchauderFrame out;
  out.net.resize(n, count);
  for (int k = 0; k < count; ++k)
    out.net.col(k) = pts[static_cast<std::size_t>(k)];

  std::vector<int> mult(static_cast<std::size_t>(n), 0);
  for (int k = 0; k < count; ++k) ++mult[static_cast<std::size_t>(k % n)];

  Eigen::MatrixXd synth = Eigen::MatrixXd::Zero(n, 2 * count);
  Eigen::MatrixXd ana = Eigen::MatrixXd::Zero(n, 2 * count);
  for (int k = 0; k < count; ++k) {
    const int coord = k % n;
    const double w = 1.0 / mult[static_cast<std::size_t>(coord)];
    synth.col(2 * k) = out.net.col(k);
    synth(coord, 2 * k) += 1.0;  // z_k + e_coord
    synth.col(2 * k + 1) = out.net.col(k);
    ana(coord, 2 * k) = w;
    ana(coord, 2 * k + 1) = -w;
  }
  out.frame.synthesis = std::move(synth);
  out.frame.analysis = std::move(ana);
  out.frame.ambient = NormSpec::l2();

  // sampled covering check; a failing (or trivial) grid is flagged, not fatal
  Rng rng(0x6e65740f00dULL);
  double worst = 0.0;
  for (int t = 0; t < 256; ++t) {
    const Eigen::VectorXd x = t % 2 == 0
                                  ? sample_ball(NormSpec::l2(), n, rng)
                                  : sample_sphere(NormSpec::l2(), n, rng);
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < count; ++k)
      best = std::min(best, (x - out.net.col(k)).norm());
    worst = std::max(worst, best);
  }
  out.coarse_warning = worst > grid_step || grid_step >= 1.0;
  return out;
}

double DyadicFrame::weight(int j) const {
  return std::ldexp(1.0, -j) / (1.0 - std::ldexp(1.0, -m));
}

double DyadicFrame::tail_weight() const {
  return std::ldexp(1.0, -m) / (1.0 - std::ldexp(1.0, -m));
}

DyadicFrame dyadic_frame(const Frame& base, int m) {
  base.validate();
  if (m < 1) throw std::invalid_argument("dyadic_frame: m >= 1");
  if (base.length() != base.dim())
    throw std::invalid_argument("dyadic_frame: base must be a basis (N = n)");
  const int n = base.dim();
  const Eigen::MatrixXd gram =
      base.analysis.transpose() * base.synthesis -
      Eigen::MatrixXd::Identity(n, n);
  if (gram.cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument(
        "dyadic_frame: base is not biorthogonal within 1e-9");

  DyadicFrame out;
  out.base = base;
  out.n = n;
  out.m = m;
  const int N = 2 * n * m;
  Eigen::MatrixXd synth(n, N), ana(n, N);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= m; ++j) {
      const int c0 = DyadicFrameIndex::flat(i, j, 0, m);
      const int c1 = DyadicFrameIndex::flat(i, j, 1, m);
      synth.col(c0) = base.synthesis.col(0);
      synth.col(c1) =
          base.synthesis.col(0) + out.weight(j) * base.synthesis.col(i - 1);
      ana.col(c0) = -base.analysis.col(i - 1);
      ana.col(c1) = base.analysis.col(i - 1);
    }
  out.frame.synthesis = std::move(synth);
  out.frame.analysis = std::move(ana);
  out.frame.ambient = base.ambient;
  return out;
}

Frame expand_frame(const Frame& frame, const Eigen::MatrixXd& extra_basis,
                   const NormSpec& y_norm, const Eigen::MatrixXd& V) {
  frame.validate();
  const int N = frame.length();
  if (static_cast<int>(extra_basis.cols()) != N)
    throw std::invalid_argument(
        "expand_frame: need one y per frame element (got " +
        std::to_string(extra_basis.cols()) + " for N = " + std::to_string(N) +
        ")");
  if (V.rows() != frame.dim() || V.cols() != extra_basis.rows())
    throw std::invalid_argument("expand_frame: V shape mismatch");

  Eigen::MatrixXd synth(frame.dim(), 2 * N), ana(frame.dim(), 2 * N);
  for (int i = 0; i < N; ++i) {
    const double ny = y_norm(extra_basis.col(i));
    if (ny == 0.0)
      throw std::invalid_argument("expand_frame: ||y_i|| = 0 at i = " +
                                  std::to_string(i));
    const double lambda = z_basis_norm(frame, i) / ny;
    const Eigen::VectorXd vy = lambda * (V * extra_basis.col(i));
    synth.col(2 * i) = frame.synthesis.col(i) - vy;      // odd element
    synth.col(2 * i + 1) = frame.synthesis.col(i) + vy;  // even element
    ana.col(2 * i) = frame.analysis.col(i) / 2.0;
    ana.col(2 * i + 1) = frame.analysis.col(i) / 2.0;
  }
  Frame out;
  out.synthesis = std::move(synth);
  out.analysis = std::move(ana);
  out.ambient = frame.ambient;
  return out;
}

namespace {

double sampled_covering_radius(const Eigen::MatrixXd& net,
                               const NormSpec& ambient, int samples,
                               std::uint64_t seed) {
  Rng rng(seed);
  const int n = static_cast<int>(net.rows());
  double worst = 0.0;
  for (int t = 0; t < samples; ++t) {
    const Eigen::VectorXd x = t % 2 == 0 ? sample_ball(ambient, n, rng)
                                         : sample_sphere(ambient, n, rng);
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < net.cols(); ++k)
      best = std::min(best, ambient(x - net.col(k)));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

Frame net_augmented_frame(const Frame& frame, const Eigen::MatrixXd& net,
                          std::uint64_t seed) {
  frame.validate();
  if (net.rows() != frame.dim() || net.cols() < 1)
    throw std::invalid_argument("net_augmented_frame: bad net shape");
  if (sampled_covering_radius(net, frame.ambient, 512,
                              Rng::derive(seed, 17)) > 0.5 + 1e-9)
    throw std::invalid_argument(
        "net_augmented_frame: net is not 1/2-dense in the unit ball");

  const int N = frame.length();
  const int M = static_cast<int>(net.cols());
  const int L = std::max(N, M);

  // one pair per net point: extend the frame with zero-functional repeats,
  // cycle net points if the frame is longer
  Frame ext;
  ext.ambient = frame.ambient;
  ext.synthesis.resize(frame.dim(), L);
  ext.analysis = Eigen::MatrixXd::Zero(frame.dim(), L);
  ext.synthesis.leftCols(N) = frame.synthesis;
  ext.analysis.leftCols(N) = frame.analysis;
  for (int i = N; i < L; ++i)
    ext.synthesis.col(i) = frame.synthesis.col(i % N);

  Eigen::MatrixXd q(frame.dim(), L);
  for (int i = 0; i < L; ++i) q.col(i) = net.col(i % M);

  // separation ||q_i +/- x_i|| > 1/4: push 0.3 along a seeded direction and
  // reproject into the ball until it holds
  Rng rng(Rng::derive(seed, 23));
  for (int i = 0; i < L; ++i) {
    int tries = 0;
    auto separated = [&](const Eigen::VectorXd& p) {
      return frame.ambient(p + ext.synthesis.col(i)) > 0.25 &&
             frame.ambient(p - ext.synthesis.col(i)) > 0.25;
    };
    while (!separated(q.col(i))) {
      if (++tries > 16)
        throw std::runtime_error(
            "net_augmented_frame: could not separate net point " +
            std::to_string(i));
      Eigen::VectorXd p =
          q.col(i) + 0.3 * sample_sphere(frame.ambient, frame.dim(), rng);
      const double np = frame.ambient(p);
      if (np > 1.0) p /= np;
      q.col(i) = p;
    }
  }

  if (sampled_covering_radius(q, frame.ambient, 512, Rng::derive(seed, 31)) >
      0.5 + 1e-9)
    throw std::runtime_error(
        "net_augmented_frame: separation perturbation broke 1/2-density");

  // V e_i = q_i / lambda_i so that lambda_i V(e_i) is the net point itself
  Eigen::MatrixXd V(frame.dim(), L);
  for (int i = 0; i < L; ++i) {
    const double lambda = z_basis_norm(ext, i);  // ||y_i||_1 = 1
    V.col(i) = q.col(i) / lambda;
  }
  return expand_frame(ext, Eigen::MatrixXd::Identity(L, L), NormSpec::l1(),
                      V);
}

Frame KashinFrame::parseval_frame() const {
  Frame f;
  f.synthesis = U;
  f.analysis = U;
  f.ambient = NormSpec::l2();
  return f;
}

Frame KashinFrame::quantization_frame() const {
  const double s = std::sqrt(static_cast<double>(length()));
  Frame f;
  f.synthesis = U / s;
  f.analysis = U * s;
  f.ambient = NormSpec::l2();
  return f;
}

KashinFrame kashin_frame(int n, int N, std::uint64_t seed, int trial_samples) {
  if (n < 1 || N < n)
    throw std::invalid_argument("kashin_frame: need N >= n >= 1");
  if (trial_samples < 1)
    throw std::invalid_argument("kashin_frame: trial_samples >= 1");

  KashinFrame out;
  out.seed = seed;
  out.trial_samples = trial_samples;
  out.small_length_warning = N < 2 * n;

  for (int attempt = 0;; ++attempt) {
    Rng rng(Rng::derive(seed + static_cast<std::uint64_t>(attempt), 0));
    Eigen::MatrixXd G(n, N);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < N; ++j) G(i, j) = rng.gaussian();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G.transpose());
    Eigen::MatrixXd Q =
        qr.householderQ() * Eigen::MatrixXd::Identity(N, n);
    const Eigen::MatrixXd R =
        qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    bool rank_ok = true;
    for (int j = 0; j < n; ++j) {
      if (std::abs(R(j, j)) <= 1e-12 * std::sqrt(static_cast<double>(N))) {
        rank_ok = false;
        break;
      }
      if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);  // diag(R) >= 0 convention
    }
    if (rank_ok) {
      out.U = Q.transpose();
      break;
    }
    if (attempt >= 8)
      throw std::runtime_error("kashin_frame: rank-deficient draws, giving up");
  }

  Rng trial_rng(Rng::derive(seed, 1));
  double k_hat = 1.0, min_level = 1.0;
  for (int t = 0; t < trial_samples; ++t) {
    const Eigen::VectorXd x = sample_sphere(NormSpec::l2(), n, trial_rng);
    // probe the escalation ladder from its base
    const KashinRepresentation rep = kashin_represent(out, x, 400, 1.0);
    k_hat = std::max(k_hat, rep.level);
    min_level = std::max(min_level, kashin_min_level(out.U, x));
  }
  // the sampled max underestimates the sup over the sphere; if the ladder
  // rung clears it by less than 25%, take the next rung so representations
  // of fresh vectors do not escalate
  while (k_hat < 1.25 * min_level) k_hat *= 1.5;
  out.K_hat = k_hat;
  out.min_level_hat = min_level;
  return out;
}

}  // namespace frameq
