#include "frameq/bounds.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

#include "frameq/json_io.hpp"
#include "frameq/rng.hpp"

namespace frameq {

double PowerLaw::operator()(double t) const { return std::pow(t, alpha); }
double PowerLaw::inverse(double y) const { return std::pow(y, 1.0 / alpha); }

namespace {

struct Enumerator {
  const Frame& frame;
  const NormSpec& z;
  double delta, C;
  bool prune;
  std::vector<int> caps;
  Eigen::VectorXd coeffs;  // delta * k, zero beyond current depth
  std::vector<std::int64_t> k;
  std::vector<Eigen::VectorXd>* points;

  void dfs(int depth) {
    const int N = frame.length();
    if (depth == N) {
      if (z(coeffs) <= C + 1e-12)
        points->push_back(frame.synthesis * coeffs);
      return;
    }
    const int cap = caps[static_cast<std::size_t>(depth)];
    for (int v = -cap; v <= cap; ++v) {
      coeffs[depth] = delta * v;
      k[static_cast<std::size_t>(depth)] = v;
      if (prune && depth + 1 < N && z(coeffs) > C + 1e-12) continue;
      dfs(depth + 1);
    }
    coeffs[depth] = 0.0;
    k[static_cast<std::size_t>(depth)] = 0;
  }
};

}  // namespace

QuantizedSet enumerate_quantized_set(const Frame& frame, double delta,
                                     double C, const NormSpec& z,
                                     int coeff_cap, double budget_log2,
                                     bool prune) {
  frame.validate();
  if (!(delta > 0.0) || coeff_cap < 0)
    throw std::invalid_argument("enumerate_quantized_set: bad parameters");
  if (budget_log2 > 40.0)
    throw std::invalid_argument("enumerate_quantized_set: budget above 2^40");
  const int N = frame.length();
  const double bits = N * std::log2(2.0 * coeff_cap + 1.0);
  if (bits > budget_log2)
    throw std::invalid_argument(
        "enumerate_quantized_set: " + std::to_string(bits) +
        " bits of candidates exceed the budget; reduce coeff_cap");

  // per-coordinate cap from the single-index restriction
  // |k_i| z(delta e_i) <= C; the naive oracle path scans the full cube so the
  // pruned result is checked against an independent enumeration
  std::vector<int> caps(static_cast<std::size_t>(N), coeff_cap);
  if (prune) {
    for (int i = 0; i < N; ++i) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(N);
      e[i] = delta;
      const double zi = z(e);
      if (zi > 0.0)
        caps[static_cast<std::size_t>(i)] = std::min(
            coeff_cap, static_cast<int>(std::floor((C + 1e-12) / zi)));
    }
  }

  std::vector<Eigen::VectorXd> pts;
  Enumerator en{frame,
                z,
                delta,
                C,
                prune,
                std::move(caps),
                Eigen::VectorXd::Zero(N),
                std::vector<std::int64_t>(static_cast<std::size_t>(N), 0),
                &pts};
  en.dfs(0);

  std::sort(pts.begin(), pts.end(),
            [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
              for (int i = 0; i < a.size(); ++i) {
                if (a[i] < b[i]) return true;
                if (a[i] > b[i]) return false;
              }
              return false;
            });
  std::vector<Eigen::VectorXd> dedup;
  for (auto& p : pts) {
    if (!dedup.empty() && (dedup.back() - p).cwiseAbs().maxCoeff() <= 1e-12)
      continue;
    dedup.push_back(std::move(p));
  }

  QuantizedSet out;
  out.points = std::move(dedup);
  out.delta = delta;
  out.C = C;
  out.coeff_cap = coeff_cap;
  out.z_description = z.description();
  return out;
}

double density_check(const QuantizedSet& set, const NormSpec& ambient,
                     int samples, std::uint64_t seed) {
  if (set.points.empty())
    throw std::invalid_argument("density_check: empty quantized set");
  if (samples < 1) throw std::invalid_argument("density_check: samples >= 1");
  const int n = static_cast<int>(set.points.front().size());
  Rng rng(seed);
  const int ball_samples = samples - samples / 4;
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd x = s < ball_samples
                                  ? sample_ball(ambient, n, rng)
                                  : sample_sphere(ambient, n, rng);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : set.points)
      best = std::min(best, ambient(x - p));
    worst = std::max(worst, best);
  }
  return worst;
}

double counting_lower_bound(int n, double eps, double delta, double C,
                            double K_Z, const PowerLaw& f,
                            bool allow_vacuous) {
  if (n < 1 || !(delta > 0.0) || !(C > 0.0) || !(K_Z > 0.0) ||
      !(f.alpha > 0.0))
    throw std::invalid_argument("counting_lower_bound: bad parameters");
  if (!(eps > 0.0) || (eps >= 1.0 && !allow_vacuous))
    throw std::invalid_argument(
        "counting_lower_bound: epsilon must lie in (0, 1)");
  return n * std::log(1.0 / eps) / f.inverse(C / delta) -
         std::log(4.0 * K_Z * C / delta + 1.0);
}

ZonotopeQuantizer make_round_quantizer(std::shared_ptr<const Frame> frame,
                                       double delta) {
  if (!frame) throw std::invalid_argument("make_round_quantizer: null frame");
  ZonotopeQuantizer q;
  q.name = "round";
  q.frame = frame;
  q.delta = delta;
  q.run = [frame, delta](const Eigen::VectorXd& a) {
    QuantizationResult res;
    res.k = round_coeffs(a, delta);
    res.delta = delta;
    res.algorithm = "round";
    res.input = synthesis(*frame, a);
    res.error =
        frame->ambient(res.input - synthesis_scaled(*frame, res.k, delta));
    res.coeff_bound = 0.0;
    for (auto v : res.k)
      res.coeff_bound =
          std::max(res.coeff_bound, delta * std::abs(static_cast<double>(v)));
    return res;
  };
  return q;
}

ZonotopeQuantizer make_dyadic_quantizer(std::shared_ptr<const DyadicFrame> dy) {
  if (!dy) throw std::invalid_argument("make_dyadic_quantizer: null frame");
  ZonotopeQuantizer q;
  q.name = "dyadic";
  q.frame = std::shared_ptr<const Frame>(dy, &dy->frame);
  q.delta = 1.0;
  q.run = [dy](const Eigen::VectorXd& a) { return dyadic_quantize(*dy, a); };
  return q;
}

ZonotopeQuantizer make_kashin_quantizer(std::shared_ptr<const KashinFrame> kf,
                                        double delta) {
  if (!kf) throw std::invalid_argument("make_kashin_quantizer: null frame");
  ZonotopeQuantizer q;
  q.name = "kashin";
  q.frame = std::make_shared<const Frame>(kf->quantization_frame());
  q.delta = delta;
  auto frame = q.frame;
  q.run = [kf, frame, delta](const Eigen::VectorXd& a) {
    // the zonotope of the scaled columns sits inside the unit ball
    const Eigen::VectorXd x = synthesis(*frame, a);
    return kashin_quantize(*kf, x, delta);
  };
  return q;
}

BcnqpReport bcnqp_sample_test(const ZonotopeQuantizer& quantizer,
                              const QuantizerConfig& config, int trials,
                              std::uint64_t seed) {
  config.validate();
  if (quantizer.delta != config.delta)
    throw std::invalid_argument(
        "bcnqp_sample_test: quantizer built for delta = " +
        std::to_string(quantizer.delta));
  const Frame& frame = *quantizer.frame;
  const int N = frame.length();
  Rng rng(seed);
  BcnqpReport rep;
  rep.trials = trials;
  rep.pass = true;
  for (int t = 0; t < trials; ++t) {
    const Eigen::VectorXd a = rng.uniform_vector(N, -1.0, 1.0);
    const QuantizationResult res = quantizer.run(a);
    const Eigen::VectorXd x = synthesis(frame, a);
    const double err =
        frame.ambient(x - synthesis_scaled(frame, res.k, config.delta));
    double kmax = 0.0;
    for (auto v : res.k)
      kmax = std::max(kmax, std::abs(static_cast<double>(v)));
    rep.worst_error = std::max(rep.worst_error, err);
    rep.worst_coeff = std::max(rep.worst_coeff, kmax);
    if (err > config.epsilon_target + 1e-12 ||
        kmax > config.C / config.delta + 1e-12)
      rep.pass = false;
  }
  return rep;
}

std::vector<ExperimentRecord> scaling_sweep(const SweepConfig& cfg) {
  if (cfg.dims.empty())
    throw std::invalid_argument("scaling_sweep: no dimensions");
  if (!std::is_sorted(cfg.dims.begin(), cfg.dims.end()))
    throw std::invalid_argument("scaling_sweep: dims must be ascending");

  std::vector<ExperimentRecord> records;
  for (std::size_t idx = 0; idx < cfg.dims.size(); ++idx) {
    const int n = cfg.dims[idx];
    const std::uint64_t rec_seed = Rng::derive(cfg.seed, idx);
    const auto t0 = std::chrono::steady_clock::now();

    ExperimentRecord rec;
    rec.n = n;
    rec.seed = rec_seed;
    rec.delta = cfg.delta;
    rec.C = cfg.C;

    if (cfg.kind == SweepKind::dyadic) {
      const int m =
          static_cast<int>(std::ceil(2.0 * std::log2(static_cast<double>(n)) -
                                     1e-9));
      Frame base;
      base.synthesis = Eigen::MatrixXd::Identity(n, n);
      base.analysis = base.synthesis;
      auto dy = std::make_shared<const DyadicFrame>(dyadic_frame(base, m));
      rec.N = dy->frame.length();
      rec.epsilon_target = cfg.epsilon > 0.0
                               ? cfg.epsilon
                               : 1.0 + n * dy->tail_weight();
      const BcnqpReport rep = bcnqp_sample_test(
          make_dyadic_quantizer(dy),
          QuantizerConfig{cfg.delta, cfg.C, rec.epsilon_target}, cfg.trials,
          rec_seed);
      rec.epsilon_measured = rep.worst_error;
      rec.worst_coeff = rep.worst_coeff;
      rec.pass = rep.pass;
    } else {
      const int N = static_cast<int>(std::ceil(cfg.length_factor * n));
      const auto kf = std::make_shared<const KashinFrame>(
          kashin_frame(n, N, rec_seed, cfg.trial_samples));
      rec.N = N;
      const double C_eff = cfg.C > 0.0 ? cfg.C : kf->K_hat + cfg.delta;
      rec.C = C_eff;
      rec.epsilon_target =
          cfg.epsilon > 0.0 ? cfg.epsilon : cfg.delta / 2.0 + 1e-9;
      const BcnqpReport rep = bcnqp_sample_test(
          make_kashin_quantizer(kf, cfg.delta),
          QuantizerConfig{cfg.delta, C_eff, rec.epsilon_target}, cfg.trials,
          rec_seed);
      rec.epsilon_measured = rep.worst_error;
      rec.worst_coeff = rep.worst_coeff;
      rec.pass = rep.pass;
    }

    rec.eq433_lnN =
        counting_lower_bound(n, rec.epsilon_target, rec.delta, rec.C,
                             cfg.bounds.K_Z, cfg.bounds.f, true);
    rec.thm56_N_lower =
        n * std::log(static_cast<double>(n)) /
        (2.0 * cfg.bounds.cotype_q * std::log(1.0 + 2.0 * rec.C / rec.delta));

    if (cfg.timing) {
      const auto t1 = std::chrono::steady_clock::now();
      rec.wall_ms =
          std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0)
              .count();
    }
    records.push_back(std::move(rec));
  }
  return records;
}

double min_norm_ratio(const Frame& frame) {
  frame.validate();
  double mn = std::numeric_limits<double>::infinity();
  for (int i = 0; i < frame.length(); ++i)
    mn = std::min(mn, frame.ambient(frame.synthesis.col(i)));
  return std::sqrt(static_cast<double>(frame.dim())) * mn;
}

double volume_ratio_bound(int n, double q, double C_q, double d) {
  if (n < 2 || !(q >= 2.0))
    throw std::invalid_argument("volume_ratio_bound: need n >= 2, q >= 2");
  const double alpha = 0.5 - 1.0 / q;
  return d * C_q * std::pow(static_cast<double>(n), alpha) *
         std::log(static_cast<double>(n));
}

double volume_ratio_bound2(double C_2, double A) {
  if (!(C_2 > 0.0)) throw std::invalid_argument("volume_ratio_bound2: C_2 > 0");
  return A * C_2 * std::log(1.0 + C_2);
}

std::string records_to_csv(std::span<const ExperimentRecord> records) {
  std::ostringstream os;
  os << "n,N,delta,C,epsilon_target,epsilon_measured,worst_coeff,cardinality,"
        "eq433_lnN,thm56_N_lower,pass,seed,wall_ms\n";
  for (const auto& r : records) {
    os << r.n << ',' << r.N << ',' << format_double(r.delta) << ','
       << format_double(r.C) << ',' << format_double(r.epsilon_target) << ','
       << format_double(r.epsilon_measured) << ','
       << format_double(r.worst_coeff) << ',' << r.cardinality << ','
       << format_double(r.eq433_lnN) << ',' << format_double(r.thm56_N_lower)
       << ',' << (r.pass ? 1 : 0) << ',' << r.seed << ',' << r.wall_ms
       << '\n';
  }
  return os.str();
}

}  // namespace frameq
