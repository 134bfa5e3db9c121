#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "frameq/constructions.hpp"
#include "frameq/frame.hpp"
#include "frameq/quantizers.hpp"

namespace frameq {

// f(t) = t^alpha, the preset strictly increasing family for the counting
// bound hypotheses.
struct PowerLaw {
  double alpha = 1.0;
  double operator()(double t) const;
  double inverse(double y) const;
};

struct BoundParams {
  double cotype_q = 2.0;       // q of the scaling law (Thm-5.6 sense)
  double length_ratio_q = 3.0; // q of the min-norm bound (N <= q n sense)
  double C_q = 1.0;            // cotype constant, user-supplied
  double K_Z = 1.0;            // projection constant of (z_i)
  double d = 1.0;              // universal constant, default 1, unnormalized
  double A = 1.0;              // universal constant, default 1, unnormalized
  PowerLaw f{1.0};
  PowerLaw g{0.5};
};

// All distinct points sum_j delta k_j x_j whose coefficient z-norm is <= C.
struct QuantizedSet {
  std::vector<Eigen::VectorXd> points;  // deduplicated at 1e-12
  double delta = 0.0;
  double C = 0.0;
  int coeff_cap = 0;
  std::string z_description;
  std::size_t cardinality() const { return points.size(); }
};

// Exact enumeration of k in [-coeff_cap, coeff_cap]^N with
// ||sum_j delta k_j z_j||_Z <= C, with lexicographic branch-and-bound pruning
// on the z-norm (sound for norms monotone under support restriction, which
// all NormSpec kinds are). The candidate count pre-pruning must stay below
// 2^budget_log2 (default 2^25, hard cap 2^40).
QuantizedSet enumerate_quantized_set(const Frame& frame, double delta,
                                     double C, const NormSpec& z,
                                     int coeff_cap, double budget_log2 = 25.0,
                                     bool prune = true);

// Empirical covering radius of the unit ball: max over sampled ball and
// sphere points of the distance to the nearest set point.
double density_check(const QuantizedSet& set, const NormSpec& ambient,
                     int samples, std::uint64_t seed);

// Eq-4.3.3 right-hand side:
//   n ln(1/eps) / f^{-1}(C/delta) - ln(4 K_Z C/delta + 1).
// eps >= 1 is an input error unless allow_vacuous (the sweep reports the
// vacuous value as-is).
double counting_lower_bound(int n, double eps, double delta, double C,
                            double K_Z, const PowerLaw& f,
                            bool allow_vacuous = false);

// A quantizer usable in the BCNQP sampling test: maps zonotope coefficients
// a in [-1,1]^N to a QuantizationResult against `frame`.
struct ZonotopeQuantizer {
  std::string name;
  std::shared_ptr<const Frame> frame;
  double delta = 0.0;
  std::function<QuantizationResult(const Eigen::VectorXd& a)> run;
};

ZonotopeQuantizer make_round_quantizer(std::shared_ptr<const Frame> frame,
                                       double delta);
ZonotopeQuantizer make_dyadic_quantizer(std::shared_ptr<const DyadicFrame> dy);
ZonotopeQuantizer make_kashin_quantizer(std::shared_ptr<const KashinFrame> kf,
                                        double delta);

struct BcnqpReport {
  double worst_error = 0.0;
  double worst_coeff = 0.0;  // max_i |k_i| observed (compare with C/delta)
  bool pass = false;
  int trials = 0;
};

// Draws `trials` coefficient vectors a in [-1,1]^N, quantizes
// x = sum a_i x_i, and checks the BCNQP inequalities
// ||x - sum delta k_i x_i|| <= epsilon_target and max |k_i| <= C/delta.
BcnqpReport bcnqp_sample_test(const ZonotopeQuantizer& quantizer,
                              const QuantizerConfig& config, int trials,
                              std::uint64_t seed);

struct ExperimentRecord {
  int n = 0, N = 0;
  double delta = 0.0, C = 0.0;
  double epsilon_target = 0.0, epsilon_measured = 0.0, worst_coeff = 0.0;
  std::size_t cardinality = 0;  // 0 = not enumerated
  double eq433_lnN = 0.0, thm56_N_lower = 0.0;
  bool pass = false;
  std::uint64_t seed = 0;
  std::int64_t wall_ms = 0;
};

enum class SweepKind { dyadic, kashin };

struct SweepConfig {
  std::vector<int> dims;  // ascending
  SweepKind kind = SweepKind::dyadic;
  int trials = 1000;
  double delta = 1.0;
  double C = 3.0;        // <= 0 with kind kashin: per-record K_hat + delta
  double epsilon = 0.0;  // <= 0: the construction's own guarantee
  std::uint64_t seed = 1;
  BoundParams bounds;
  bool timing = false;  // wall_ms stays 0 unless set (CSV determinism)
  // kashin-only knobs
  double length_factor = 3.0;  // N = ceil(length_factor * n)
  int trial_samples = 48;
};

// One record per dimension: builds the frame (dyadic with m = ceil(2 log2 n),
// or a Kashin frame), runs the BCNQP sampling test, and evaluates the named
// bounds. A failing record is flagged and the sweep continues.
std::vector<ExperimentRecord> scaling_sweep(const SweepConfig& cfg);

// sqrt(n) * min_i ||x_i||, the quantity bounded by a constant for BCNQP
// frames of proportional length.
double min_norm_ratio(const Frame& frame);

// d * C_q * n^{1/2 - 1/q} * ln n   (d defaults to 1, unnormalized)
double volume_ratio_bound(int n, double q, double C_q, double d = 1.0);
// A * C_2 * ln(1 + C_2)
double volume_ratio_bound2(double C_2, double A = 1.0);

// Fixed-schema CSV:
// n,N,delta,C,epsilon_target,epsilon_measured,worst_coeff,cardinality,
// eq433_lnN,thm56_N_lower,pass,seed,wall_ms
std::string records_to_csv(std::span<const ExperimentRecord> records);

}  // namespace frameq
