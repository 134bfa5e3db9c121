#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "frameq/constructions.hpp"
#include "frameq/frame.hpp"

namespace frameq {

// The (epsilon, delta, C) triple a quantization property is tested against.
struct QuantizerConfig {
  double delta = 1.0;           // in (0, 1]
  double C = 1.0;               // >= 1
  double epsilon_target = 1.0;  // > 0
  void validate() const;
};

struct QuantizationResult {
  std::vector<std::int64_t> k;
  double delta = 0.0;
  double error = 0.0;        // ambient norm of x - sum_i delta k_i x_i
  double coeff_bound = 0.0;  // max_i |delta k_i|
  std::optional<double> z_norm_value;  // || sum_i delta k_i z_i ||_Z
  std::string algorithm;
  std::map<std::string, double> params;
  Eigen::VectorXd input;  // the quantized vector x
};

// Nearest integer multiple of delta, ties away from zero.
std::vector<std::int64_t> round_coeffs(const Eigen::VectorXd& a, double delta);

// Prop-5.7 quantizer for zonotope coefficients a in [-1,1]^{2nm}: per row i
// picks signed dyadic digits k_{(i,j,1)} in {0,+/-1} matching the row sum
// within 2^{-m}/(1-2^{-m}), then balances the e_1 mass with
// k_{(i,j,0)} in {-3..3} leaving a scalar residual of magnitude <= 1.
// Guarantees error <= 1 + n 2^{-m}/(1-2^{-m}) and all |k| <= 3 (delta = 1).
QuantizationResult dyadic_quantize(const DyadicFrame& dy,
                                   const Eigen::VectorXd& a,
                                   bool with_z_norm = false);

// Signed dyadic digit selection: digits in {0,+/-1}^m minimizing
// |target - sum_j digit_j 2^{-j}| (exhaustive via a cached sorted table for
// m <= 12, greedy most-significant-bit-first beyond). |target| <= 1 gives
// residual <= 2^{-m}.
std::vector<int> dyadic_digits(double target, int m);

struct KashinRepresentation {
  Eigen::VectorXd a;   // ||a||_inf <= 1 + 1e-9
  double level = 0.0;  // the level actually used (>= requested on escalation)
  int escalations = 0;
  int iterations = 0;
  double residual = 0.0;
};

// Iterative truncation: repeat { least-squares coefficients of the residual,
// add, clip to [-1,1] } up to max_iter, then solve exactly for the unclipped
// slack. Produces a with (level/sqrt(N)) U a = x within 1e-9. A level that
// fails to converge is raised by 1.5 (recorded); throws after too many
// escalations, carrying the best residual.
KashinRepresentation kashin_represent(const KashinFrame& kf,
                                      const Eigen::VectorXd& x,
                                      int max_iter = 600, double level = 0.0);

// Minimal level at which the truncation iteration converges for this x
// (exponential search + bisection). Used to measure K_hat.
double kashin_min_level(const Eigen::MatrixXd& U, const Eigen::VectorXd& x,
                        int max_iter = 300);

// l-inf representation followed by coordinate rounding on the scaled columns
// u_i/sqrt(N): error <= delta/2 + 1e-9 and max |delta k_i| <= level + delta/2.
QuantizationResult kashin_quantize(const KashinFrame& kf,
                                   const Eigen::VectorXd& x, double delta,
                                   int max_iter = 1200);

// A quantizer valid on the unit ball: for x in B_X it returns integer k with
// ||sum delta0 k_i z_i||_Z <= C0 and ||x - sum delta0 k_i x_i|| <= q0.
struct BaseQuantizer {
  double delta0 = 0.0;
  double C0 = 0.0;
  double q0 = 0.0;
  std::function<std::vector<std::int64_t>(const Eigen::VectorXd&)> quantize;
};

// Constants of the iterative extension, straight from the construction:
// n1 minimal with q1 = ((n1+1)/n1) q0 < 1, delta1 = delta0/n1,
// C1 = 2 C0 / (1 - q1).
struct IterativeQuantizerConfig {
  double delta0 = 0.0, C0 = 0.0, q0 = 0.0;
  int n1 = 0;
  double q1 = 0.0, delta1 = 0.0, C1 = 0.0;
  static IterativeQuantizerConfig from_base(double delta0, double C0,
                                            double q0);
};

// Extends a unit-ball quantizer to all of X: the returned results satisfy
// ||sum delta1 k_i z_i||_Z <= C1 ||x|| and ||x - sum delta1 k_i x_i|| <= 1.
// The base contract is validated on 100 sampled unit-ball vectors at
// construction; a violation throws.
class IterativeQuantizer {
 public:
  IterativeQuantizer(BaseQuantizer base, std::shared_ptr<const Frame> frame,
                     NormSpec z, std::uint64_t validation_seed);

  QuantizationResult quantize(const Eigen::VectorXd& x) const;
  const IterativeQuantizerConfig& config() const { return cfg_; }

 private:
  std::vector<std::int64_t> rescaled_base(const Eigen::VectorXd& x,
                                          double delta) const;

  BaseQuantizer base_;
  std::shared_ptr<const Frame> frame_;
  NormSpec z_;
  IterativeQuantizerConfig cfg_;
};

// First-order sigma-delta state: u_t = u_{t-1} + y_t - q_t stays in [-1,1]
// as long as the inputs do.
class SigmaDeltaModulator {
 public:
  // consumes y_t in [-1,1], returns the bit q_t in {-1,+1} (sign(0) = +1)
  int step(double y);
  double state() const { return u_; }
  std::int64_t index() const { return index_; }

 private:
  double u_ = 0.0;
  std::int64_t index_ = 0;
};

struct SigmaDeltaResult {
  std::vector<int> bits;      // q_t
  std::vector<double> state;  // u_t after each step
};

SigmaDeltaResult sigma_delta(std::span<const double> y);

}  // namespace frameq
