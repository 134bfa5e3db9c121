#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "frameq/norms.hpp"

namespace frameq {

// A finite frame of an n-dimensional normed space: paired synthesis vectors
// x_i and analysis functionals f_i, one per column. Functionals act through
// the Euclidean inner product; the ambient norm enters only when norms are
// evaluated. Immutable by convention after construction; all operations below
// are pure.
struct Frame {
  Eigen::MatrixXd synthesis;  // n x N, column i = x_i
  Eigen::MatrixXd analysis;   // n x N, column i = f_i
  NormSpec ambient = NormSpec::l2();

  int dim() const { return static_cast<int>(synthesis.rows()); }
  int length() const { return static_cast<int>(synthesis.cols()); }

  // Shape/finiteness checks; throws std::invalid_argument.
  void validate() const;
};

struct HilbertFrameBounds {
  double a = 0.0;
  double b = 0.0;
  bool is_frame = false;  // false <=> synthesis family does not span
};

// coefficients (f_i(x))_i
Eigen::VectorXd analysis(const Frame& frame, const Eigen::VectorXd& x);

// sum_i a_i x_i
Eigen::VectorXd synthesis(const Frame& frame, const Eigen::VectorXd& coeffs);

// sum_i delta k_i x_i for integer coefficients
Eigen::VectorXd synthesis_scaled(const Frame& frame,
                                 std::span<const std::int64_t> k, double delta);

// S = sum_i x_i x_i^T (symmetric PSD)
Eigen::MatrixXd frame_operator(const Frame& frame);

// Extreme eigenvalues of the frame operator. A non-spanning family is
// reported as a = 0 with is_frame = false, not an error.
HilbertFrameBounds frame_bounds(const Frame& frame);

// Same synthesis vectors, analysis replaced by I^{-1} x_j. Throws if the
// frame operator is singular.
Frame canonical_dual(const Frame& frame);

// Sampled lower estimate of the projection constant
//   K = sup_{x in B_X} max_{m <= e} || sum_{i=m}^{e} f_i(x) x_i ||.
// Deterministic for a fixed seed; a lower bound, never an exact K.
double projection_constant_estimate(const Frame& frame, int samples,
                                    std::uint64_t seed);

enum class ZNormVariant { interval_max, sign_max };

struct ZNormValue {
  double value = 0.0;
  bool sampled = false;  // sign_max fell back to sampled sign patterns
};

// The associated-space norm of a coefficient vector (Z built over `frame`):
//   interval_max: max over windows [m,e] of || sum_{i in [m,e], x_i != 0} a_i x_i ||_X
//                 plus the l2 norm of the coefficients sitting at zero vectors;
//   sign_max:     max over sign patterns instead of windows (exhaustive for
//                 <= 20 active indices, otherwise 4096 seeded patterns,
//                 flagged sampled).
ZNormValue z_norm(const Frame& frame, const Eigen::VectorXd& coeffs,
                  ZNormVariant variant);

// ||x_i||-type norm of the associated basis vector z_i (ambient norm of x_i,
// or 1 when x_i = 0, per the l2 part of the interval-max norm).
double z_basis_norm(const Frame& frame, int i);

// Checks ||x - synthesis(analysis(x))|| <= rel_tol * ||x|| on `samples`
// seeded gaussian vectors; returns the worst relative residual.
double reconstruction_residual(const Frame& frame, int samples,
                               std::uint64_t seed);

}  // namespace frameq
