#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "frameq/frame.hpp"

namespace frameq {

// Union of the coordinate ONB of R^n with its eps-rotated copy (n even,
// pair i rotated by angle asin(eps_i) in the (2i-1, 2i) plane). Tight with
// bound 2; `difference` holds the orthogonal family z_j = e_j - f_j with
// ||z_{2i-1}|| = ||z_{2i}|| = O(eps_i).
struct TwoOnbUnion {
  Frame frame;                 // 2n vectors, canonical-dual analysis (x/2)
  Eigen::MatrixXd difference;  // n columns z_j
};
TwoOnbUnion two_onb_union(int n, std::span<const double> eps);

// Finite truncation of the dense {-1,0,1}-combination frame: levels
// c_i = 2^{-i}, i <= L, over base coordinates e_j, j <= n, with auxiliary
// coordinates realized as extra dimensions n+1 .. n+nL. Pairs
// (c_i e_j + e(i,j), e(i,j)) are listed along diagonals of the (i,j) grid;
// the n base coordinate vectors are appended so the family spans (they stand
// in for the basis partition of the infinite construction). Canonical-dual
// analysis; N = 2nL + n, ambient dimension n + nL.
Frame dense_pm1_frame(int n, int levels);

// Truncated pair frame over a grid net of the Euclidean ball: pairs
// x_{2k-1} = z_k + e_{sigma(k)}, x_{2k} = z_k with functional
// +/- e_{sigma(k)} / m_{sigma(k)}, sigma cycling 1..n (m_j = multiplicity of
// coordinate j, so the finite sum reconstructs exactly). The synthesis family
// is dense in the ball at scale grid_step but is not a Hilbert frame in
// general.
struct DenseSchauderFrame {
  Frame frame;
  Eigen::MatrixXd net;  // n x K, the net points z_k
  bool coarse_warning = false;
};
DenseSchauderFrame dense_schauder_frame(int n, double grid_step);

// Index (i,j,s), i <= n, j <= m, s in {0,1}, flattened lexicographically.
struct DyadicFrameIndex {
  int i = 1, j = 1, s = 0;
  static int flat(int i, int j, int s, int m) {
    return 2 * ((i - 1) * m + (j - 1)) + s;
  }
  static DyadicFrameIndex unflat(int pos, int m) {
    DyadicFrameIndex ix;
    ix.s = pos & 1;
    const int pair = pos >> 1;
    ix.j = pair % m + 1;
    ix.i = pair / m + 1;
    return ix;
  }
};

// The 2nm-element BCNQP frame built over a biorthogonal basis:
//   x_{(i,j,0)} = e_1,  x_{(i,j,1)} = e_1 + (2^{-j}/(1-2^{-m})) e_i,
//   f_{(i,j,0)} = -e*_i, f_{(i,j,1)} = e*_i.
struct DyadicFrame {
  Frame frame;
  Frame base;
  int n = 0, m = 0;
  double weight(int j) const;  // 2^{-j}/(1-2^{-m})
  double tail_weight() const;  // 2^{-m}/(1-2^{-m})
};
DyadicFrame dyadic_frame(const Frame& base, int m);

// Frame expansion by a bounded linear operator: each element (x_i, f_i)
// splits into the pair (x_i -/+ lambda_i V(y_i), f_i / 2) with
// lambda_i = ||z_i|| / ||y_i||. Requires one y per frame element.
Frame expand_frame(const Frame& frame, const Eigen::MatrixXd& extra_basis,
                   const NormSpec& y_norm, const Eigen::MatrixXd& V);

// expand_frame with V carrying the l1 basis onto the given 1/2-net of B_X,
// norm-compensated so that (x~_{2i} - x~_{2i-1})/2 lands exactly on a net
// point. Verifies the net is 1/2-dense on sampled points (input error
// otherwise) and enforces ||net_i +/- x_i|| > 1/4 by seeded perturbation.
Frame net_augmented_frame(const Frame& frame, const Eigen::MatrixXd& net,
                          std::uint64_t seed);

// Random row-orthonormal matrix plus the measured l-inf representation level.
struct KashinFrame {
  Eigen::MatrixXd U;  // n x N, U U^T = I_n
  // level found by the representation algorithm (escalation ladder from 1,
  // factor 1.5), maxed over the trial vectors; representations default to it
  double K_hat = 1.0;
  // max over trials of the bisected minimal convergent level: an empirical
  // lower bound on the true inclusion constant
  double min_level_hat = 1.0;
  std::uint64_t seed = 0;
  int trial_samples = 0;
  bool small_length_warning = false;  // N < 2n

  int dim() const { return static_cast<int>(U.rows()); }
  int length() const { return static_cast<int>(U.cols()); }

  // Columns u_i with analysis u_i: the (1,1) tight frame.
  Frame parseval_frame() const;
  // Columns u_i/sqrt(N) with analysis sqrt(N) u_i: the frame quantized
  // against in kashin_quantize.
  Frame quantization_frame() const;
};

// Draws a seeded gaussian n x N matrix, orthonormalizes its rows by QR with
// nonnegative R diagonal, and measures K_hat as the largest minimal
// representation level over `trial_samples` random unit vectors.
KashinFrame kashin_frame(int n, int N, std::uint64_t seed, int trial_samples);

}  // namespace frameq
