#pragma once

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace frameq {

// f(x) = sum_k a_k sinc(x - s_k), spectrum in [-pi, pi]. sinc is the
// normalized sin(pi x)/(pi x).
struct BandlimitedSignal {
  std::vector<std::pair<double, double>> components;  // (amplitude, shift)
  double sup_norm_estimate = 0.0;  // dense-grid estimate of ||f||_inf

  double operator()(double x) const;
  static BandlimitedSignal from_components(
      std::vector<std::pair<double, double>> comps);
};

double sinc(double x);

enum class WindowFamily { raised_cosine, mollified_bump };

// Reconstruction kernel rho with rho_hat == 1/sqrt(2pi) on [-pi, pi] and
// support in [-lambda pi, lambda pi]. raised_cosine is a closed-form C^1
// cosine taper; mollified_bump is a numerically tabulated C-infinity window.
class SpectralWindow {
 public:
  double lambda() const { return lambda_; }
  WindowFamily family() const { return family_; }

  double rho(double x) const;
  double rho_prime(double x) const;
  double rho_prime_l1() const { return rho_prime_l1_; }

  // max_{64 test frequencies in [-pi,pi]} |rho_hat(xi) - 1/sqrt(2pi)|
  // by numerical Fourier transform of rho.
  double flatness_deviation(int n_freqs = 64) const;

  // monotone decay envelope: envelope(t) >= sup_{|s| >= |t|} |rho(s)|
  double envelope(double t) const;

  // Upper estimate of (1/lambda) sum over sample points at distance >= gap
  // of |rho|, from the decay envelope. Used for truncation-tail reporting.
  double tail_mass(double gap, double lambda_step) const;

  std::string family_name() const;

 private:
  friend SpectralWindow window_rho(double lambda, WindowFamily family);
  SpectralWindow() = default;

  double lambda_ = 2.0;
  WindowFamily family_ = WindowFamily::raised_cosine;
  double rho_prime_l1_ = 0.0;

  // tabulated values for the bump family (empty for raised_cosine)
  std::shared_ptr<const std::vector<double>> table_rho_;
  std::shared_ptr<const std::vector<double>> table_rho_prime_;
  double table_step_ = 0.0;

  // decay envelope for tail estimates: env_[k] >= sup_{|t| >= k*env_step_} |rho|
  std::shared_ptr<const std::vector<double>> env_;
  double env_step_ = 0.0;
};

SpectralWindow window_rho(double lambda, WindowFamily family);

// samples y_t = f(t/lambda), |t| <= T*lambda, in index order -floor(T lambda)
// .. +floor(T lambda).
std::vector<double> sample(const BandlimitedSignal& f, double lambda,
                           double T);

// (1/lambda) sum_t y_t rho(x - t/lambda) evaluated on the grid, y coming from
// sample() (or sigma-delta bits). lambda is the sampling rate; the window
// stays admissible at any rate >= its own parameter (its spectrum is flat on
// [-pi,pi] and supported inside [-window.lambda() pi, ...]), which is what
// lets the 1/lambda error factor shrink under oversampling with a fixed
// kernel. If tail_estimate is given it receives an upper estimate of the
// truncated mass, valid on the interior of the sample range.
std::vector<double> reconstruct_expansion(std::span<const double> samples,
                                          const SpectralWindow& window,
                                          double lambda,
                                          std::span<const double> grid,
                                          double max_abs_sample,
                                          double interior_radius,
                                          double* tail_estimate = nullptr);

struct SdReport {
  double lambda = 0.0;
  double T = 0.0;
  double rho_prime_L1 = 0.0;
  double max_error = 0.0;  // interior sup-norm error of the one-bit expansion
  double bound = 0.0;      // rho_prime_L1 / lambda
  double tail = 0.0;       // reported truncation tail
  bool pass = false;       // max_error <= bound + tail
  std::vector<double> grid, f_exact, f_reconstructed;
};

// Samples f at rate lambda, runs first-order sigma-delta on the samples,
// reconstructs from the bits, and measures the sup error on the interior
// (|x| <= T/2). Requires ||f||_inf <= 1 and lambda >= window.lambda().
SdReport sd_pipeline(const BandlimitedSignal& f, const SpectralWindow& window,
                     double lambda, double T, std::span<const double> grid);

std::vector<double> make_grid(double a, double b, double step);

}  // namespace frameq
