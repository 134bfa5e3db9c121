#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>

#include <Eigen/Dense>

namespace frameq {

struct Frame;
class Rng;

// A computable norm on coordinate space: the lp presets, or one of the two
// coefficient-space norms built from a frame (the interval-max norm and its
// unconditional sign-max variant).
class NormSpec {
 public:
  enum class Kind { lp, z_interval_max, z_sign_max };

  NormSpec() = default;

  static NormSpec lp(double p);
  static NormSpec l1() { return lp(1.0); }
  static NormSpec l2() { return lp(2.0); }
  static NormSpec linf() { return lp(std::numeric_limits<double>::infinity()); }
  static NormSpec z_interval_max(std::shared_ptr<const Frame> frame);
  static NormSpec z_sign_max(std::shared_ptr<const Frame> frame);

  double operator()(const Eigen::VectorXd& v) const;

  Kind kind() const { return kind_; }
  double p() const { return p_; }
  const std::shared_ptr<const Frame>& frame() const { return frame_; }
  bool is_lp() const { return kind_ == Kind::lp; }
  std::string description() const;

 private:
  Kind kind_ = Kind::lp;
  double p_ = 2.0;
  std::shared_ptr<const Frame> frame_;
};

double lp_norm(const Eigen::VectorXd& v, double p);

// Uniform point on the unit sphere of `norm` (gaussian direction, normalized).
Eigen::VectorXd sample_sphere(const NormSpec& norm, int n, Rng& rng);

// Uniform point in the unit ball. Exact radial sampling for l2; rejection from
// the bounding cube for the other lp norms.
Eigen::VectorXd sample_ball(const NormSpec& norm, int n, Rng& rng);

}  // namespace frameq
