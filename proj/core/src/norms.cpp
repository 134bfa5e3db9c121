#include "frameq/norms.hpp"

#include <cmath>
#include <stdexcept>

#include "frameq/frame.hpp"
#include "frameq/rng.hpp"

namespace frameq {

NormSpec NormSpec::lp(double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("NormSpec::lp: p must be >= 1");
  NormSpec n;
  n.kind_ = Kind::lp;
  n.p_ = p;
  return n;
}

NormSpec NormSpec::z_interval_max(std::shared_ptr<const Frame> frame) {
  if (!frame) throw std::invalid_argument("z_interval_max: null frame");
  NormSpec n;
  n.kind_ = Kind::z_interval_max;
  n.frame_ = std::move(frame);
  return n;
}

NormSpec NormSpec::z_sign_max(std::shared_ptr<const Frame> frame) {
  if (!frame) throw std::invalid_argument("z_sign_max: null frame");
  NormSpec n;
  n.kind_ = Kind::z_sign_max;
  n.frame_ = std::move(frame);
  return n;
}

double lp_norm(const Eigen::VectorXd& v, double p) {
  if (std::isinf(p)) return v.lpNorm<Eigen::Infinity>();
  if (p == 2.0) return v.norm();
  if (p == 1.0) return v.lpNorm<1>();
  double s = 0.0;
  for (int i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]), p);
  return std::pow(s, 1.0 / p);
}

double NormSpec::operator()(const Eigen::VectorXd& v) const {
  switch (kind_) {
    case Kind::lp:
      return lp_norm(v, p_);
    case Kind::z_interval_max:
      return z_norm(*frame_, v, ZNormVariant::interval_max).value;
    case Kind::z_sign_max:
      return z_norm(*frame_, v, ZNormVariant::sign_max).value;
  }
  return 0.0;
}

std::string NormSpec::description() const {
  switch (kind_) {
    case Kind::lp:
      if (std::isinf(p_)) return "linf";
      if (p_ == 2.0) return "l2";
      if (p_ == 1.0) return "l1";
      return "lp:" + std::to_string(p_);
    case Kind::z_interval_max:
      return "z_interval_max";
    case Kind::z_sign_max:
      return "z_sign_max";
  }
  return "?";
}

Eigen::VectorXd sample_sphere(const NormSpec& norm, int n, Rng& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    Eigen::VectorXd g = rng.gaussian_vector(n);
    const double nv = norm(g);
    if (nv > 1e-12) return g / nv;
  }
  throw std::runtime_error("sample_sphere: degenerate norm");
}

Eigen::VectorXd sample_ball(const NormSpec& norm, int n, Rng& rng) {
  if (norm.is_lp() && norm.p() == 2.0) {
    Eigen::VectorXd dir = sample_sphere(norm, n, rng);
    return dir * std::pow(rng.uniform_open(), 1.0 / n);
  }
  if (!norm.is_lp())
    throw std::invalid_argument("sample_ball: only lp norms supported");
  // lp unit ball sits inside the cube [-1,1]^n
  for (int attempt = 0; attempt < 100000; ++attempt) {
    Eigen::VectorXd v = rng.uniform_vector(n, -1.0, 1.0);
    if (norm(v) <= 1.0) return v;
  }
  throw std::runtime_error("sample_ball: rejection sampling did not land");
}

}  // namespace frameq
