#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "frameq/constructions.hpp"
#include "frameq/quantizers.hpp"
#include "frameq/rng.hpp"
#include "test_util.hpp"

using namespace frameq;
using testutil::onb;

TEST_CASE("quantizer config validation") {
  CHECK_NOTHROW((QuantizerConfig{1.0, 3.0, 1.07}).validate());
  const QuantizerConfig bad_delta{0.0, 3.0, 1.0};
  const QuantizerConfig big_delta{1.5, 3.0, 1.0};
  const QuantizerConfig small_C{0.5, 0.5, 1.0};
  const QuantizerConfig no_eps{0.5, 2.0, 0.0};
  CHECK_THROWS_AS(bad_delta.validate(), std::invalid_argument);
  CHECK_THROWS_AS(big_delta.validate(), std::invalid_argument);
  CHECK_THROWS_AS(small_C.validate(), std::invalid_argument);
  CHECK_THROWS_AS(no_eps.validate(), std::invalid_argument);
}

TEST_CASE("round_coeffs") {
  Eigen::Vector2d a(0.24, -0.26);
  const auto k = round_coeffs(a, 0.5);
  CHECK(k[0] == 0);
  CHECK(k[1] == -1);

  Eigen::VectorXd tie(1);
  tie << 0.25;
  CHECK(round_coeffs(tie, 0.5)[0] == 1);  // tie away from zero
  tie << -0.25;
  CHECK(round_coeffs(tie, 0.5)[0] == -1);

  Rng rng(3);
  Eigen::VectorXd exact(5);
  for (int i = 0; i < 5; ++i)
    exact[i] = 0.25 * static_cast<double>(rng.uniform_int(-8, 8));
  const auto kr = round_coeffs(exact, 0.25);
  for (int i = 0; i < 5; ++i)
    CHECK(static_cast<double>(kr[static_cast<std::size_t>(i)]) * 0.25 ==
          exact[i]);

  CHECK_THROWS_AS(round_coeffs(a, 0.0), std::invalid_argument);
}

TEST_CASE("signed dyadic digits") {
  SUBCASE("0.625 is exact at m = 3") {
    // exhaustive oracle over {0,+/-1}^3
    const double target = 0.625;
    double best = 1e9;
    for (int d1 = -1; d1 <= 1; ++d1)
      for (int d2 = -1; d2 <= 1; ++d2)
        for (int d3 = -1; d3 <= 1; ++d3)
          best = std::min(best, std::abs(target - (d1 * 0.5 + d2 * 0.25 +
                                                   d3 * 0.125)));
    CHECK(best == 0.0);
    const auto digits = dyadic_digits(target, 3);
    CHECK(digits[0] == 1);
    CHECK(digits[1] == 0);
    CHECK(digits[2] == 1);
  }

  SUBCASE("residual bound and greedy/exhaustive agreement") {
    Rng rng(17);
    for (int m : {3, 6, 10}) {
      for (int t = 0; t < 200; ++t) {
        const double target = rng.uniform(-1.0, 1.0) *
                              (1.0 - std::ldexp(1.0, -m));
        const auto digits = dyadic_digits(target, m);
        double v = 0.0;
        for (int j = 1; j <= m; ++j)
          v += digits[static_cast<std::size_t>(j - 1)] * std::ldexp(1.0, -j);
        CHECK(std::abs(target - v) <= std::ldexp(1.0, -m) + 1e-15);
      }
    }
    // the greedy path (m > 12) also meets the bound
    for (int t = 0; t < 200; ++t) {
      const int m = 14;
      const double target =
          rng.uniform(-1.0, 1.0) * (1.0 - std::ldexp(1.0, -m));
      const auto digits = dyadic_digits(target, m);
      double v = 0.0;
      for (int j = 1; j <= m; ++j)
        v += digits[static_cast<std::size_t>(j - 1)] * std::ldexp(1.0, -j);
      CHECK(std::abs(target - v) <= std::ldexp(1.0, -m) + 1e-15);
    }
  }
}

TEST_CASE("dyadic quantizer") {
  const int n = 4, m = 6;
  const DyadicFrame dy = dyadic_frame(onb(n), m);
  const int N = 2 * n * m;

  SUBCASE("zero in, zero out") {
    const QuantizationResult r =
        dyadic_quantize(dy, Eigen::VectorXd::Zero(N));
    for (auto v : r.k) CHECK(v == 0);
    CHECK(r.error == 0.0);
  }

  SUBCASE("error and coefficient bounds on random draws") {
    Rng rng(23);
    const double bound = 1.0 + n * dy.tail_weight();
    for (int t = 0; t < 1000; ++t) {
      const Eigen::VectorXd a = rng.uniform_vector(N, -1.0, 1.0);
      const QuantizationResult r = dyadic_quantize(dy, a);
      CHECK(r.error <= bound + 1e-9);
      for (auto v : r.k) {
        CHECK(v >= -3);
        CHECK(v <= 3);
      }
      // stored error must recompute from (k, delta) and the frame
      const Eigen::VectorXd x = synthesis(dy.frame, a);
      const double err =
          (x - synthesis_scaled(dy.frame, r.k, r.delta)).norm();
      CHECK(r.error == doctest::Approx(err).epsilon(1e-12));
    }
  }

  SUBCASE("coefficients outside [-1,1] are rejected") {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(N);
    a[0] = 1.5;
    CHECK_THROWS_AS(dyadic_quantize(dy, a), std::invalid_argument);
  }

  SUBCASE("z-norm is attached on request") {
    Rng rng(29);
    const Eigen::VectorXd a = rng.uniform_vector(N, -1.0, 1.0);
    const QuantizationResult r = dyadic_quantize(dy, a, true);
    CHECK(r.z_norm_value.has_value());
    CHECK(*r.z_norm_value >= 0.0);
  }
}

TEST_CASE("kashin representation") {
  const KashinFrame kf = kashin_frame(8, 24, 7, 16);
  const double sqrtN = std::sqrt(24.0);

  SUBCASE("zero maps to zero") {
    const KashinRepresentation rep =
        kashin_represent(kf, Eigen::VectorXd::Zero(8));
    CHECK(rep.a.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("exact representation at the measured level") {
    Rng rng(31);
    for (int t = 0; t < 100; ++t) {
      const Eigen::VectorXd x = sample_sphere(NormSpec::l2(), 8, rng);
      const KashinRepresentation rep = kashin_represent(kf, x);
      CHECK(rep.a.lpNorm<Eigen::Infinity>() <= 1.0 + 1e-9);
      const Eigen::VectorXd back = (rep.level / sqrtN) * (kf.U * rep.a);
      CHECK((back - x).norm() <= 1e-9);
    }
  }

  SUBCASE("norm precondition") {
    Eigen::VectorXd big = Eigen::VectorXd::Zero(8);
    big[0] = 2.0;
    CHECK_THROWS_AS(kashin_represent(kf, big), std::invalid_argument);
  }

  SUBCASE("minimal level agrees with a null-space grid oracle (n=2, N=4)") {
    const KashinFrame small = kashin_frame(2, 4, 100, 8);
    Rng rng(101);
    for (int t = 0; t < 4; ++t) {
      const Eigen::VectorXd x = sample_sphere(NormSpec::l2(), 2, rng);
      // oracle: min ||b||_inf over { b : U b = sqrt(N) x }, searched over
      // the 2-dimensional null-space offset on a refining grid
      const Eigen::VectorXd b0 = 2.0 * (small.U.transpose() * x);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(small.U);
      const Eigen::MatrixXd null_basis = lu.kernel();  // 4 x 2
      double best = b0.lpNorm<Eigen::Infinity>();
      Eigen::Vector2d center(0.0, 0.0);
      double span = 3.0;
      for (int stage = 0; stage < 4; ++stage) {
        Eigen::Vector2d local_best = center;
        for (double s = -span; s <= span; s += span / 40.0)
          for (double u = -span; u <= span; u += span / 40.0) {
            const Eigen::VectorXd b =
                b0 + null_basis * Eigen::Vector2d(center[0] + s,
                                                  center[1] + u);
            const double v = b.lpNorm<Eigen::Infinity>();
            if (v < best) {
              best = v;
              local_best = center + Eigen::Vector2d(s, u);
            }
          }
        center = local_best;
        span /= 20.0;
      }
      const double ours = kashin_min_level(small.U, x);
      // cannot materially beat the LP optimum (1e-9 convergence slack)
      CHECK(ours >= best * (1.0 - 1e-4));
      CHECK(ours <= best * 1.05);  // and lands within 5%
    }
  }
}

TEST_CASE("kashin quantizer") {
  const KashinFrame kf = kashin_frame(16, 48, 11, 32);

  SUBCASE("zero in, zero out") {
    const QuantizationResult r =
        kashin_quantize(kf, Eigen::VectorXd::Zero(16), 0.05);
    for (auto v : r.k) CHECK(v == 0);
    CHECK(r.error == 0.0);
  }

  SUBCASE("error and coefficient bounds on unit vectors") {
    Rng rng(13);
    const double delta = 0.05;
    for (int t = 0; t < 100; ++t) {
      const Eigen::VectorXd x = sample_sphere(NormSpec::l2(), 16, rng);
      const QuantizationResult r = kashin_quantize(kf, x, delta);
      CHECK(r.error <= delta / 2.0 + 1e-9);
      CHECK(r.coeff_bound <= kf.K_hat + delta);
      // recompute invariant
      const Frame qf = kf.quantization_frame();
      const double err = (x - synthesis_scaled(qf, r.k, delta)).norm();
      CHECK(r.error == doctest::Approx(err).epsilon(1e-12));
    }
  }
}

namespace {

// rounding quantizer on the coordinate ONB: provably (C0, q0) on the unit
// ball at delta0 = 2 q0 / sqrt(n)
BaseQuantizer make_onb_rounder(const Frame& f, double q0) {
  const int n = f.dim();
  BaseQuantizer base;
  base.q0 = q0;
  base.delta0 = 2.0 * q0 / std::sqrt(static_cast<double>(n));
  base.C0 = 1.0 + q0;
  const Eigen::MatrixXd analysis_mat = f.analysis;
  const double delta0 = base.delta0;
  base.quantize = [analysis_mat, delta0](const Eigen::VectorXd& x) {
    return round_coeffs(analysis_mat.transpose() * x, delta0);
  };
  return base;
}

}  // namespace

TEST_CASE("iterative quantizer") {
  auto frame = std::make_shared<const Frame>(onb(4));
  const NormSpec z = NormSpec::z_interval_max(frame);
  const BaseQuantizer base = make_onb_rounder(*frame, 0.5);
  const IterativeQuantizer iq(base, frame, z, 1234);

  SUBCASE("constants follow the construction") {
    const IterativeQuantizerConfig& cfg = iq.config();
    CHECK(cfg.n1 == 2);
    CHECK(cfg.q1 == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(cfg.C1 == doctest::Approx(8.0 * cfg.C0).epsilon(1e-12));
    CHECK(cfg.delta1 == doctest::Approx(cfg.delta0 / 2.0).epsilon(1e-15));
  }

  SUBCASE("unit ball needs a single base call") {
    int calls = 0;
    BaseQuantizer counting = base;
    auto inner = base.quantize;
    counting.quantize = [&calls, inner](const Eigen::VectorXd& x) {
      ++calls;
      return inner(x);
    };
    const IterativeQuantizer ciq(counting, frame, z, 1234);
    calls = 0;
    Rng rng(55);
    const Eigen::VectorXd x = sample_ball(NormSpec::l2(), 4, rng);
    const QuantizationResult r = ciq.quantize(x);
    CHECK(calls == 1);
    CHECK(r.error <= 1.0 + 1e-9);
  }

  SUBCASE("contract holds across three orders of magnitude") {
    Rng rng(56);
    const IterativeQuantizerConfig& cfg = iq.config();
    for (int t = 0; t < 30; ++t) {
      const double scale = std::pow(10.0, rng.uniform(0.0, 3.0));
      const Eigen::VectorXd x =
          scale * sample_sphere(NormSpec::l2(), 4, rng);
      const QuantizationResult r = iq.quantize(x);
      CHECK(r.error <= 1.0 + 1e-9);
      REQUIRE(r.z_norm_value.has_value());
      CHECK(*r.z_norm_value <= cfg.C1 * x.norm() * (1.0 + 1e-12));
    }
  }

  SUBCASE("contract is homogeneous: x and 2x both satisfy it") {
    Rng rng(57);
    const IterativeQuantizerConfig& cfg = iq.config();
    const Eigen::VectorXd x = 3.7 * sample_sphere(NormSpec::l2(), 4, rng);
    for (double s : {1.0, 2.0}) {
      const Eigen::VectorXd xs = s * x;
      const QuantizationResult r = iq.quantize(xs);
      CHECK(r.error <= 1.0 + 1e-9);
      CHECK(*r.z_norm_value <= cfg.C1 * xs.norm() * (1.0 + 1e-12));
      CHECK(r.delta == cfg.delta1);
    }
  }

  SUBCASE("zero vector") {
    const QuantizationResult r = iq.quantize(Eigen::VectorXd::Zero(4));
    CHECK(r.error == 0.0);
    for (auto v : r.k) CHECK(v == 0);
  }

  SUBCASE("a lying base contract is caught at validation") {
    BaseQuantizer liar = base;
    liar.C0 = 1e-6;  // claims an impossible z-bound
    CHECK_THROWS_AS(IterativeQuantizer(liar, frame, z, 1234),
                    std::runtime_error);
  }
}

TEST_CASE("sigma-delta modulator") {
  SUBCASE("constant one is represented exactly") {
    std::vector<double> y(50, 1.0);
    const SigmaDeltaResult r = sigma_delta(y);
    for (int q : r.bits) CHECK(q == 1);
    for (double u : r.state) CHECK(u == 0.0);
  }

  SUBCASE("zero input alternates and the state cycles 0 -> -1 -> 0") {
    std::vector<double> y(6, 0.0);
    const SigmaDeltaResult r = sigma_delta(y);
    for (std::size_t i = 0; i < y.size(); ++i) {
      CHECK(r.bits[i] == (i % 2 == 0 ? 1 : -1));
      CHECK(r.state[i] == (i % 2 == 0 ? -1.0 : 0.0));
    }
  }

  SUBCASE("state stays in [-1,1] and telescopes the partial sums") {
    Rng rng(71);
    std::vector<double> y(1000);
    for (auto& v : y) v = rng.uniform(-1.0, 1.0);
    const SigmaDeltaResult r = sigma_delta(y);
    double partial = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      CHECK(std::abs(r.state[i]) <= 1.0);
      partial += y[i] - r.bits[i];
      CHECK(partial == doctest::Approx(r.state[i]).epsilon(1e-12));
    }
  }

  SUBCASE("out-of-range input") {
    std::vector<double> y{0.5, 1.5};
    CHECK_THROWS_AS(sigma_delta(y), std::invalid_argument);
  }
}
