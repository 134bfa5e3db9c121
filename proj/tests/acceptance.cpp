// Acceptance suite: one line per criterion, quantitative thresholds pinned
// in code. Exits nonzero if any criterion (or its runtime budget) fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "frameq/bandlimited.hpp"
#include "frameq/bounds.hpp"
#include "frameq/constructions.hpp"
#include "frameq/frame.hpp"
#include "frameq/json_io.hpp"
#include "frameq/quantizers.hpp"
#include "frameq/rng.hpp"

using namespace frameq;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

void expect(Outcome& out, bool cond, const std::string& what) {
  if (!cond) {
    out.pass = false;
    out.detail += (out.detail.empty() ? "" : "; ") + what;
  }
}

Frame onb(int n) {
  Frame f;
  f.synthesis = Eigen::MatrixXd::Identity(n, n);
  f.analysis = f.synthesis;
  return f;
}

// 1. tight-frame identities of the explicit constructions
Outcome criterion_tight_frames() {
  Outcome out;
  const std::vector<double> eps{0.1, 0.2};
  const HilbertFrameBounds u4 = frame_bounds(two_onb_union(4, eps).frame);
  expect(out, std::abs(u4.a - 2.0) <= 1e-9, "two-ONB lower bound != 2");
  expect(out, std::abs(u4.b - 2.0) <= 1e-9, "two-ONB upper bound != 2");

  const HilbertFrameBounds pm = frame_bounds(dense_pm1_frame(4, 6));
  expect(out, pm.a >= 1.0 - 1e-9,
         "level frame lower bound " + format_double(pm.a) + " < 1");
  expect(out, pm.b <= 11.0 / 3.0 + 1e-9,
         "level frame upper bound " + format_double(pm.b) + " > 11/3");
  out.detail = "two-ONB (" + format_double(u4.a) + ", " + format_double(u4.b) +
               "), level frame (" + format_double(pm.a) + ", " +
               format_double(pm.b) + ")";
  return out;
}

// 2. dyadic BCNQP guarantee at n = 8, m = 7, 1000 draws
Outcome criterion_dyadic_bcnqp() {
  Outcome out;
  const int n = 8, m = 7;
  const DyadicFrame dy = dyadic_frame(onb(n), m);
  const double eps = 1.0 + n * dy.tail_weight();  // 1 + 8*2^-7/(1-2^-7)
  Rng rng(2024);
  double worst_err = 0.0;
  std::int64_t worst_k = 0;
  for (int t = 0; t < 1000; ++t) {
    const Eigen::VectorXd a =
        rng.uniform_vector(dy.frame.length(), -1.0, 1.0);
    const QuantizationResult r = dyadic_quantize(dy, a);
    worst_err = std::max(worst_err, r.error);
    for (auto v : r.k) worst_k = std::max(worst_k, std::abs(v));
  }
  expect(out, worst_err <= eps,
         "error " + format_double(worst_err) + " above " + format_double(eps));
  expect(out, worst_k <= 3, "coefficient outside {-3..3}");

  const double proj = projection_constant_estimate(dy.frame, 60, 77);
  expect(out, proj <= 4.0 + 1e-6,
         "projection constant estimate " + format_double(proj) + " > 4");
  out.detail = "worst error " + format_double(worst_err) + " <= " +
               format_double(eps) + ", max |k| " + std::to_string(worst_k) +
               ", proj est " + format_double(proj);
  return out;
}

// 3. Kashin tightness and quantization at n = 16, N = 48, delta = 0.05
Outcome criterion_kashin() {
  Outcome out;
  const KashinFrame kf = kashin_frame(16, 48, 20240711, 48);
  const HilbertFrameBounds fb = frame_bounds(kf.parseval_frame());
  expect(out, std::abs(fb.a - 1.0) <= 1e-9 && std::abs(fb.b - 1.0) <= 1e-9,
         "columns not a (1,1) tight frame");

  const double delta = 0.05;
  Rng rng(4096);
  double worst_err = 0.0, worst_coeff = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Eigen::VectorXd x = sample_sphere(NormSpec::l2(), 16, rng);
    const QuantizationResult r = kashin_quantize(kf, x, delta);
    worst_err = std::max(worst_err, r.error);
    worst_coeff = std::max(worst_coeff, r.coeff_bound);
  }
  expect(out, worst_err <= delta / 2.0 + 1e-9,
         "error " + format_double(worst_err) + " above delta/2");
  expect(out, worst_coeff <= kf.K_hat + delta,
         "coefficient bound " + format_double(worst_coeff) + " above K_hat+delta");
  out.detail = "K_hat " + format_double(kf.K_hat) + ", worst error " +
               format_double(worst_err) + ", worst |delta k| " +
               format_double(worst_coeff);
  return out;
}

// 4. iterative extension from a measured unit-ball quantizer on l2^4
Outcome criterion_iterative() {
  Outcome out;
  auto frame = std::make_shared<const Frame>(onb(4));
  const NormSpec z = NormSpec::z_interval_max(frame);

  BaseQuantizer base;
  base.q0 = 0.5;
  base.delta0 = 2.0 * base.q0 / 2.0;  // sqrt(n) = 2
  base.C0 = 1.0 + base.q0;            // provable l2 bound 1 + sqrt(n) delta0/2
  {
    const Eigen::MatrixXd analysis_mat = frame->analysis;
    const double d0 = base.delta0;
    base.quantize = [analysis_mat, d0](const Eigen::VectorXd& x) {
      return round_coeffs(analysis_mat.transpose() * x, d0);
    };
  }
  const IterativeQuantizer iq(base, frame, z, 515);
  const double C1 = iq.config().C1;
  expect(out, std::abs(C1 - 8.0 * base.C0) <= 1e-12,
         "C1 != 8 C0 for q0 = 1/2");

  Rng rng(516);
  double worst_err = 0.0, worst_ratio = 0.0;
  for (int t = 0; t < 100; ++t) {
    const double norm = std::pow(10.0, rng.uniform(0.0, 3.0));
    const Eigen::VectorXd x = norm * sample_sphere(NormSpec::l2(), 4, rng);
    const QuantizationResult r = iq.quantize(x);
    worst_err = std::max(worst_err, r.error);
    worst_ratio = std::max(worst_ratio, *r.z_norm_value / x.norm());
  }
  expect(out, worst_err <= 1.0 + 1e-9,
         "error " + format_double(worst_err) + " above 1");
  expect(out, worst_ratio <= C1 * (1.0 + 1e-12),
         "z-norm ratio " + format_double(worst_ratio) + " above C1");
  out.detail = "worst error " + format_double(worst_err) +
               ", worst z/(C1 ||x||) " + format_double(worst_ratio / C1);
  return out;
}

// 5. counting/volume inequality on three enumerated 2-D instances
Outcome criterion_counting() {
  Outcome out;
  struct Instance {
    Frame frame;
    double delta, C;
    int cap;
  };
  std::vector<Instance> instances;
  instances.push_back({onb(2), 0.25, 2.0, 8});
  {
    Frame mercedes;
    mercedes.synthesis.resize(2, 3);
    mercedes.synthesis.col(0) << 1.0, 0.0;
    mercedes.synthesis.col(1) << -0.5, std::sqrt(3.0) / 2.0;
    mercedes.synthesis.col(2) << -0.5, -std::sqrt(3.0) / 2.0;
    mercedes.analysis = mercedes.synthesis * (2.0 / 3.0);
    instances.push_back({mercedes, 0.5, 2.0, 5});
  }
  instances.push_back(
      {two_onb_union(2, std::vector<double>{0.2}).frame, 0.5, 1.5, 4});

  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    const auto zf = std::make_shared<Frame>(inst.frame);
    const NormSpec z = NormSpec::z_interval_max(zf);
    const QuantizedSet pruned = enumerate_quantized_set(
        inst.frame, inst.delta, inst.C, z, inst.cap, 30.0, true);
    const QuantizedSet naive = enumerate_quantized_set(
        inst.frame, inst.delta, inst.C, z, inst.cap, 30.0, false);
    expect(out, pruned.cardinality() == naive.cardinality(),
           "instance " + std::to_string(i) + ": pruning changed the set");
    bool same = pruned.cardinality() == naive.cardinality();
    for (std::size_t p = 0; same && p < pruned.points.size(); ++p)
      same = pruned.points[p] == naive.points[p];
    expect(out, same, "instance " + std::to_string(i) + ": point mismatch");

    const double eps = density_check(pruned, NormSpec::l2(), 10000,
                                     9000 + static_cast<std::uint64_t>(i));
    const double needed = 0.9 / (eps * eps);
    expect(out, static_cast<double>(pruned.cardinality()) >= needed,
           "instance " + std::to_string(i) + ": cardinality " +
               std::to_string(pruned.cardinality()) + " below " +
               format_double(needed));
    out.detail += (i ? "; " : "") + std::to_string(pruned.cardinality()) +
                  " pts, eps " + format_double(eps);
  }
  return out;
}

// 6. scaling law over the dyadic family, deterministic CSV
Outcome criterion_scaling() {
  Outcome out;
  SweepConfig cfg;
  cfg.dims = {2, 4, 8, 16, 32};
  cfg.trials = 1000;
  cfg.seed = 60;
  const std::vector<ExperimentRecord> recs = scaling_sweep(cfg);
  for (const auto& r : recs) {
    expect(out, r.pass, "n = " + std::to_string(r.n) + " failed BCNQP");
    const double ratio =
        static_cast<double>(r.N) /
        (r.n * std::log2(static_cast<double>(std::max(r.n, 2))));
    expect(out, ratio <= 5.0,
           "n = " + std::to_string(r.n) + ": N/(n log2 n) = " +
               format_double(ratio) + " above 5");
  }
  const std::string csv1 = records_to_csv(recs);
  const std::string csv2 = records_to_csv(scaling_sweep(cfg));
  expect(out, csv1 == csv2, "CSV not bit-identical across repeated runs");
  out.detail = std::to_string(recs.size()) + " records, N/(n log2 n) = 4";
  return out;
}

// 7. sigma-delta pipeline against the L1 bound
Outcome criterion_sigma_delta() {
  Outcome out;
  const BandlimitedSignal f = BandlimitedSignal::from_components({{0.9, 0.0}});
  const SpectralWindow w = window_rho(4.0, WindowFamily::raised_cosine);
  const std::vector<double> grid = make_grid(-25.0, 25.0, 0.05);
  const SdReport rep = sd_pipeline(f, w, 4.0, 50.0, grid);
  expect(out, rep.max_error <= rep.bound + rep.tail,
         "interior error " + format_double(rep.max_error) + " above bound " +
             format_double(rep.bound) + " + tail " + format_double(rep.tail));

  const SdReport rep8 = sd_pipeline(f, w, 8.0, 50.0, grid);
  expect(out, rep8.max_error <= rep.max_error + 1e-12,
         "doubling lambda increased the error");

  Rng rng(71);
  bool state_ok = true;
  SigmaDeltaModulator mod;
  for (int t = 0; t < 10000; ++t) {
    mod.step(rng.uniform(-1.0, 1.0));
    state_ok = state_ok && std::abs(mod.state()) <= 1.0;
  }
  expect(out, state_ok, "|u_n| exceeded 1");
  out.detail = "max err " + format_double(rep.max_error) + " vs bound " +
               format_double(rep.bound) + " (lambda 8: " +
               format_double(rep8.max_error) + ")";
  return out;
}

// 8. invariant suite: reconstruction, duals, z-norm axioms, recomputation
Outcome criterion_invariants() {
  Outcome out;

  // reconstruction identity across constructions
  std::vector<Frame> frames;
  frames.push_back(two_onb_union(4, std::vector<double>{0.1, 0.3}).frame);
  frames.push_back(dense_pm1_frame(3, 4));
  frames.push_back(dyadic_frame(onb(4), 5).frame);
  frames.push_back(dense_schauder_frame(2, 0.4).frame);
  frames.push_back(kashin_frame(6, 18, 5, 8).quantization_frame());
  for (std::size_t i = 0; i < frames.size(); ++i)
    expect(out, reconstruction_residual(frames[i], 100, 300 + i) <= 1e-9,
           "reconstruction failed on construction " + std::to_string(i));

  // canonical dual identities
  {
    const Frame& u = frames[0];  // tight
    const Frame dd = canonical_dual(canonical_dual(u));
    expect(out, (dd.analysis - u.analysis).norm() <= 1e-9,
           "dual of dual drifted on a tight frame");
    Rng rng(81);
    Frame g;
    g.synthesis.resize(3, 7);
    for (int j = 0; j < 7; ++j) g.synthesis.col(j) = rng.gaussian_vector(3);
    g.analysis = g.synthesis;
    const Frame dg = canonical_dual(g);
    Eigen::MatrixXd dual_op = Eigen::MatrixXd::Zero(3, 3);
    for (int j = 0; j < 7; ++j)
      dual_op += dg.analysis.col(j) * dg.analysis.col(j).transpose();
    const Eigen::MatrixXd Sinv = frame_operator(g).inverse();
    expect(out, (dual_op - Sinv).norm() <= 1e-9 * Sinv.norm(),
           "dual frame operator != S^{-1}");
  }

  // z-norm bimonotonicity and axioms
  {
    Rng rng(82);
    Frame g;
    g.synthesis.resize(3, 9);
    for (int j = 0; j < 9; ++j) g.synthesis.col(j) = rng.gaussian_vector(3);
    g.analysis = g.synthesis;
    const Eigen::VectorXd a = rng.uniform_vector(9, -1.0, 1.0);
    const double full = z_norm(g, a, ZNormVariant::interval_max).value;
    bool bimonotone = true;
    for (int lo = 0; lo < 9; ++lo)
      for (int hi = lo; hi < 9; ++hi) {
        Eigen::VectorXd r = Eigen::VectorXd::Zero(9);
        r.segment(lo, hi - lo + 1) = a.segment(lo, hi - lo + 1);
        bimonotone = bimonotone &&
                     z_norm(g, r, ZNormVariant::interval_max).value <=
                         full + 1e-12;
      }
    expect(out, bimonotone, "interval-max norm not bimonotone");

    bool axioms = true;
    for (int t = 0; t < 1000; ++t) {
      const Eigen::VectorXd u = rng.uniform_vector(9, -2.0, 2.0);
      const Eigen::VectorXd v = rng.uniform_vector(9, -2.0, 2.0);
      const double zu = z_norm(g, u, ZNormVariant::interval_max).value;
      const double zv = z_norm(g, v, ZNormVariant::interval_max).value;
      const double zuv =
          z_norm(g, Eigen::VectorXd(u + v), ZNormVariant::interval_max).value;
      const double lam = rng.uniform(0.1, 4.0);
      const double zlu =
          z_norm(g, Eigen::VectorXd(lam * u), ZNormVariant::interval_max)
              .value;
      axioms = axioms && zuv <= zu + zv + 1e-12 &&
               std::abs(zlu - lam * zu) <= 1e-12 * std::max(1.0, lam * zu) &&
               zu >= 0.0;
    }
    expect(out, axioms, "z-norm axioms violated on sampled pairs");
  }

  // quantizer error recomputation
  {
    const DyadicFrame dy = dyadic_frame(onb(4), 5);
    const KashinFrame kf = kashin_frame(8, 24, 6, 8);
    Rng rng(83);
    bool recompute_ok = true;
    for (int t = 0; t < 50; ++t) {
      const Eigen::VectorXd a =
          rng.uniform_vector(dy.frame.length(), -1.0, 1.0);
      const QuantizationResult r = dyadic_quantize(dy, a);
      const double err =
          (synthesis(dy.frame, a) - synthesis_scaled(dy.frame, r.k, r.delta))
              .norm();
      recompute_ok = recompute_ok &&
                     std::abs(err - r.error) <= 1e-12 * std::max(1.0, err);

      const Eigen::VectorXd x = sample_ball(NormSpec::l2(), 8, rng);
      const QuantizationResult rk = kashin_quantize(kf, x, 0.1);
      const double errk =
          (x - synthesis_scaled(kf.quantization_frame(), rk.k, rk.delta))
              .norm();
      recompute_ok = recompute_ok &&
                     std::abs(errk - rk.error) <= 1e-12 * std::max(1.0, errk);
    }
    expect(out, recompute_ok, "stored errors do not recompute");
  }
  out.detail = "reconstruction, duals, z-norm axioms, recomputation";
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"tight-frame identities", 1.0, criterion_tight_frames},
      {"dyadic BCNQP (n=8, m=7)", 10.0, criterion_dyadic_bcnqp},
      {"kashin quantization (n=16, N=48)", 30.0, criterion_kashin},
      {"iterative quantizer on l2^4", 10.0, criterion_iterative},
      {"counting/volume inequality", 60.0, criterion_counting},
      {"scaling law sweep", 120.0, criterion_scaling},
      {"sigma-delta bound", 30.0, criterion_sigma_delta},
      {"invariant suite", 60.0, criterion_invariants},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (secs > criteria[i].budget_seconds) {
      out.pass = false;
      out.detail += (out.detail.empty() ? "" : "; ") + std::string("over ") +
                    format_double(criteria[i].budget_seconds) + " s budget";
    }
    std::printf("[%zu/%zu] %s %-36s (%.2f s)%s%s\n", i + 1, criteria.size(),
                out.pass ? "PASS" : "FAIL", criteria[i].name, secs,
                out.detail.empty() ? "" : " -- ", out.detail.c_str());
    failures += !out.pass;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
