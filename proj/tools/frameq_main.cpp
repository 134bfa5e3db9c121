// frameq: experiment runner for frame-based coefficient quantization.
// Subcommands: build-frame, quantize, density, sweep, sigma-delta, bound-eval.
// Every run writes a sidecar manifest echoing the resolved config; JSON
// outputs embed the config hash. Identical config + seed means bit-identical
// output files.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "frameq/bandlimited.hpp"
#include "frameq/bounds.hpp"
#include "frameq/constructions.hpp"
#include "frameq/frame.hpp"
#include "frameq/json_io.hpp"
#include "frameq/quantizers.hpp"
#include "frameq/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace frameq;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitContract = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("FRAMEQ_SEED"))
    return std::strtoull(env, nullptr, 10);
  return 12345;
}

json load_config_file(const std::string& path,
                      const std::vector<std::string>& allowed) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path);
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw UsageError("malformed config JSON: " + std::string(e.what()));
  }
  if (!cfg.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [key, _] : cfg.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw UsageError("unknown config key '" + key + "'");
  }
  return cfg;
}

// config-file value wins over the default, a flag given on the command line
// wins over both
template <typename T>
void merge(const json& cfg, const char* key, const CLI::Option* opt, T& value) {
  if (opt != nullptr && opt->count() > 0) return;
  if (cfg.contains(key)) value = cfg.at(key).get<T>();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  out << text;
}

// the hash covers the semantic config only, so identical runs written to
// different paths produce bit-identical payloads
std::string semantic_hash(json resolved) {
  resolved.erase("out");
  resolved.erase("out_prefix");
  return config_hash(resolved);
}

void write_manifest(const fs::path& out_file, const std::string& command,
                    const json& resolved) {
  json manifest{{"command", command},
                {"config", resolved},
                {"config_hash", semantic_hash(resolved)}};
  write_text(out_file.string() + ".manifest.json", manifest.dump(2) + "\n");
}

json with_hash(json j, const json& resolved) {
  j["config_hash"] = semantic_hash(resolved);
  return j;
}

Frame onb_frame(int n) {
  Frame f;
  f.synthesis = Eigen::MatrixXd::Identity(n, n);
  f.analysis = f.synthesis;
  return f;
}

Eigen::MatrixXd grid_net(int n, double step) {
  std::vector<Eigen::VectorXd> pts;
  const int K = static_cast<int>(std::floor(1.0 / step));
  Eigen::VectorXd g(n);
  std::vector<int> idx(static_cast<std::size_t>(n), -K);
  while (true) {
    for (int d = 0; d < n; ++d) g[d] = step * idx[static_cast<std::size_t>(d)];
    if (g.norm() <= 1.0) pts.push_back(g);
    int d = 0;
    while (d < n && ++idx[static_cast<std::size_t>(d)] > K) {
      idx[static_cast<std::size_t>(d)] = -K;
      ++d;
    }
    if (d == n) break;
  }
  Eigen::MatrixXd net(n, static_cast<int>(pts.size()));
  for (std::size_t k = 0; k < pts.size(); ++k)
    net.col(static_cast<int>(k)) = pts[k];
  return net;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw UsageError("malformed JSON in " + path + ": " + e.what());
  }
}

// ---------------------------------------------------------------- build-frame

int cmd_build_frame(const json& cfg, const std::string& out_path) {
  const std::string kind = cfg.at("kind").get<std::string>();
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();

  Frame frame;
  ConstructionMeta meta;
  meta.kind = kind;
  meta.seed = seed;
  std::string warning;

  if (kind == "kashin") {
    const int n = cfg.at("n").get<int>();
    const int N = cfg.at("N").get<int>();
    const int trials = cfg.at("trial_samples").get<int>();
    const KashinFrame kf = kashin_frame(n, N, seed, trials);
    write_text(out_path, with_hash(kashin_to_json(kf), cfg).dump(2) + "\n");
    const HilbertFrameBounds fb = frame_bounds(kf.parseval_frame());
    std::cout << "kashin frame n=" << n << " N=" << N << " tight bounds ("
              << format_double(fb.a) << ", " << format_double(fb.b)
              << ") K_hat=" << format_double(kf.K_hat)
              << " min_level_hat=" << format_double(kf.min_level_hat);
    if (kf.small_length_warning) std::cout << " [warning: N < 2n]";
    std::cout << "\n";
    return kExitOk;
  }

  if (kind == "two_onb") {
    const int n = cfg.at("n").get<int>();
    const double e = cfg.at("eps").get<double>();
    const std::vector<double> eps(static_cast<std::size_t>(n / 2), e);
    frame = two_onb_union(n, eps).frame;
    meta.params = {{"n", n}, {"eps", e}};
  } else if (kind == "dense_pm1") {
    const int n = cfg.at("n").get<int>();
    const int L = cfg.at("L").get<int>();
    frame = dense_pm1_frame(n, L);
    meta.params = {{"n", n}, {"L", L}};
  } else if (kind == "dense_schauder") {
    const int n = cfg.at("n").get<int>();
    const double step = cfg.at("grid_step").get<double>();
    const DenseSchauderFrame d = dense_schauder_frame(n, step);
    frame = d.frame;
    meta.params = {{"n", n}, {"grid_step", step}};
    if (d.coarse_warning) warning = " [warning: grid too coarse for a net]";
  } else if (kind == "dyadic") {
    const int n = cfg.at("n").get<int>();
    const int m = cfg.at("m").get<int>();
    frame = dyadic_frame(onb_frame(n), m).frame;
    meta.params = {{"n", n}, {"m", m}, {"base", "onb_l2"}};
  } else if (kind == "expand") {
    const int n = cfg.at("n").get<int>();
    const double scale = cfg.at("v_scale").get<double>();
    const Frame base = onb_frame(n);
    frame =
        expand_frame(base, Eigen::MatrixXd::Identity(n, n), NormSpec::l1(),
                     scale * Eigen::MatrixXd::Identity(n, n));
    meta.params = {{"n", n}, {"v_scale", scale}, {"base", "onb_l2"}};
  } else if (kind == "net_augment") {
    const int n = cfg.at("n").get<int>();
    const double step = cfg.at("net_step").get<double>();
    frame = net_augmented_frame(onb_frame(n), grid_net(n, step), seed);
    meta.params = {{"n", n}, {"net_step", step}, {"base", "onb_l2"}};
  } else {
    throw UsageError("unknown construction kind '" + kind + "'");
  }

  write_text(out_path,
             with_hash(frame_to_json(frame, &meta), cfg).dump(2) + "\n");
  const HilbertFrameBounds fb = frame_bounds(frame);
  std::cout << kind << " frame n=" << frame.dim() << " N=" << frame.length()
            << " bounds (" << format_double(fb.a) << ", "
            << format_double(fb.b) << ")"
            << (fb.is_frame ? "" : " [not a frame]") << warning << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------ quantize

int cmd_quantize(const json& cfg, const std::string& out_path) {
  const json fj = read_json_file(cfg.at("frame").get<std::string>());
  const LoadedFrame lf = frame_from_json(fj);
  const std::string algorithm = cfg.at("algorithm").get<std::string>();
  const double delta = cfg.at("delta").get<double>();
  const std::string kind =
      lf.construction ? lf.construction->kind : std::string("generic");

  const std::string xs = cfg.at("x").get<std::string>();
  Eigen::VectorXd x;
  const int n = lf.frame.dim();
  if (xs == "zero") {
    x = Eigen::VectorXd::Zero(n);
  } else if (xs == "random") {
    Rng rng(cfg.at("seed").get<std::uint64_t>());
    x = sample_ball(NormSpec::l2(), n, rng);
  } else {
    const json xj = read_json_file(xs);
    if (!xj.is_array() || static_cast<int>(xj.size()) != n)
      throw UsageError("x file must hold an array of length n");
    x.resize(n);
    for (int i = 0; i < n; ++i)
      x[i] = xj[static_cast<std::size_t>(i)].get<double>();
  }

  QuantizationResult res;
  if (algorithm == "kashin") {
    if (kind != "kashin")
      throw UsageError("kashin quantizer needs a kashin frame file");
    const KashinFrame kf = kashin_from_json(fj);
    res = kashin_quantize(kf, x, delta);
  } else if (algorithm == "dyadic") {
    if (kind != "dyadic")
      throw UsageError("dyadic quantizer needs a dyadic frame file");
    const int nn = lf.construction->params.at("n").get<int>();
    const int m = lf.construction->params.at("m").get<int>();
    const DyadicFrame dy = dyadic_frame(onb_frame(nn), m);
    // this quantizer consumes zonotope coefficients, not a vector
    Eigen::VectorXd a;
    if (xs == "zero") {
      a = Eigen::VectorXd::Zero(dy.frame.length());
    } else if (xs == "random") {
      Rng rng(cfg.at("seed").get<std::uint64_t>());
      a = rng.uniform_vector(dy.frame.length(), -1.0, 1.0);
    } else {
      throw UsageError("dyadic quantizer takes x = zero or random");
    }
    res = dyadic_quantize(dy, a, cfg.at("with_z_norm").get<bool>());
  } else if (algorithm == "round") {
    const Eigen::VectorXd coeffs = analysis(lf.frame, x);
    res.k = round_coeffs(coeffs, delta);
    res.delta = delta;
    res.algorithm = "round";
    res.input = x;
    res.error =
        lf.frame.ambient(x - synthesis_scaled(lf.frame, res.k, delta));
    for (auto v : res.k)
      res.coeff_bound = std::max(res.coeff_bound,
                                 delta * std::abs(static_cast<double>(v)));
    if (cfg.at("with_z_norm").get<bool>()) {
      Eigen::VectorXd dk(lf.frame.length());
      for (int i = 0; i < lf.frame.length(); ++i)
        dk[i] =
            delta * static_cast<double>(res.k[static_cast<std::size_t>(i)]);
      res.z_norm_value =
          z_norm(lf.frame, dk, ZNormVariant::interval_max).value;
    }
  } else {
    throw UsageError("unknown algorithm '" + algorithm + "'");
  }

  write_text(out_path, with_hash(result_to_json(res), cfg).dump(2) + "\n");
  const double eps = cfg.at("epsilon").get<double>();
  const double C = cfg.at("C").get<double>();
  const bool checked = eps > 0.0 || C > 0.0;
  const bool ok = (eps <= 0.0 || res.error <= eps) &&
                  (C <= 0.0 || res.coeff_bound <= C);
  std::cout << "algorithm=" << res.algorithm
            << " error=" << format_double(res.error)
            << " coeff_bound=" << format_double(res.coeff_bound)
            << (checked ? (ok ? " pass" : " FAIL") : "") << "\n";
  if (eps > 0.0 && res.error > eps)
    throw ContractError("error " + format_double(res.error) +
                        " exceeds epsilon " + format_double(eps));
  if (C > 0.0 && res.coeff_bound > C)
    throw ContractError("coefficient bound " + format_double(res.coeff_bound) +
                        " exceeds C " + format_double(C));
  return kExitOk;
}

// ------------------------------------------------------------------- density

int cmd_density(const json& cfg, const std::string& out_path) {
  QuantizedSet set;
  NormSpec ambient = NormSpec::l2();
  const std::string amb = cfg.at("ambient").get<std::string>();
  if (amb == "l1")
    ambient = NormSpec::l1();
  else if (amb == "l2")
    ambient = NormSpec::l2();
  else if (amb == "linf")
    ambient = NormSpec::linf();
  else
    throw UsageError("ambient must be l1, l2 or linf");

  if (cfg.contains("set") && !cfg.at("set").get<std::string>().empty()) {
    const json sj = read_json_file(cfg.at("set").get<std::string>());
    if (!sj.contains("points") || !sj.at("points").is_array() ||
        sj.at("points").empty())
      throw UsageError("set file holds no points");
    for (const auto& row : sj.at("points")) {
      Eigen::VectorXd p(row.size());
      for (std::size_t i = 0; i < row.size(); ++i)
        p[static_cast<Eigen::Index>(i)] = row[i].get<double>();
      set.points.push_back(std::move(p));
    }
  } else if (cfg.contains("frame") &&
             !cfg.at("frame").get<std::string>().empty()) {
    const LoadedFrame lf =
        frame_from_json(read_json_file(cfg.at("frame").get<std::string>()));
    const auto zf = std::make_shared<Frame>(lf.frame);
    set = enumerate_quantized_set(lf.frame, cfg.at("delta").get<double>(),
                                  cfg.at("C").get<double>(),
                                  NormSpec::z_interval_max(zf),
                                  cfg.at("cap").get<int>());
  } else {
    throw UsageError("density needs --set or --frame");
  }

  const double eps = density_check(set, ambient, cfg.at("samples").get<int>(),
                                   cfg.at("seed").get<std::uint64_t>());
  json report{{"epsilon_hat", eps},
              {"cardinality", set.cardinality()},
              {"samples", cfg.at("samples")},
              {"ambient", amb}};
  write_text(out_path, with_hash(report, cfg).dump(2) + "\n");
  std::cout << "epsilon_hat=" << format_double(eps)
            << " cardinality=" << set.cardinality() << "\n";
  return kExitOk;
}

// --------------------------------------------------------------------- sweep

int cmd_sweep(const json& cfg, const std::string& out_prefix) {
  SweepConfig sc;
  sc.dims = cfg.at("dims").get<std::vector<int>>();
  const std::string kind = cfg.at("kind").get<std::string>();
  if (kind == "dyadic")
    sc.kind = SweepKind::dyadic;
  else if (kind == "kashin")
    sc.kind = SweepKind::kashin;
  else
    throw UsageError("sweep kind must be dyadic or kashin");
  sc.trials = cfg.at("trials").get<int>();
  sc.delta = cfg.at("delta").get<double>();
  sc.C = cfg.at("C").get<double>();
  sc.seed = cfg.at("seed").get<std::uint64_t>();
  sc.timing = cfg.at("timing").get<bool>();
  sc.bounds.cotype_q = cfg.at("cotype_q").get<double>();
  sc.bounds.K_Z = cfg.at("K_Z").get<double>();

  const std::vector<ExperimentRecord> recs = scaling_sweep(sc);
  write_text(out_prefix + ".csv", records_to_csv(recs));
  write_text(out_prefix + ".json",
             with_hash(records_to_json(recs, sc.bounds), cfg).dump(2) + "\n");

  int passed = 0;
  for (const auto& r : recs) passed += r.pass;
  std::cout << recs.size() << " records, " << passed << " pass\n";
  return passed == static_cast<int>(recs.size()) ? kExitOk : kExitContract;
}

// --------------------------------------------------------------- sigma-delta

int cmd_sigma_delta(const json& cfg, const std::string& out_prefix) {
  const double lambda = cfg.at("lambda").get<double>();
  const double window_lambda = cfg.at("window_lambda").get<double>();
  const double T = cfg.at("T").get<double>();
  const std::string family_name = cfg.at("window").get<std::string>();
  WindowFamily family;
  if (family_name == "raised_cosine")
    family = WindowFamily::raised_cosine;
  else if (family_name == "mollified_bump")
    family = WindowFamily::mollified_bump;
  else
    throw UsageError("window must be raised_cosine or mollified_bump");

  BandlimitedSignal f;
  const std::string sig = cfg.at("signal").get<std::string>();
  if (sig == "demo")
    f = BandlimitedSignal::from_components({{0.9, 0.0}});
  else if (sig == "zero")
    f = BandlimitedSignal();
  else {
    const json sj = read_json_file(sig);
    std::vector<std::pair<double, double>> comps;
    for (const auto& c : sj.at("components"))
      comps.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
    f = BandlimitedSignal::from_components(std::move(comps));
  }

  const SpectralWindow window = window_rho(window_lambda, family);
  const double step = cfg.at("grid_step").get<double>();
  const std::vector<double> grid = make_grid(-T / 2.0, T / 2.0, step);
  const SdReport rep = sd_pipeline(f, window, lambda, T, grid);

  json report{{"lambda", rep.lambda},
              {"T", rep.T},
              {"rho_prime_L1", rep.rho_prime_L1},
              {"max_error", rep.max_error},
              {"bound", rep.bound},
              {"tail", rep.tail},
              {"pass", rep.pass},
              {"window", family_name},
              {"window_lambda", window_lambda}};
  write_text(out_prefix + ".json", with_hash(report, cfg).dump(2) + "\n");

  std::string csv = "x,f_exact,f_reconstructed,error\n";
  for (std::size_t i = 0; i < rep.grid.size(); ++i) {
    csv += format_double(rep.grid[i]) + "," + format_double(rep.f_exact[i]) +
           "," + format_double(rep.f_reconstructed[i]) + "," +
           format_double(std::abs(rep.f_exact[i] - rep.f_reconstructed[i])) +
           "\n";
  }
  write_text(out_prefix + ".csv", csv);

  std::cout << "max_error=" << format_double(rep.max_error)
            << " bound=" << format_double(rep.bound)
            << " tail=" << format_double(rep.tail)
            << (rep.pass ? " pass" : " FAIL") << "\n";
  return rep.pass ? kExitOk : kExitContract;
}

// ---------------------------------------------------------------- bound-eval

int cmd_bound_eval(const json& cfg, const std::string& out_path) {
  const std::string which = cfg.at("which").get<std::string>();
  double value = 0.0;
  if (which == "eq433") {
    value = counting_lower_bound(
        cfg.at("n").get<int>(), cfg.at("eps").get<double>(),
        cfg.at("delta").get<double>(), cfg.at("C").get<double>(),
        cfg.at("K_Z").get<double>(),
        PowerLaw{cfg.at("f_alpha").get<double>()});
  } else if (which == "thm56") {
    const int n = cfg.at("n").get<int>();
    value = n * std::log(static_cast<double>(n)) /
            (2.0 * cfg.at("q").get<double>() *
             std::log(1.0 + 2.0 * cfg.at("C").get<double>() /
                                cfg.at("delta").get<double>()));
  } else if (which == "volume_ratio") {
    value =
        volume_ratio_bound(cfg.at("n").get<int>(), cfg.at("q").get<double>(),
                           cfg.at("C_q").get<double>(),
                           cfg.at("d").get<double>());
  } else if (which == "volume_ratio2") {
    value = volume_ratio_bound2(cfg.at("C_2").get<double>(),
                                cfg.at("A").get<double>());
  } else {
    throw UsageError("unknown bound '" + which + "'");
  }
  json report{{"which", which}, {"value", value}};
  if ((which == "volume_ratio" && cfg.at("d").get<double>() == 1.0) ||
      (which == "volume_ratio2" && cfg.at("A").get<double>() == 1.0))
    report["note"] = "universal constant left at 1 (unnormalized)";
  if (!out_path.empty())
    write_text(out_path, with_hash(report, cfg).dump(2) + "\n");
  std::cout << report.dump() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frame-based coefficient quantization experiments"};
  app.require_subcommand(1);
  app.fallthrough();  // --config may follow the subcommand name

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags override)");

  // build-frame
  auto* build =
      app.add_subcommand("build-frame", "construct and save a frame");
  std::string b_kind = "kashin", b_out = "frame.json";
  int b_n = 8, b_N = 24, b_m = 4, b_L = 4, b_trials = 48;
  double b_eps = 0.1, b_grid = 0.5, b_vscale = 0.0, b_net = 0.5;
  std::uint64_t b_seed = default_seed();
  auto* bo_kind = build->add_option("--kind", b_kind);
  auto* bo_n = build->add_option("--n", b_n);
  auto* bo_N = build->add_option("--N", b_N);
  auto* bo_m = build->add_option("--m", b_m);
  auto* bo_L = build->add_option("--L", b_L);
  auto* bo_eps = build->add_option("--eps", b_eps);
  auto* bo_grid = build->add_option("--grid-step", b_grid);
  auto* bo_vscale = build->add_option("--v-scale", b_vscale);
  auto* bo_net = build->add_option("--net-step", b_net);
  auto* bo_trials = build->add_option("--trial-samples", b_trials);
  auto* bo_seed = build->add_option("--seed", b_seed);
  auto* bo_out = build->add_option("--out", b_out);

  // quantize
  auto* quant =
      app.add_subcommand("quantize", "quantize a vector against a frame");
  std::string q_frame, q_alg = "round", q_x = "random", q_out = "result.json";
  double q_delta = 0.1, q_eps = 0.0, q_C = 0.0;
  bool q_zn = false;
  std::uint64_t q_seed = default_seed();
  auto* qo_frame = quant->add_option("--frame", q_frame)->required();
  auto* qo_alg = quant->add_option("--algorithm", q_alg);
  auto* qo_x = quant->add_option("--x", q_x);
  auto* qo_delta = quant->add_option("--delta", q_delta);
  auto* qo_eps = quant->add_option("--epsilon", q_eps);
  auto* qo_C = quant->add_option("--C", q_C);
  auto* qo_zn = quant->add_flag("--with-z-norm", q_zn);
  auto* qo_seed = quant->add_option("--seed", q_seed);
  auto* qo_out = quant->add_option("--out", q_out);

  // density
  auto* dens = app.add_subcommand("density", "empirical covering radius");
  std::string d_set, d_frame, d_amb = "l2", d_out = "density.json";
  int d_samples = 10000, d_cap = 4;
  double d_delta = 0.5, d_C = 2.0;
  std::uint64_t d_seed = default_seed();
  auto* do_set = dens->add_option("--set", d_set);
  auto* do_frame = dens->add_option("--frame", d_frame);
  auto* do_amb = dens->add_option("--ambient", d_amb);
  auto* do_samples = dens->add_option("--samples", d_samples);
  auto* do_cap = dens->add_option("--cap", d_cap);
  auto* do_delta = dens->add_option("--delta", d_delta);
  auto* do_C = dens->add_option("--C", d_C);
  auto* do_seed = dens->add_option("--seed", d_seed);
  auto* do_out = dens->add_option("--out", d_out);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "scaling sweep, CSV + JSON mirror");
  std::vector<int> s_dims{2, 4, 8, 16, 32};
  std::string s_kind = "dyadic", s_out = "sweep";
  int s_trials = 1000;
  double s_delta = 1.0, s_C = 3.0, s_q = 2.0, s_KZ = 1.0;
  bool s_timing = false;
  std::uint64_t s_seed = default_seed();
  auto* so_dims = sweep->add_option("--dims", s_dims)->delimiter(',');
  auto* so_kind = sweep->add_option("--kind", s_kind);
  auto* so_trials = sweep->add_option("--trials", s_trials);
  auto* so_delta = sweep->add_option("--delta", s_delta);
  auto* so_C = sweep->add_option("--C", s_C);
  auto* so_q = sweep->add_option("--cotype-q", s_q);
  auto* so_KZ = sweep->add_option("--K-Z", s_KZ);
  auto* so_timing = sweep->add_flag("--timing", s_timing);
  auto* so_seed = sweep->add_option("--seed", s_seed);
  auto* so_out = sweep->add_option("--out-prefix", s_out);

  // sigma-delta
  auto* sd = app.add_subcommand("sigma-delta", "one-bit pipeline report");
  double sd_lambda = 4.0, sd_wlambda = 0.0, sd_T = 50.0, sd_step = 0.05;
  std::string sd_signal = "demo", sd_window = "raised_cosine",
              sd_out = "sigma_delta";
  auto* sdo_lambda = sd->add_option("--lambda", sd_lambda);
  auto* sdo_wl = sd->add_option("--window-lambda", sd_wlambda);
  auto* sdo_T = sd->add_option("--T", sd_T);
  auto* sdo_step = sd->add_option("--grid-step", sd_step);
  auto* sdo_signal = sd->add_option("--signal", sd_signal);
  auto* sdo_window = sd->add_option("--window", sd_window);
  auto* sdo_out = sd->add_option("--out-prefix", sd_out);

  // bound-eval
  auto* be = app.add_subcommand("bound-eval", "evaluate a named bound");
  std::string be_which = "eq433", be_out;
  int be_n = 8;
  double be_eps = 0.5, be_delta = 1.0, be_C = 3.0, be_KZ = 1.0, be_fa = 1.0;
  double be_q = 2.0, be_Cq = 1.0, be_d = 1.0, be_C2 = 1.0, be_A = 1.0;
  auto* beo_which = be->add_option("--which", be_which);
  auto* beo_n = be->add_option("--n", be_n);
  auto* beo_eps = be->add_option("--eps", be_eps);
  auto* beo_delta = be->add_option("--delta", be_delta);
  auto* beo_C = be->add_option("--C", be_C);
  auto* beo_KZ = be->add_option("--K-Z", be_KZ);
  auto* beo_fa = be->add_option("--f-alpha", be_fa);
  auto* beo_q = be->add_option("--q", be_q);
  auto* beo_Cq = be->add_option("--C-q", be_Cq);
  auto* beo_d = be->add_option("--d", be_d);
  auto* beo_C2 = be->add_option("--C-2", be_C2);
  auto* beo_A = be->add_option("--A", be_A);
  auto* beo_out = be->add_option("--out", be_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (build->parsed()) {
      json cfg = json::object();
      if (!config_path.empty())
        cfg = load_config_file(
            config_path, {"kind", "n", "N", "m", "L", "eps", "grid_step",
                          "v_scale", "net_step", "trial_samples", "seed",
                          "out"});
      merge(cfg, "kind", bo_kind, b_kind);
      merge(cfg, "n", bo_n, b_n);
      merge(cfg, "N", bo_N, b_N);
      merge(cfg, "m", bo_m, b_m);
      merge(cfg, "L", bo_L, b_L);
      merge(cfg, "eps", bo_eps, b_eps);
      merge(cfg, "grid_step", bo_grid, b_grid);
      merge(cfg, "v_scale", bo_vscale, b_vscale);
      merge(cfg, "net_step", bo_net, b_net);
      merge(cfg, "trial_samples", bo_trials, b_trials);
      merge(cfg, "seed", bo_seed, b_seed);
      merge(cfg, "out", bo_out, b_out);
      const json resolved{{"kind", b_kind},      {"n", b_n},
                          {"N", b_N},            {"m", b_m},
                          {"L", b_L},            {"eps", b_eps},
                          {"grid_step", b_grid}, {"v_scale", b_vscale},
                          {"net_step", b_net},   {"trial_samples", b_trials},
                          {"seed", b_seed},      {"out", b_out}};
      write_manifest(b_out, "build-frame", resolved);
      return cmd_build_frame(resolved, b_out);
    }
    if (quant->parsed()) {
      json cfg = json::object();
      if (!config_path.empty())
        cfg = load_config_file(config_path,
                               {"frame", "algorithm", "x", "delta", "epsilon",
                                "C", "with_z_norm", "seed", "out"});
      merge(cfg, "frame", qo_frame, q_frame);
      merge(cfg, "algorithm", qo_alg, q_alg);
      merge(cfg, "x", qo_x, q_x);
      merge(cfg, "delta", qo_delta, q_delta);
      merge(cfg, "epsilon", qo_eps, q_eps);
      merge(cfg, "C", qo_C, q_C);
      if (qo_zn->count() == 0 && cfg.contains("with_z_norm"))
        q_zn = cfg.at("with_z_norm").get<bool>();
      merge(cfg, "seed", qo_seed, q_seed);
      merge(cfg, "out", qo_out, q_out);
      const json resolved{{"frame", q_frame},    {"algorithm", q_alg},
                          {"x", q_x},            {"delta", q_delta},
                          {"epsilon", q_eps},    {"C", q_C},
                          {"with_z_norm", q_zn}, {"seed", q_seed},
                          {"out", q_out}};
      write_manifest(q_out, "quantize", resolved);
      return cmd_quantize(resolved, q_out);
    }
    if (dens->parsed()) {
      json cfg = json::object();
      if (!config_path.empty())
        cfg = load_config_file(config_path,
                               {"set", "frame", "ambient", "samples", "cap",
                                "delta", "C", "seed", "out"});
      merge(cfg, "set", do_set, d_set);
      merge(cfg, "frame", do_frame, d_frame);
      merge(cfg, "ambient", do_amb, d_amb);
      merge(cfg, "samples", do_samples, d_samples);
      merge(cfg, "cap", do_cap, d_cap);
      merge(cfg, "delta", do_delta, d_delta);
      merge(cfg, "C", do_C, d_C);
      merge(cfg, "seed", do_seed, d_seed);
      merge(cfg, "out", do_out, d_out);
      const json resolved{{"set", d_set},     {"frame", d_frame},
                          {"ambient", d_amb}, {"samples", d_samples},
                          {"cap", d_cap},     {"delta", d_delta},
                          {"C", d_C},         {"seed", d_seed},
                          {"out", d_out}};
      write_manifest(d_out, "density", resolved);
      return cmd_density(resolved, d_out);
    }
    if (sweep->parsed()) {
      json cfg = json::object();
      if (!config_path.empty())
        cfg = load_config_file(
            config_path, {"dims", "kind", "trials", "delta", "C", "cotype_q",
                          "K_Z", "timing", "seed", "out_prefix"});
      merge(cfg, "dims", so_dims, s_dims);
      merge(cfg, "kind", so_kind, s_kind);
      merge(cfg, "trials", so_trials, s_trials);
      merge(cfg, "delta", so_delta, s_delta);
      merge(cfg, "C", so_C, s_C);
      merge(cfg, "cotype_q", so_q, s_q);
      merge(cfg, "K_Z", so_KZ, s_KZ);
      if (so_timing->count() == 0 && cfg.contains("timing"))
        s_timing = cfg.at("timing").get<bool>();
      merge(cfg, "seed", so_seed, s_seed);
      merge(cfg, "out_prefix", so_out, s_out);
      const json resolved{{"dims", s_dims},     {"kind", s_kind},
                          {"trials", s_trials}, {"delta", s_delta},
                          {"C", s_C},           {"cotype_q", s_q},
                          {"K_Z", s_KZ},        {"timing", s_timing},
                          {"seed", s_seed},     {"out_prefix", s_out}};
      write_manifest(s_out + ".csv", "sweep", resolved);
      return cmd_sweep(resolved, s_out);
    }
    if (sd->parsed()) {
      json cfg = json::object();
      if (!config_path.empty())
        cfg = load_config_file(config_path,
                               {"lambda", "window_lambda", "T", "grid_step",
                                "signal", "window", "out_prefix"});
      merge(cfg, "lambda", sdo_lambda, sd_lambda);
      merge(cfg, "window_lambda", sdo_wl, sd_wlambda);
      merge(cfg, "T", sdo_T, sd_T);
      merge(cfg, "grid_step", sdo_step, sd_step);
      merge(cfg, "signal", sdo_signal, sd_signal);
      merge(cfg, "window", sdo_window, sd_window);
      merge(cfg, "out_prefix", sdo_out, sd_out);
      if (sd_wlambda <= 0.0) sd_wlambda = sd_lambda;
      const json resolved{{"lambda", sd_lambda},
                          {"window_lambda", sd_wlambda},
                          {"T", sd_T},
                          {"grid_step", sd_step},
                          {"signal", sd_signal},
                          {"window", sd_window},
                          {"out_prefix", sd_out}};
      write_manifest(sd_out + ".json", "sigma-delta", resolved);
      return cmd_sigma_delta(resolved, sd_out);
    }
    if (be->parsed()) {
      json cfg = json::object();
      if (!config_path.empty())
        cfg = load_config_file(config_path,
                               {"which", "n", "eps", "delta", "C", "K_Z",
                                "f_alpha", "q", "C_q", "d", "C_2", "A",
                                "out"});
      merge(cfg, "which", beo_which, be_which);
      merge(cfg, "n", beo_n, be_n);
      merge(cfg, "eps", beo_eps, be_eps);
      merge(cfg, "delta", beo_delta, be_delta);
      merge(cfg, "C", beo_C, be_C);
      merge(cfg, "K_Z", beo_KZ, be_KZ);
      merge(cfg, "f_alpha", beo_fa, be_fa);
      merge(cfg, "q", beo_q, be_q);
      merge(cfg, "C_q", beo_Cq, be_Cq);
      merge(cfg, "d", beo_d, be_d);
      merge(cfg, "C_2", beo_C2, be_C2);
      merge(cfg, "A", beo_A, be_A);
      merge(cfg, "out", beo_out, be_out);
      const json resolved{{"which", be_which}, {"n", be_n},
                          {"eps", be_eps},     {"delta", be_delta},
                          {"C", be_C},         {"K_Z", be_KZ},
                          {"f_alpha", be_fa},  {"q", be_q},
                          {"C_q", be_Cq},      {"d", be_d},
                          {"C_2", be_C2},      {"A", be_A},
                          {"out", be_out}};
      if (!be_out.empty()) write_manifest(be_out, "bound-eval", resolved);
      return cmd_bound_eval(resolved, be_out);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ContractError& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return kExitContract;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kExitContract;
  }
  return kExitUsage;
}
