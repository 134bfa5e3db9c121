#include "frameq/json_io.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace frameq {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string config_hash(const nlohmann::json& config) {
  const std::string dump = config.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

nlohmann::json norm_to_json(const NormSpec& norm) {
  nlohmann::json j;
  switch (norm.kind()) {
    case NormSpec::Kind::lp:
      j["kind"] = "lp";
      if (std::isinf(norm.p()))
        j["p"] = "inf";
      else
        j["p"] = norm.p();
      break;
    case NormSpec::Kind::z_interval_max:
      j["kind"] = "z_interval_max";
      break;
    case NormSpec::Kind::z_sign_max:
      j["kind"] = "z_sign_max";
      break;
  }
  return j;
}

NormSpec norm_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "lp") {
    const auto& p = j.at("p");
    if (p.is_string()) {
      if (p.get<std::string>() != "inf")
        throw std::invalid_argument("norm_from_json: bad p");
      return NormSpec::linf();
    }
    return NormSpec::lp(p.get<double>());
  }
  throw std::invalid_argument(
      "norm_from_json: z-norms are frame-bound and not serializable");
}

namespace {

nlohmann::json matrix_rows(const Eigen::MatrixXd& m) {
  // one row per frame element (column of the matrix)
  nlohmann::json rows = nlohmann::json::array();
  for (int c = 0; c < m.cols(); ++c) {
    nlohmann::json row = nlohmann::json::array();
    for (int r = 0; r < m.rows(); ++r) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd rows_to_matrix(const nlohmann::json& rows, int n, int N,
                               const char* what) {
  if (static_cast<int>(rows.size()) != N)
    throw std::invalid_argument(std::string("frame_from_json: ") + what +
                                " row count mismatch");
  Eigen::MatrixXd m(n, N);
  for (int c = 0; c < N; ++c) {
    const auto& row = rows[static_cast<std::size_t>(c)];
    if (static_cast<int>(row.size()) != n)
      throw std::invalid_argument(std::string("frame_from_json: ") + what +
                                  " row length mismatch");
    for (int r = 0; r < n; ++r)
      m(r, c) = row[static_cast<std::size_t>(r)].get<double>();
  }
  return m;
}

}  // namespace

nlohmann::json frame_to_json(const Frame& frame, const ConstructionMeta* meta) {
  frame.validate();
  if (!frame.ambient.is_lp())
    throw std::invalid_argument(
        "frame_to_json: frames with z-norm ambient are not serializable");
  nlohmann::json j;
  j["n"] = frame.dim();
  j["N"] = frame.length();
  j["norm"] = norm_to_json(frame.ambient);
  j["synthesis"] = matrix_rows(frame.synthesis);
  j["analysis"] = matrix_rows(frame.analysis);
  if (meta) {
    j["construction"] = {
        {"kind", meta->kind}, {"params", meta->params}, {"seed", meta->seed}};
  }
  return j;
}

LoadedFrame frame_from_json(const nlohmann::json& j) {
  for (const auto& [key, _] : j.items()) {
    if (key != "n" && key != "N" && key != "norm" && key != "synthesis" &&
        key != "analysis" && key != "construction" && key != "config_hash")
      throw std::invalid_argument("frame_from_json: unknown key '" + key +
                                  "'");
  }
  const int n = j.at("n").get<int>();
  const int N = j.at("N").get<int>();
  LoadedFrame out;
  out.frame.synthesis = rows_to_matrix(j.at("synthesis"), n, N, "synthesis");
  out.frame.analysis = rows_to_matrix(j.at("analysis"), n, N, "analysis");
  out.frame.ambient = norm_from_json(j.at("norm"));
  out.frame.validate();
  if (j.contains("construction")) {
    ConstructionMeta meta;
    meta.kind = j["construction"].at("kind").get<std::string>();
    meta.params = j["construction"].value("params", nlohmann::json::object());
    meta.seed = j["construction"].value("seed", std::uint64_t{0});
    out.construction = std::move(meta);
  }
  return out;
}

nlohmann::json kashin_to_json(const KashinFrame& kf) {
  ConstructionMeta meta;
  meta.kind = "kashin";
  meta.params = {{"K_hat", kf.K_hat},
                 {"min_level_hat", kf.min_level_hat},
                 {"trial_samples", kf.trial_samples},
                 {"small_length_warning", kf.small_length_warning}};
  meta.seed = kf.seed;
  return frame_to_json(kf.quantization_frame(), &meta);
}

KashinFrame kashin_from_json(const nlohmann::json& j) {
  LoadedFrame lf = frame_from_json(j);
  if (!lf.construction || lf.construction->kind != "kashin")
    throw std::invalid_argument(
        "kashin_from_json: file does not hold a kashin frame");
  KashinFrame kf;
  const double s = std::sqrt(static_cast<double>(lf.frame.length()));
  kf.U = lf.frame.synthesis * s;
  kf.K_hat = lf.construction->params.at("K_hat").get<double>();
  kf.min_level_hat = lf.construction->params.value("min_level_hat", 1.0);
  kf.trial_samples =
      lf.construction->params.value("trial_samples", 0);
  kf.small_length_warning =
      lf.construction->params.value("small_length_warning", false);
  kf.seed = lf.construction->seed;
  return kf;
}

nlohmann::json result_to_json(const QuantizationResult& r) {
  nlohmann::json j;
  j["k"] = r.k;
  j["delta"] = r.delta;
  j["error"] = r.error;
  j["coeff_bound"] = r.coeff_bound;
  if (r.z_norm_value) j["z_norm_value"] = *r.z_norm_value;
  j["algorithm"] = r.algorithm;
  j["params"] = r.params;
  nlohmann::json input = nlohmann::json::array();
  for (int i = 0; i < r.input.size(); ++i) input.push_back(r.input[i]);
  j["input"] = std::move(input);
  return j;
}

nlohmann::json record_to_json(const ExperimentRecord& r) {
  return nlohmann::json{{"n", r.n},
                        {"N", r.N},
                        {"delta", r.delta},
                        {"C", r.C},
                        {"epsilon_target", r.epsilon_target},
                        {"epsilon_measured", r.epsilon_measured},
                        {"worst_coeff", r.worst_coeff},
                        {"cardinality", r.cardinality},
                        {"eq433_lnN", r.eq433_lnN},
                        {"thm56_N_lower", r.thm56_N_lower},
                        {"pass", r.pass},
                        {"seed", r.seed},
                        {"wall_ms", r.wall_ms}};
}

nlohmann::json records_to_json(std::span<const ExperimentRecord> records,
                               const BoundParams& params) {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : records) recs.push_back(record_to_json(r));
  return nlohmann::json{
      {"bound_params",
       {{"cotype_q", params.cotype_q},
        {"length_ratio_q", params.length_ratio_q},
        {"C_q", params.C_q},
        {"K_Z", params.K_Z},
        {"d", params.d},
        {"A", params.A},
        {"f_alpha", params.f.alpha},
        {"g_alpha", params.g.alpha}}},
      {"records", std::move(recs)}};
}

}  // namespace frameq
