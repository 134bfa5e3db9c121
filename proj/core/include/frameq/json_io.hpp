#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "frameq/bounds.hpp"
#include "frameq/constructions.hpp"
#include "frameq/frame.hpp"
#include "frameq/quantizers.hpp"

namespace frameq {

// {kind, params, seed} block recorded next to serialized constructions.
struct ConstructionMeta {
  std::string kind;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
};

// Frame file schema: {n, N, norm: {kind, p?}, synthesis: [[...]],
// analysis: [[...]]} with vectors as rows, full shortest-round-trip doubles,
// plus an optional "construction" block.
nlohmann::json frame_to_json(const Frame& frame,
                             const ConstructionMeta* meta = nullptr);

struct LoadedFrame {
  Frame frame;
  std::optional<ConstructionMeta> construction;
};
LoadedFrame frame_from_json(const nlohmann::json& j);

nlohmann::json norm_to_json(const NormSpec& norm);
NormSpec norm_from_json(const nlohmann::json& j);

// KashinFrame round-trips through the common frame schema: the quantization
// frame is stored and U = sqrt(N) * synthesis is recovered, with K_hat and
// trial_samples in the construction params.
nlohmann::json kashin_to_json(const KashinFrame& kf);
KashinFrame kashin_from_json(const nlohmann::json& j);

// {k, delta, error, coeff_bound, z_norm_value?, algorithm, params}
nlohmann::json result_to_json(const QuantizationResult& r);

nlohmann::json record_to_json(const ExperimentRecord& r);
nlohmann::json records_to_json(std::span<const ExperimentRecord> records,
                               const BoundParams& params);

// Shortest round-trip decimal form of a double (CSV fields).
std::string format_double(double v);

// FNV-1a 64 over a canonical dump; stable across runs for identical configs.
std::string config_hash(const nlohmann::json& config);

}  // namespace frameq
