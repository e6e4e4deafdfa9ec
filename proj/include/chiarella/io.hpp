#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chiarella/analytic_density.hpp"
#include "chiarella/empirics.hpp"
#include "chiarella/fast_trend.hpp"
#include "chiarella/histogram.hpp"
#include "chiarella/model_core.hpp"
#include "chiarella/sde_engine.hpp"
#include "chiarella/strong_coupling.hpp"
#include "json.hpp"

namespace chiarella::io {

using nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

/// Reads a JSON document; throws ConfigError on I/O or parse failure.
json read_json_file(const std::filesystem::path& path);

/// Reads kappa, beta, gamma, alpha, sigma_n, sigma_v (required) and g
/// (optional) from a flat object. Missing or non-numeric keys throw
/// ConfigError naming the key; invalid values throw InvalidParameter.
ModelParams params_from_json(const json& j);
json to_json(const ModelParams& p);

/// Model keys plus simulation keys (total_time required; dt, burn_in_fraction,
/// subsample_stride, seed, n_paths, antithetic, n_bins, delta_range, m_range,
/// init optional; omitted values take the engine defaults).
SimSpec sim_spec_from_json(const json& j);
json to_json(const SimSpec& s);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
/// FNV-1a of the compact dump of `config`, as 16 hex digits.
std::string config_hash(const json& config);

struct OutputMeta {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string generator = kGeneratorName;
};

/// Shortest round-trip decimal form.
std::string format_double(double x);

/// CSV with '#' metadata lines, a header row and one row per index.
void write_csv(const std::filesystem::path& path, const OutputMeta& meta, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);
/// Same layout with pre-formatted cells (for mixed text/number tables).
void write_rows(const std::filesystem::path& path, const OutputMeta& meta, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows);
void write_histogram_csv(const std::filesystem::path& path, const OutputMeta& meta, const Histogram1D& h);
void write_json(const std::filesystem::path& path, const OutputMeta& meta, json body);

json to_json(const MomentReport& m);
json to_json(const ModalityVerdict& v);
json to_json(const fast_trend::FastTrendMoments& m);
json to_json(const strong_coupling::StrongCouplingReport& r);

}  // namespace chiarella::io
