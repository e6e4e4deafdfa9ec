#include "chiarella/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "chiarella/error.hpp"

namespace chiarella::io {

namespace {

double required_number(const json& j, const char* key) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "config must be a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::ConfigError, std::string("missing key '") + key + "'");
  if (!it->is_number()) throw Error(ErrorCode::ConfigError, std::string("key '") + key + "' must be a number");
  return it->get<double>();
}

template <typename T>
T optional_value(const json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::ConfigError, std::string("key '") + key + "' has the wrong type");
  }
}

std::pair<double, double> range_of(const json& j, const char* key, std::pair<double, double> fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number()) {
    throw Error(ErrorCode::ConfigError, std::string("key '") + key + "' must be [lo, hi]");
  }
  return {(*it)[0].get<double>(), (*it)[1].get<double>()};
}

void open_for_write(std::ofstream& out, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out.open(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + path.string());
}

}  // namespace

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, "malformed JSON in " + path.string() + ": " + e.what());
  }
}

ModelParams params_from_json(const json& j) {
  const double kappa = required_number(j, "kappa");
  const double beta = required_number(j, "beta");
  const double gamma = required_number(j, "gamma");
  const double alpha = required_number(j, "alpha");
  const double sigma_n = required_number(j, "sigma_n");
  const double sigma_v = required_number(j, "sigma_v");
  const double g = j.contains("g") ? required_number(j, "g") : 0.0;
  return ModelParams(kappa, beta, gamma, alpha, sigma_n, sigma_v, g);
}

json to_json(const ModelParams& p) {
  json j = json::object();
  for (const auto& name : ModelParams::field_names()) j[name] = p.get(name);
  return j;
}

SimSpec sim_spec_from_json(const json& j) {
  const ModelParams p = params_from_json(j);
  SimSpec s = SimSpec::with_defaults(p, required_number(j, "total_time"), optional_value<std::uint64_t>(j, "seed", 0));
  if (j.contains("dt")) {
    s.dt = required_number(j, "dt");
    s.subsample_stride = s.dt > 0.0 ? default_stride(p, s.dt) : 1;
  }
  s.burn_in_fraction = optional_value<double>(j, "burn_in_fraction", s.burn_in_fraction);
  s.subsample_stride = optional_value<std::uint64_t>(j, "subsample_stride", s.subsample_stride);
  s.n_paths = optional_value<std::uint32_t>(j, "n_paths", s.n_paths);
  s.antithetic = optional_value<bool>(j, "antithetic", s.antithetic);
  s.n_bins = optional_value<std::size_t>(j, "n_bins", s.n_bins);
  s.delta_range = range_of(j, "delta_range", s.delta_range);
  s.m_range = range_of(j, "m_range", s.m_range);
  if (const auto it = j.find("init"); it != j.end()) {
    if (!it->is_object()) throw Error(ErrorCode::ConfigError, "key 'init' must be an object");
    if (it->contains("p") || it->contains("v")) {
      s.init = FullState{optional_value<double>(*it, "p", 0.0), optional_value<double>(*it, "m", 0.0),
                         optional_value<double>(*it, "v", 0.0)};
    } else {
      s.init = ReducedState{optional_value<double>(*it, "delta", 0.0), optional_value<double>(*it, "m", 0.0)};
    }
  }
  s.validate();
  return s;
}

json to_json(const SimSpec& s) {
  json j = to_json(s.params);
  j["dt"] = s.dt;
  j["total_time"] = s.total_time;
  j["burn_in_fraction"] = s.burn_in_fraction;
  j["subsample_stride"] = s.subsample_stride;
  j["seed"] = s.seed;
  j["n_paths"] = s.n_paths;
  j["antithetic"] = s.antithetic;
  j["n_bins"] = s.n_bins;
  j["delta_range"] = {s.delta_range.first, s.delta_range.second};
  j["m_range"] = {s.m_range.first, s.m_range.second};
  if (const auto* f = std::get_if<FullState>(&s.init)) {
    j["init"] = {{"p", f->p}, {"m", f->m}, {"v", f->v}};
  } else {
    const auto& r = std::get<ReducedState>(s.init);
    j["init"] = {{"delta", r.delta}, {"m", r.m}};
  }
  return j;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(config.dump())));
  return buf;
}

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_rows(const std::filesystem::path& path, const OutputMeta& meta, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows) {
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw Error(ErrorCode::InvalidParameter, "row width differs from header");
  }
  std::ofstream out;
  open_for_write(out, path);
  out << "# tool_version: " << kToolVersion << '\n'
      << "# config_hash: " << meta.config_hash << '\n'
      << "# seed: " << meta.seed << '\n'
      << "# generator: " << meta.generator << '\n';
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << r[c];
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const OutputMeta& meta, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) throw Error(ErrorCode::InvalidParameter, "header and column counts differ");
  const std::size_t n_rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns) {
    if (c.size() != n_rows) throw Error(ErrorCode::InvalidParameter, "columns have different lengths");
  }
  std::vector<std::vector<std::string>> rows(n_rows, std::vector<std::string>(columns.size()));
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) rows[r][c] = format_double(columns[c][r]);
  }
  write_rows(path, meta, header, rows);
}

void write_histogram_csv(const std::filesystem::path& path, const OutputMeta& meta, const Histogram1D& h) {
  std::vector<double> centre(h.n_bins()), count(h.n_bins()), density(h.n_bins());
  for (std::size_t i = 0; i < h.n_bins(); ++i) {
    centre[i] = h.bin_center(i);
    count[i] = static_cast<double>(h.counts()[i]);
    density[i] = h.density(i);
  }
  write_csv(path, meta, {"bin_center", "count", "density"}, {centre, count, density});
}

void write_json(const std::filesystem::path& path, const OutputMeta& meta, json body) {
  body["meta"] = {{"tool_version", kToolVersion},
                  {"config_hash", meta.config_hash},
                  {"seed", meta.seed},
                  {"generator", meta.generator}};
  std::ofstream out;
  open_for_write(out, path);
  out << body.dump(2) << '\n';
}

json to_json(const MomentReport& m) {
  return {{"n", m.n},
          {"n_eff_mean", m.n_eff_mean},
          {"n_eff_var", m.n_eff_var},
          {"mean", m.mean},
          {"var", m.var},
          {"skew", m.skew},
          {"excess_kurtosis", m.excess_kurtosis},
          {"se_mean", m.se_mean},
          {"se_var", m.se_var},
          {"se_skew", m.se_skew},
          {"se_kurtosis", m.se_kurtosis}};
}

json to_json(const ModalityVerdict& v) {
  json j = {{"modality", to_string(v.modality)}, {"modes", v.modes}, {"source", to_string(v.source)}};
  if (v.qualifier) j["qualifier"] = *v.qualifier;
  if (v.curvature_at_zero) j["curvature_at_zero"] = *v.curvature_at_zero;
  return j;
}

json to_json(const fast_trend::FastTrendMoments& m) {
  return {{"kappa_eff", m.kappa_eff}, {"beta_eff", m.beta_eff},           {"a_sq", m.a_sq},
          {"ab", m.ab},               {"x_sq_exact", m.x_sq_exact}, {"x_sq_truncated", m.x_sq_truncated}};
}

json to_json(const strong_coupling::StrongCouplingReport& r) {
  json j = {{"z_value", r.z_value},
            {"theta", r.theta},
            {"sigma_x_sq", r.sigma_x_sq},
            {"kappa_eff", r.kappa_eff},
            {"trend_curvature_sign", r.trend_curvature_sign},
            {"mispricing_modality", to_json(r.mispricing_modality)}};
  j["crossing_time"] = r.crossing_time ? json(*r.crossing_time) : json(nullptr);
  j["validity_score"] = r.validity_score ? json(*r.validity_score) : json(nullptr);
  return j;
}

}  // namespace chiarella::io
