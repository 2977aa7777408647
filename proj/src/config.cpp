#include "subnorm/config.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "subnorm/csv.hpp"
#include "subnorm/errors.hpp"

namespace subnorm {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

Vector to_vector(const json& j, const char* field) {
  if (!j.is_array()) throw ArgumentError(std::string("config: ") + field + " must be an array");
  Vector v;
  for (const auto& e : j) {
    if (!e.is_number()) throw ArgumentError(std::string("config: ") + field + " must be numeric");
    v.push_back(e.get<double>());
  }
  return v;
}

int require_p(const json& j) {
  if (!j.contains("p") || !j["p"].is_number_integer())
    throw ArgumentError("config: integer field 'p' required");
  return j["p"].get<int>();
}

SetFunctionPtr build(const json& j, const fs::path& base);

SetFunctionPtr build_spectral(const json& j, const fs::path& base) {
  SpectralH h;
  const std::string hk = j.value("h", "power");
  if (hk == "power") {
    h.kind = SpectralH::kPower;
    h.param = j.value("q", 0.5);
  } else if (hk == "log_shift") {
    h.kind = SpectralH::kLogShift;
    h.param = j.value("t", 1.0);
  } else {
    throw ArgumentError("config: spectral 'h' must be 'power' or 'log_shift'");
  }
  const bool has_q = j.contains("q_csv");
  const bool has_x = j.contains("x_csv");
  if (has_q == has_x)
    throw ArgumentError("config: spectral needs exactly one of 'q_csv' or 'x_csv'");
  const std::string rel = has_q ? j["q_csv"].get<std::string>() : j["x_csv"].get<std::string>();
  const fs::path path = fs::path(rel).is_absolute() ? fs::path(rel) : base / rel;
  Matrix m = read_csv_matrix(path.string());
  return has_q ? spectral_from_q(std::move(m), h) : spectral_from_x(std::move(m), h);
}

std::vector<std::vector<int>> to_groups(const json& j, int p) {
  if (!j.is_array()) throw ArgumentError("config: 'groups' must be an array of arrays");
  std::vector<std::vector<int>> groups;
  for (const auto& g : j) {
    if (!g.is_array()) throw ArgumentError("config: each group must be an array");
    std::vector<int> idx;
    for (const auto& e : g) {
      const int one_based = e.get<int>();
      if (one_based < 1 || one_based > p)
        throw ArgumentError("config: group index " + std::to_string(one_based) +
                            " outside 1.." + std::to_string(p));
      idx.push_back(one_based - 1);
    }
    groups.push_back(std::move(idx));
  }
  return groups;
}

SetFunctionPtr build(const json& j, const fs::path& base) {
  if (!j.is_object() || !j.contains("kind"))
    throw ArgumentError("config: object with a 'kind' field required");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "cardinality") return cardinality(require_p(j));
  if (kind == "weighted_cardinality") return weighted_cardinality(to_vector(j["weights"], "weights"));
  if (kind == "concave_cardinality") return concave_cardinality(to_vector(j["h"], "h"));
  if (kind == "group_cover") {
    const int p = require_p(j);
    if (!j.contains("groups") || !j.contains("weights"))
      throw ArgumentError("config: group_cover needs 'groups' and 'weights'");
    return group_cover(p, to_groups(j["groups"], p), to_vector(j["weights"], "weights"));
  }
  if (kind == "range_plus_constant") return range_plus_constant(require_p(j));
  if (kind == "interval_count") return interval_count(require_p(j));
  if (kind == "spectral") return build_spectral(j, base);
  if (kind == "sum") {
    if (!j.contains("terms") || !j.contains("coefficients"))
      throw ArgumentError("config: sum needs 'terms' and 'coefficients'");
    std::vector<SetFunctionPtr> terms;
    for (const auto& t : j["terms"]) terms.push_back(build(t, base));
    return sum_of(std::move(terms), to_vector(j["coefficients"], "coefficients"));
  }
  throw ArgumentError("config: unknown set-function kind '" + kind + "'");
}

}  // namespace

SetFunctionPtr load_set_function(const std::string& config_path) {
  std::ifstream in(config_path);
  if (!in) throw ArgumentError("cannot open config file: " + config_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ArgumentError("config parse error in " + config_path + ": " + e.what());
  }
  return build(j, fs::path(config_path).parent_path());
}

SetFunctionPtr set_function_from_json_text(const std::string& json_text,
                                           const std::string& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("config parse error: ") + e.what());
  }
  return build(j, base_dir);
}

}  // namespace subnorm
