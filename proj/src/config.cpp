#include "weylcheck/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "weylcheck/error.hpp"
#include "weylcheck/identities.hpp"

namespace weylcheck {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.contains(key)) throw ConfigError("unknown field '" + key + "' in " + where);
  }
}

ModelSpec model_from_json(const json& j, std::size_t index) {
  const std::string where = "models[" + std::to_string(index) + "]";
  reject_unknown(j, {"name", "n", "parameters", "label", "scale_factor", "diagonal", "expected_class"}, where);
  ModelSpec spec;
  if (!j.contains("name")) throw ConfigError(where + " needs a name");
  spec.name = j.at("name").get<std::string>();
  if (j.contains("n")) spec.n = j.at("n").get<int>();
  if (j.contains("parameters")) spec.parameters = j.at("parameters").get<std::map<std::string, double>>();
  if (j.contains("label")) spec.label = j.at("label").get<std::string>();
  if (j.contains("scale_factor")) spec.scale_factor = j.at("scale_factor").get<std::string>();
  if (j.contains("diagonal")) spec.diagonal = j.at("diagonal").get<std::vector<std::string>>();
  if (j.contains("expected_class")) spec.expected_class = j.at("expected_class").get<std::string>();
  return spec;
}

}  // namespace

OutputFormat output_format_from_string(const std::string& name) {
  if (name == "text") return OutputFormat::text;
  if (name == "structured" || name == "json") return OutputFormat::structured;
  throw ConfigError("unknown output format '" + name + "' (expected text or structured)");
}

RunConfig default_config() {
  RunConfig c;
  const auto spec = [](std::string name, int n, std::string scale_factor = {},
                       std::map<std::string, double> parameters = {}) {
    ModelSpec m;
    m.name = std::move(name);
    m.n = n;
    m.scale_factor = std::move(scale_factor);
    m.parameters = std::move(parameters);
    return m;
  };
  c.models = {
      spec("minkowski", 4),
      spec("minkowski", 5),
      spec("rw_flat", 4, "exp"),
      spec("rw_flat", 5, "power", {{"k", 2.0}}),
      spec("rw_flat", 6, "one_plus_t2"),
      spec("grw_product_spheres", 5),
      spec("twisted_generic", 4),
      spec("twisted_generic", 5),
      spec("twisted_generic", 6),
      spec("twisted_n4", 4),
      spec("non_twisted_perturbed", 4),
      spec("non_twisted_perturbed", 5),
  };
  return c;
}

void validate(const RunConfig& config) {
  if (config.points < 1) throw ConfigError("points must be at least 1");
  if (config.models.empty()) throw ConfigError("no models selected");
  for (const ModelSpec& m : config.models)
    if (m.n != 0 && (m.n < kMinDim || m.n > kMaxDim))
      throw ConfigError("model '" + m.name + "': n must be in 4..7, got " + std::to_string(m.n));
  for (const auto& [id, tol] : config.tolerances) {
    if (!find_identity(id)) throw ConfigError("unknown identity id '" + id + "' in tolerance overrides");
    if (!(tol > 0.0) || !std::isfinite(tol)) throw ConfigError("tolerance for '" + id + "' must be positive");
  }
}

RunConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    reject_unknown(doc, {"models", "points", "seed", "tolerances", "format", "output"}, "config");
    RunConfig c;
    if (doc.contains("models")) {
      const json& models = doc.at("models");
      if (!models.is_array()) throw ConfigError("models must be an array");
      for (std::size_t i = 0; i < models.size(); ++i) c.models.push_back(model_from_json(models[i], i));
    } else {
      c.models = default_config().models;
    }
    if (doc.contains("points")) c.points = doc.at("points").get<int>();
    if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("tolerances")) c.tolerances = doc.at("tolerances").get<std::map<std::string, double>>();
    if (doc.contains("format")) c.format = output_format_from_string(doc.at("format").get<std::string>());
    if (doc.contains("output")) c.output_path = doc.at("output").get<std::string>();
    validate(c);
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace weylcheck
