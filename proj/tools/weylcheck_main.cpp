#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "weylcheck/config.hpp"
#include "weylcheck/curvature.hpp"
#include "weylcheck/error.hpp"
#include "weylcheck/runner.hpp"

namespace {

using namespace weylcheck;

constexpr int kUsageExit = 2;

std::pair<std::string, std::string> split_assignment(const std::string& text, const char* what) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(std::string("expected ") + what + ", got '" + text + "'");
  return {text.substr(0, eq), text.substr(eq + 1)};
}

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ConfigError("invalid number '" + text + "' for " + what);
  return value;
}

void emit(const std::string& text, const std::optional<std::string>& path) {
  if (!path) {
    std::cout << text;
    return;
  }
  std::ofstream out(*path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + *path + "'");
  out << text;
}

struct VerifyOptions {
  std::string config_path;
  std::optional<int> points;
  std::optional<std::uint64_t> seed;
  std::string format;
  std::string output;
  std::vector<std::string> models;
  std::vector<std::string> tolerances;
};

int verify(const VerifyOptions& o) {
  RunConfig config = o.config_path.empty() ? default_config() : load_config(o.config_path);
  if (o.points) config.points = *o.points;
  if (o.seed) config.seed = *o.seed;
  if (!o.format.empty()) config.format = output_format_from_string(o.format);
  if (!o.output.empty()) config.output_path = o.output;
  for (const auto& t : o.tolerances) {
    const auto [id, value] = split_assignment(t, "--tolerance ID=VALUE");
    config.tolerances[id] = parse_double(value, id);
  }
  if (!o.models.empty()) {
    std::vector<ModelSpec> kept;
    for (const ModelSpec& m : config.models)
      if (std::ranges::find(o.models, m.name) != o.models.end() ||
          (!m.label.empty() && std::ranges::find(o.models, m.label) != o.models.end()))
        kept.push_back(m);
    for (const auto& name : o.models)
      if (std::ranges::none_of(kept, [&](const ModelSpec& m) { return m.name == name || m.label == name; }))
        kept.push_back(ModelSpec{name});
    config.models = std::move(kept);
  }
  validate(config);

  const RunResult result = run(config);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  emit(config.format == OutputFormat::structured ? to_structured(result) : to_text(result), config.output_path);
  return result.exit_code;
}

using FieldGetter = std::function<TensorValue(const CurvatureBundle&)>;

const std::map<std::string, FieldGetter>& bundle_fields() {
  static const std::map<std::string, FieldGetter> fields{
      {"g", [](const CurvatureBundle& b) { return b.g; }},
      {"g_inv", [](const CurvatureBundle& b) { return b.g_inv; }},
      {"christoffel", [](const CurvatureBundle& b) { return b.connection.gamma; }},
      {"riemann", [](const CurvatureBundle& b) { return b.riemann.value; }},
      {"nabla_riemann", [](const CurvatureBundle& b) { return b.nabla_riemann; }},
      {"ricci", [](const CurvatureBundle& b) { return b.ricci.value; }},
      {"scalar", [](const CurvatureBundle& b) { return TensorValue::scalar(b.scalar_curvature); }},
      {"weyl", [](const CurvatureBundle& b) { return b.weyl; }},
      {"nabla_weyl", [](const CurvatureBundle& b) { return b.nabla_weyl; }},
      {"div_weyl", [](const CurvatureBundle& b) { return b.div_weyl; }},
      {"u_up", [](const CurvatureBundle& b) { return b.u_up; }},
      {"u_down", [](const CurvatureBundle& b) { return b.u_down; }},
      {"nabla_u", [](const CurvatureBundle& b) { return b.nabla_u; }},
      {"phi", [](const CurvatureBundle& b) { return TensorValue::scalar(b.phi); }},
      {"dphi", [](const CurvatureBundle& b) { return b.dphi; }},
      {"electric", [](const CurvatureBundle& b) { return b.electric; }},
      {"nabla_electric", [](const CurvatureBundle& b) { return b.nabla_electric; }},
      {"gamma_tensor", [](const CurvatureBundle& b) { return b.gamma_tensor; }},
      {"nabla_gamma", [](const CurvatureBundle& b) { return b.nabla_gamma; }},
      {"xi", [](const CurvatureBundle& b) { return TensorValue::scalar(b.xi); }},
      {"v_up", [](const CurvatureBundle& b) { return b.v_up; }},
      {"v_down", [](const CurvatureBundle& b) { return b.v_down; }},
  };
  return fields;
}

struct DumpOptions {
  std::string model;
  int n = 0;
  std::vector<std::string> params;
  std::string scale_factor;
  std::string point;
  std::string field = "weyl";
  std::string format = "text";
};

std::string full_precision(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int tensor_dump(const DumpOptions& o) {
  ModelSpec spec;
  spec.name = o.model;
  spec.n = o.n;
  for (const auto& p : o.params) {
    const auto [key, value] = split_assignment(p, "--param KEY=VALUE");
    spec.parameters[key] = parse_double(value, key);
  }
  spec.scale_factor = o.scale_factor;
  const MetricModel model = [&] {
    try {
      return make_model(spec);
    } catch (const UsageError& e) {
      throw ConfigError(e.what());
    }
  }();

  ChartPoint point;
  std::stringstream csv(o.point);
  for (std::string item; std::getline(csv, item, ',');) point.coords.push_back(parse_double(item, "--point"));
  if (static_cast<int>(point.coords.size()) != model.dim())
    throw ConfigError("--point needs " + std::to_string(model.dim()) + " coordinates, got " +
                      std::to_string(point.coords.size()));

  const auto& fields = bundle_fields();
  const auto getter = fields.find(o.field);
  if (getter == fields.end()) {
    std::string known;
    for (const auto& [name, f] : fields) known += (known.empty() ? "" : ", ") + name;
    throw ConfigError("unknown field '" + o.field + "'; known fields: " + known);
  }
  const OutputFormat format = output_format_from_string(o.format);

  const CurvatureBundle bundle = build_bundle(model, point);
  const TensorValue t = getter->second(bundle);

  if (format == OutputFormat::structured) {
    nlohmann::json variance = nlohmann::json::array();
    for (Variance v : t.variance()) variance.push_back(v == Variance::up ? "up" : "down");
    nlohmann::json doc{{"model", model.label()},        {"n", model.dim()},     {"point", point.coords},
                       {"field", o.field},              {"variance", variance}, {"components", t.data()}};
    std::cout << doc.dump(2) << "\n";
    return 0;
  }

  std::cout << "# " << model.label() << " n=" << model.dim() << " field=" << o.field << " variance=";
  for (Variance v : t.variance()) std::cout << (v == Variance::up ? 'u' : 'd');
  std::cout << "\n";
  if (t.rank() == 0) {
    std::cout << full_precision(t.value()) << "\n";
    return 0;
  }
  for (std::size_t flat = 0; flat < t.size(); ++flat) {
    const MultiIndex idx = t.unravel(flat);
    std::cout << o.field << "[";
    for (int s = 0; s < t.rank(); ++s) std::cout << (s ? "," : "") << idx[static_cast<std::size_t>(s)];
    std::cout << "] = " << full_precision(t.data()[flat]) << "\n";
  }
  return 0;
}

int models_list() {
  for (const CatalogEntry& e : model_catalog()) {
    std::cout << e.name << "  [" << to_string(e.expected_class) << "]  n=" << e.min_dim << ".." << e.max_dim
              << " (default " << e.default_dim << ")";
    if (!e.defaults.empty()) {
      std::cout << "  params:";
      for (const auto& [k, v] : e.defaults) std::cout << " " << k << "=" << v;
    }
    std::cout << "\n    " << e.description << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of Weyl-tensor identities on twisted spacetimes"};
  app.require_subcommand(1);

  VerifyOptions vo;
  auto* verify_cmd = app.add_subcommand("verify", "Run the identity suite over sampled points");
  verify_cmd->add_option("--config", vo.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  verify_cmd->add_option("--points", vo.points, "Points per model");
  verify_cmd->add_option("--seed", vo.seed, "Sampling seed");
  verify_cmd->add_option("--format", vo.format, "text | structured");
  verify_cmd->add_option("--output", vo.output, "Write the report here instead of stdout");
  verify_cmd->add_option("--model", vo.models, "Restrict to this model (repeatable)");
  verify_cmd->add_option("--tolerance", vo.tolerances, "Override a tolerance: ID=VALUE (repeatable)");

  DumpOptions dopt;
  auto* dump_cmd = app.add_subcommand("tensor-dump", "Print one bundle field at one chart point");
  dump_cmd->add_option("--model", dopt.model, "Model name")->required();
  dump_cmd->add_option("--n", dopt.n, "Dimension (default: the model's)");
  dump_cmd->add_option("--param", dopt.params, "Model parameter KEY=VALUE (repeatable)");
  dump_cmd->add_option("--scale-factor", dopt.scale_factor, "rw_flat profile: exp | power | one_plus_t2");
  dump_cmd->add_option("--point", dopt.point, "Comma-separated coordinates, t first")->required();
  dump_cmd->add_option("--field", dopt.field, "Bundle field (default weyl)");
  dump_cmd->add_option("--format", dopt.format, "text | structured");

  auto* list_cmd = app.add_subcommand("models-list", "List built-in models with their expected class");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kUsageExit;
  }

  try {
    if (verify_cmd->parsed()) return verify(vo);
    if (dump_cmd->parsed()) return tensor_dump(dopt);
    if (list_cmd->parsed()) return models_list();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageExit;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageExit;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << app.help();
  return kUsageExit;
}
