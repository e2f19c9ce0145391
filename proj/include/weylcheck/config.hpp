#pragma once

// Run configuration and its JSON file format:
//   {
//     "points": 50, "seed": 42, "format": "text" | "structured", "output": "path",
//     "tolerances": { "identity.id": 1e-9 },
//     "models": [ { "name": "rw_flat", "n": 5, "parameters": { "H": 0.3 },
//                   "label": "...", "scale_factor": "power",
//                   "diagonal": ["-1", "exp(2*t)", ...], "expected_class": "rw" } ]
//   }
// Every field is optional; unknown fields are errors.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "weylcheck/metric_models.hpp"

namespace weylcheck {

enum class OutputFormat { text, structured };

struct RunConfig {
  std::vector<ModelSpec> models;
  int points = 50;
  std::uint64_t seed = 42;
  std::map<std::string, double> tolerances;
  OutputFormat format = OutputFormat::text;
  std::optional<std::string> output_path;
};

/// Every built-in model at the dimensions and profiles exercised by CI.
RunConfig default_config();

/// ConfigError on malformed JSON, unknown fields, or invalid values.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// Check invariants: points >= 1, every n in 4..7 (or 0 for the model's
/// default), tolerances positive and keyed by registered identity ids.
void validate(const RunConfig& config);

OutputFormat output_format_from_string(const std::string& name);

}  // namespace weylcheck
