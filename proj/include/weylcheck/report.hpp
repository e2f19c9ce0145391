#pragma once

// Run results and their two renderings: a grouped text report for people and
// a stable JSON document for machines.
//
// JSON schema (version 1):
//   {
//     "format": "weylcheck-report", "version": 1,
//     "seed": int, "points": int, "exit_code": 0|1|2,
//     "reports": [ { "identity_id", "paper_ref", "model", "n", "points_tested",
//                    "max_residual", "scale", "tolerance", "verdict",
//                    "expected", "observed"? } ],
//     "skipped_points": [ { "model", "n", "coords": [..], "reason" } ],
//     "warnings": [ string ]
//   }
// Non-finite numbers are written as the strings "nan", "inf", "-inf".

#include <cstdint>
#include <string>
#include <vector>

#include "weylcheck/identities.hpp"

namespace weylcheck {

struct SkippedPoint {
  std::string model;
  int n = 0;
  std::vector<double> coords;
  std::string reason;

  friend bool operator==(const SkippedPoint&, const SkippedPoint&) = default;
};

struct RunResult {
  std::uint64_t seed = 0;
  int points = 0;
  std::vector<IdentityReport> reports;  // sorted by (model, n, identity_id)
  std::vector<SkippedPoint> skipped_points;
  std::vector<std::string> warnings;
  int exit_code = 0;

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

std::string to_structured(const RunResult& result);

/// Inverse of to_structured. ConfigError on malformed documents.
RunResult parse_structured(const std::string& text);

std::string to_text(const RunResult& result);

}  // namespace weylcheck
