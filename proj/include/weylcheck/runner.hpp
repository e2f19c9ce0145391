#pragma once

#include "weylcheck/config.hpp"
#include "weylcheck/report.hpp"

namespace weylcheck {

/// Points of one model may be skipped for numerical trouble up to this
/// fraction before the run fails.
inline constexpr double kMaxSkippedFraction = 0.05;

/// Sample, build bundles and evaluate every identity for every model.
/// ConfigError for invalid configs or models; numerical failures at single
/// points are recorded as skipped points.
RunResult run(const RunConfig& config);

/// 0 when every report meets its expectation and no model lost too many
/// points, 1 otherwise. Depends only on the result's contents.
int exit_code_for(const RunResult& result);

}  // namespace weylcheck
