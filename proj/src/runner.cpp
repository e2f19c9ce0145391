#include "weylcheck/runner.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "weylcheck/curvature.hpp"
#include "weylcheck/error.hpp"

namespace weylcheck {

RunResult run(const RunConfig& config) {
  validate(config);
  RunResult result;
  result.seed = config.seed;
  result.points = config.points;

  for (const ModelSpec& spec : config.models) {
    MetricModel model = [&] {
      try {
        return make_model(spec);
      } catch (const UsageError& e) {
        throw ConfigError(e.what());
      }
    }();

    const std::vector<ChartPoint> points = sample_points(model, config.points, config.seed);
    std::vector<CurvatureBundle> bundles;
    bundles.reserve(points.size());
    for (BundleOutcome& outcome : build_bundles(model, points)) {
      if (outcome.bundle) {
        bundles.push_back(std::move(*outcome.bundle));
      } else {
        result.skipped_points.push_back({model.label(), model.dim(), outcome.point.coords, outcome.error});
      }
    }

    const auto skipped = points.size() - bundles.size();
    if (skipped > 0) {
      result.warnings.push_back(model.label() + " n=" + std::to_string(model.dim()) + ": skipped " +
                                std::to_string(skipped) + " of " + std::to_string(points.size()) + " points");
    }

    auto reports = run_identity_suite(model.label(), model.dim(), bundles, config.tolerances);
    result.reports.insert(result.reports.end(), std::make_move_iterator(reports.begin()),
                          std::make_move_iterator(reports.end()));
  }

  std::stable_sort(result.reports.begin(), result.reports.end(), [](const auto& a, const auto& b) {
    return std::tie(a.model, a.n, a.identity_id) < std::tie(b.model, b.n, b.identity_id);
  });
  result.exit_code = exit_code_for(result);
  return result;
}

int exit_code_for(const RunResult& result) {
  for (const IdentityReport& r : result.reports)
    if (!r.meets_expectation()) return 1;

  std::map<std::pair<std::string, int>, int> skipped;
  for (const SkippedPoint& s : result.skipped_points) ++skipped[{s.model, s.n}];
  for (const auto& [key, count] : skipped)
    if (result.points > 0 && static_cast<double>(count) >= kMaxSkippedFraction * result.points) return 1;
  return 0;
}

}  // namespace weylcheck
