#pragma once

// Chart-level metrics with exact third-order jets for every component.
//
// All built-ins use a comoving chart: x^0 = t and the declared velocity is
// u^a = (1, 0, ..., 0). Twisted-family models have the block form
// ds^2 = -dt^2 + f(t, x)^2 g*_{mu nu}(x) dx^mu dx^nu.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "weylcheck/jet.hpp"

namespace weylcheck {

enum class MetricClass { minkowski, rw, grw, twisted, non_twisted };

std::string_view to_string(MetricClass c);
MetricClass metric_class_from_string(std::string_view name);

/// Classes whose metrics carry a torse-forming comoving velocity (RW and GRW
/// are special cases of twisted; Minkowski is the trivial RW).
bool is_twisted_family(MetricClass c);
/// Classes with a purely time-dependent scale factor.
bool is_warped_family(MetricClass c);

struct ChartPoint {
  std::vector<double> coords;  // x^0 = t first
  friend bool operator==(const ChartPoint&, const ChartPoint&) = default;
};

/// Row-major n x n matrix of component jets; always symmetric.
using MetricJet = std::vector<Jet3>;

struct CoordinateRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// Everything needed to build a model; mirrors one entry of a config file.
struct ModelSpec {
  std::string name;
  int n = 0;  // 0 selects the model's default dimension
  std::map<std::string, double> parameters;
  std::string label;         // report name; defaults to `name`
  std::string scale_factor;  // rw_flat only: exp | power | one_plus_t2
  std::vector<std::string> diagonal;  // diagonal only: component expressions
  std::string expected_class;         // diagonal only
};

class MetricModel {
 public:
  using Evaluator = std::function<MetricJet(const ChartPoint&)>;

  MetricModel(std::string name, int n, std::map<std::string, double> parameters, MetricClass expected_class,
              std::vector<CoordinateRange> domain, Evaluator evaluator);

  const std::string& name() const { return name_; }
  const std::string& label() const { return label_; }
  int dim() const { return n_; }
  const std::map<std::string, double>& parameters() const { return parameters_; }
  MetricClass expected_class() const { return expected_class_; }
  const std::vector<double>& u_up() const { return u_up_; }
  const std::vector<CoordinateRange>& domain() const { return domain_; }

  /// Identities this model is declared to violate (negative controls).
  const std::vector<std::string>& expected_failures() const { return expected_failures_; }
  bool expects_failure(std::string_view identity_id) const;

  MetricJet metric_jet(const ChartPoint& point) const;

  /// Component values of the metric at a point, row-major.
  std::vector<double> metric_values(const ChartPoint& point) const;

  MetricModel& set_label(std::string label);
  MetricModel& set_expected_failures(std::vector<std::string> ids);

 private:
  std::string name_;
  std::string label_;
  int n_;
  std::map<std::string, double> parameters_;
  MetricClass expected_class_;
  std::vector<double> u_up_;
  std::vector<CoordinateRange> domain_;
  std::vector<std::string> expected_failures_;
  Evaluator evaluator_;
};

struct CatalogEntry {
  std::string_view name;
  MetricClass expected_class;
  int min_dim;
  int max_dim;
  int default_dim;
  std::map<std::string, double> defaults;
  std::string_view description;
};

/// The built-in catalog, in display order.
const std::vector<CatalogEntry>& model_catalog();

/// Build a model from a spec. Throws UsageError for unknown names, unknown
/// or invalid parameters, and unsupported dimensions.
MetricModel make_model(const ModelSpec& spec);

/// Convenience for the built-ins with default scale profile.
MetricModel builtin_model(std::string_view name, int n = 0, std::map<std::string, double> parameters = {});

/// Number of negative eigenvalues of the symmetric metric value matrix, or -1
/// if an eigenvalue is numerically zero.
int negative_eigenvalues(std::span<const double> g, int n);
bool is_lorentzian(std::span<const double> g, int n);

/// Deterministic pseudo-random points in the model's domain; every point is
/// checked for Lorentzian signature. Throws UsageError "empty sample" when
/// count < 1.
std::vector<ChartPoint> sample_points(const MetricModel& model, int count, std::uint64_t seed);

}  // namespace weylcheck
