#pragma once

// Every identity of the twisted-spacetime Weyl theory evaluated as a residual
// on curvature bundles.
//
// A residual is the max-abs difference between the two sides over all free
// indices; `scale` is the magnitude of the dominant term. A report passes iff
//   max_residual <= tolerance * max(1, scale).
// Per-point reports merge associatively: the worst normalized point wins and
// point counts add.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "weylcheck/curvature.hpp"

namespace weylcheck {

enum class Verdict { pass, fail, not_applicable };

std::string_view to_string(Verdict v);
Verdict verdict_from_string(std::string_view text);

struct IdentityInfo {
  std::string_view id;
  std::string_view group;
  std::string_view reference;  // the identity in index notation
  double tolerance;
};

/// Registry of identities in report order.
std::span<const IdentityInfo> identity_registry();
const IdentityInfo* find_identity(std::string_view id);
/// Report groups in display order.
std::span<const std::string_view> identity_groups();

struct IdentityReport {
  std::string identity_id;
  std::string paper_ref;
  std::string model;
  int n = 0;
  int points_tested = 0;
  double max_residual = 0.0;
  double scale = 0.0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::not_applicable;
  Verdict expected = Verdict::pass;
  /// For conditional checks whose hypothesis failed: the largest measured
  /// hypothesis quantity.
  std::optional<double> observed;

  double normalized() const;
  /// Verdict matches the declared expectation (not-applicable counts as met
  /// when a pass is expected).
  bool meets_expectation() const;

  friend bool operator==(const IdentityReport&, const IdentityReport&) = default;
};

/// Recompute the verdict with a new tolerance.
void apply_tolerance(IdentityReport& report, double tolerance);

/// Combine two reports of the same identity and model.
IdentityReport merge(const IdentityReport& a, const IdentityReport& b);

// Per-point evaluations. Each returns one report per registry id it covers;
// inapplicable checks come back not-applicable with points_tested == 0.
std::vector<IdentityReport> torse_forming_residual(const CurvatureBundle& b);
std::vector<IdentityReport> weyl_compatibility_residual(const CurvatureBundle& b);
std::vector<IdentityReport> contraction_identity_residual(const CurvatureBundle& b);
std::vector<IdentityReport> ricci_decomposition_residual(const CurvatureBundle& b);
std::vector<IdentityReport> n4_identities(const CurvatureBundle& b);
std::vector<IdentityReport> gamma_tensor_suite(const CurvatureBundle& b);
std::vector<IdentityReport> adati_identity_residual(const CurvatureBundle& b);
std::vector<IdentityReport> divergence_formula_residual(const CurvatureBundle& b);
std::vector<IdentityReport> appendix_identity_residual(const CurvatureBundle& b);
std::vector<IdentityReport> electric_vanishing_checks(const CurvatureBundle& b);

/// All identities at one point, registry order.
std::vector<IdentityReport> evaluate_point(const CurvatureBundle& b);

/// Conditional checks on a vanishing electric part or a divergence-free Weyl
/// tensor, merged over a model's bundles.
std::vector<IdentityReport> electric_vanishing_suite(std::span<const CurvatureBundle> bundles,
                                                     const std::string& model);

/// Every identity merged over a model's bundles, registry order.
/// `tolerances` overrides registry defaults per identity id.
std::vector<IdentityReport> run_identity_suite(const std::string& model, int n,
                                               std::span<const CurvatureBundle> bundles,
                                               const std::map<std::string, double>& tolerances = {});

}  // namespace weylcheck
