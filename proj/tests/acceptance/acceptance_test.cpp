// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../support/random_composite.hpp"
#include "weylcheck/identities.hpp"
#include "weylcheck/report.hpp"

using namespace weylcheck;

namespace {

constexpr int kPoints = 50;
constexpr std::uint64_t kSeed = 42;

struct Case {
  std::string name;
  int n;
  std::string scale_factor;
};

MetricModel model_for(const Case& c) {
  ModelSpec spec;
  spec.name = c.name;
  spec.n = c.n;
  spec.scale_factor = c.scale_factor;
  return make_model(spec);
}

std::string label(const Case& c) {
  return c.name + (c.scale_factor.empty() ? "" : "/" + c.scale_factor) + " n=" + std::to_string(c.n);
}

const std::vector<CurvatureBundle>& bundles(const Case& c) {
  static std::map<std::string, std::vector<CurvatureBundle>> cache;
  auto& slot = cache[label(c)];
  if (slot.empty()) {
    const MetricModel m = model_for(c);
    for (auto& o : build_bundles(m, sample_points(m, kPoints, kSeed))) {
      if (!o.bundle) throw std::runtime_error(label(c) + ": point skipped: " + o.error);
      slot.push_back(std::move(*o.bundle));
    }
  }
  return slot;
}

const std::vector<IdentityReport>& reports(const Case& c) {
  static std::map<std::string, std::vector<IdentityReport>> cache;
  auto& slot = cache[label(c)];
  if (slot.empty()) slot = run_identity_suite(label(c), c.n, bundles(c));
  return slot;
}

const IdentityReport& report(const Case& c, std::string_view id) {
  for (const auto& r : reports(c))
    if (r.identity_id == id) return r;
  throw std::runtime_error("no report for " + std::string(id));
}

const std::vector<Case> kTwistedClass{
    {"minkowski", 4, ""},       {"minkowski", 5, ""},         {"minkowski", 6, ""},
    {"rw_flat", 4, "exp"},      {"rw_flat", 5, "power"},      {"rw_flat", 6, "one_plus_t2"},
    {"grw_product_spheres", 5, ""}, {"twisted_generic", 4, ""}, {"twisted_generic", 5, ""},
    {"twisted_generic", 6, ""}, {"twisted_n4", 4, ""},
};
const std::vector<Case> kControls{{"non_twisted_perturbed", 4, ""}, {"non_twisted_perturbed", 5, ""},
                                  {"non_twisted_perturbed", 6, ""}};

// Collects failures for one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    ok_ = ok_ && ok;
  }
  void below(double value, double bound, const std::string& what) {
    std::ostringstream s;
    s << what << ": " << value << " !< " << bound;
    expect(value < bound, s.str());
  }
  void above(double value, double bound, const std::string& what) {
    std::ostringstream s;
    s << what << ": " << value << " !> " << bound;
    expect(value > bound, s.str());
  }
  bool ok() const { return ok_; }
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  bool ok_ = true;
  std::vector<std::string> failures_;
};

void identity_below(Check& check, const Case& c, std::string_view id, double bound) {
  const IdentityReport& r = report(c, id);
  check.expect(r.verdict == Verdict::pass, label(c) + " " + std::string(id) + " verdict " + std::string(to_string(r.verdict)));
  check.below(r.normalized(), bound, label(c) + " " + std::string(id));
}

bool criterion_torse_forming(Check& check) {
  for (const Case& c : {Case{"rw_flat", 4, "exp"}, Case{"grw_product_spheres", 5, ""}, Case{"twisted_generic", 5, ""},
                        Case{"twisted_n4", 4, ""}})
    for (const auto& b : bundles(c)) check.below(torse_forming_residual(b).front().normalized(), 1e-9, label(c));
  for (const Case& c : kControls) {
    int above = 0;
    for (const auto& b : bundles(c))
      if (torse_forming_residual(b).front().normalized() > 1e-3) ++above;
    check.expect(above >= 9 * kPoints / 10, label(c) + ": only " + std::to_string(above) + " points above 1e-3");
  }
  return check.ok();
}

bool criterion_unconditional_twisted(Check& check) {
  for (const Case& c : kTwistedClass) {
    if (c.n > 6) continue;
    for (const char* id : {"twisted.weyl_compatible", "twisted.weyl_contraction", "twisted.ricci_decomposition"})
      identity_below(check, c, id, 1e-9);
  }
  return check.ok();
}

bool criterion_four_dimensions(Check& check) {
  std::vector<Case> four;
  for (const Case& c : kTwistedClass)
    if (c.n == 4) four.push_back(c);
  four.push_back(kControls.front());
  for (const Case& c : four) {
    identity_below(check, c, "n4.lovelock", 1e-10);
    identity_below(check, c, "n4.quarter_delta", 1e-10);
    identity_below(check, c, "n4.reconstruction", 1e-9);
  }
  const Case twisted{"twisted_n4", 4, ""};
  identity_below(check, twisted, "n4.electric_representation", 1e-9);
  for (const auto& b : bundles(twisted)) {
    const double c2 = norm_squared(b.weyl, b.g, b.g_inv);
    const double e2 = norm_squared(b.electric, b.g, b.g_inv);
    check.below(std::abs(c2 - 8 * e2) / std::max(1.0, c2), 1e-9, "twisted_n4 |C^2 - 8E^2|");
  }
  return check.ok();
}

bool criterion_gamma(Check& check) {
  for (const Case& c : {Case{"twisted_generic", 5, ""}, Case{"twisted_generic", 6, ""}}) {
    for (const char* id : {"gamma.curvature_symmetries", "gamma.traceless", "gamma.u_annihilates"})
      identity_below(check, c, id, 1e-10);
    identity_below(check, c, "gamma.recurrence", 1e-8);
    double g = 0.0;
    for (const auto& b : bundles(c)) g = std::max(g, b.gamma_tensor.max_abs());
    check.above(g, 1e-3, label(c) + " max|Gamma| (nontrivial)");
  }
  double g4 = 0.0;
  for (const auto& b : bundles({"twisted_n4", 4, ""})) g4 = std::max(g4, b.gamma_tensor.max_abs());
  check.below(g4, 1e-9, "twisted_n4 max|Gamma|");
  for (const Case& c : kTwistedClass) {
    identity_below(check, c, "gamma.scalar_relation", 1e-9);
    for (const auto& b : bundles(c)) {
      check.above(norm_squared(b.weyl, b.g, b.g_inv), -1e-10, label(c) + " C^2");
      check.above(norm_squared(b.electric, b.g, b.g_inv), -1e-10, label(c) + " E^2");
      check.above(norm_squared(b.gamma_tensor, b.g, b.g_inv), -1e-10, label(c) + " Gamma^2");
    }
  }
  return check.ok();
}

bool criterion_adati(Check& check) {
  std::vector<Case> all = kTwistedClass;
  all.insert(all.end(), kControls.begin(), kControls.end());
  all.push_back({"twisted_generic", 7, ""});
  for (const Case& c : all) identity_below(check, c, "weyl.adati", 1e-8);
  return check.ok();
}

bool criterion_divergence(Check& check) {
  for (const Case& c : kTwistedClass) identity_below(check, c, "weyl.divergence_formula", 1e-8);
  for (const Case& c : kControls) {
    const IdentityReport& r = report(c, "weyl.divergence_formula");
    check.expect(r.verdict == Verdict::fail, label(c) + " divergence formula should fail");
    check.above(r.normalized(), r.tolerance, label(c) + " divergence residual");
  }
  return check.ok();
}

bool criterion_master_identity(Check& check) {
  for (const Case& c : kTwistedClass) {
    identity_below(check, c, "recurrence.master_identity", 1e-8);
    identity_below(check, c, "recurrence.gamma_consistency", 1e-9);
  }
  return check.ok();
}

bool criterion_witness(Check& check) {
  const Case grw{"grw_product_spheres", 5, ""};
  double e = 0.0, c = 0.0, div = 0.0;
  for (const auto& b : bundles(grw)) {
    e = std::max(e, b.electric.max_abs());
    c = std::max(c, b.weyl.max_abs());
    div = std::max(div, b.div_weyl.max_abs());
  }
  check.below(e, 1e-10, "max|E|");
  check.above(c, 1e-3, "max|C|");
  check.below(div, 1e-8, "max|divC|");
  for (const auto& r : electric_vanishing_suite(bundles(grw), "grw")) {
    check.expect(r.verdict == Verdict::pass && r.points_tested == kPoints, r.identity_id + " not confirmed at every point");
    check.below(r.normalized(), 1e-8, r.identity_id);
  }
  return check.ok();
}

bool criterion_jets(Check& check) {
  for (int i = 0; i < 20; ++i) {
    const int n = 4 + i % 4;
    const weylcheck::testing::RandomComposite f(n, static_cast<std::uint64_t>(500 + i));
    std::mt19937_64 rng(static_cast<std::uint64_t>(900 + i));
    std::vector<double> x(static_cast<std::size_t>(n));
    for (double& v : x) v = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    const auto cmp = weylcheck::testing::compare_with_finite_differences<Jet3>(f, x, 1e-3);
    check.below(cmp.worst_relative, 1e-5, "composite " + std::to_string(i) + " " + f.text());
  }
  return check.ok();
}

struct CliOutcome {
  int exit_code = -1;
  std::string out;
};

CliOutcome cli(const std::string& args) {
  const std::string cmd = std::string(WEYLCHECK_CLI) + " " + args + " 2>/dev/null";
  CliOutcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return o;
  std::array<char, 4096> buf{};
  while (const std::size_t got = fread(buf.data(), 1, buf.size(), pipe)) o.out.append(buf.data(), got);
  const int status = pclose(pipe);
  o.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

bool criterion_plumbing(Check& check) {
  const CliOutcome a = cli("verify --seed 42 --format structured");
  const CliOutcome b = cli("verify --seed 42 --format structured");
  check.expect(a.exit_code == 0, "default verify exit " + std::to_string(a.exit_code));
  check.expect(a.out == b.out && !a.out.empty(), "fixed-seed runs differ");
  try {
    const RunResult parsed = parse_structured(a.out);
    check.expect(to_structured(parsed) == a.out, "structured report does not round-trip");
    check.expect(parsed.exit_code == a.exit_code, "exit code in report differs from process exit");
  } catch (const std::exception& e) {
    check.expect(false, std::string("report does not parse: ") + e.what());
  }
  check.expect(cli("verify --tolerance weyl.divergence_formula=1e-15").exit_code == 1, "override 1e-15 should exit 1");

  const auto bad = std::filesystem::temp_directory_path() / "weylcheck_acceptance_bad.json";
  std::ofstream(bad) << "{\"points\": -4}";
  check.expect(cli("verify --config " + bad.string()).exit_code == 2, "invalid config should exit 2");
  std::filesystem::remove(bad);
  check.expect(cli("verify --config /nonexistent/weylcheck.json").exit_code == 2, "unreadable config should exit 2");
  check.expect(cli("frobnicate").exit_code == 2, "unknown subcommand should exit 2");
  return check.ok();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<bool(Check&)>>> criteria{
      {"torse-forming velocity on twisted models, violated by the control", criterion_torse_forming},
      {"Weyl compatibility, contraction and Ricci decomposition on twisted models", criterion_unconditional_twisted},
      {"four-dimensional Weyl algebra", criterion_four_dimensions},
      {"Gamma tensor properties and recurrence", criterion_gamma},
      {"Weyl form of the second Bianchi identity on every model", criterion_adati},
      {"Weyl divergence formula, violated by the control", criterion_divergence},
      {"master recurrence identity and Gamma consistency", criterion_master_identity},
      {"vanishing electric part witness on product spheres", criterion_witness},
      {"third-order jets against central differences", criterion_jets},
      {"determinism, report round trip and exit codes", criterion_plumbing},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check check;
    bool ok = false;
    try {
      ok = criteria[i].second(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << i + 1 << ": " << criteria[i].first << "\n";
    for (const auto& f : check.failures()) std::cout << "        " << f << "\n";
    if (!ok) ++failed;
  }
  std::cout << criteria.size() - static_cast<std::size_t>(failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
