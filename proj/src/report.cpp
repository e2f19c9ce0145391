#include "weylcheck/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "weylcheck/error.hpp"

namespace weylcheck {
namespace {

using nlohmann::json;

constexpr std::string_view kFormat = "weylcheck-report";
constexpr int kVersion = 1;

json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double read_number(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw ConfigError("expected a number, got " + j.dump());
}

json report_json(const IdentityReport& r) {
  json j{{"identity_id", r.identity_id},
         {"paper_ref", r.paper_ref},
         {"model", r.model},
         {"n", r.n},
         {"points_tested", r.points_tested},
         {"max_residual", number(r.max_residual)},
         {"scale", number(r.scale)},
         {"tolerance", number(r.tolerance)},
         {"verdict", to_string(r.verdict)},
         {"expected", to_string(r.expected)}};
  if (r.observed) j["observed"] = number(*r.observed);
  return j;
}

IdentityReport report_from_json(const json& j) {
  IdentityReport r;
  r.identity_id = j.at("identity_id").get<std::string>();
  r.paper_ref = j.at("paper_ref").get<std::string>();
  r.model = j.at("model").get<std::string>();
  r.n = j.at("n").get<int>();
  r.points_tested = j.at("points_tested").get<int>();
  r.max_residual = read_number(j.at("max_residual"));
  r.scale = read_number(j.at("scale"));
  r.tolerance = read_number(j.at("tolerance"));
  r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  r.expected = verdict_from_string(j.at("expected").get<std::string>());
  if (j.contains("observed")) r.observed = read_number(j.at("observed"));
  return r;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

}  // namespace

std::string to_structured(const RunResult& result) {
  json reports = json::array();
  for (const auto& r : result.reports) reports.push_back(report_json(r));
  json skipped = json::array();
  for (const auto& s : result.skipped_points) {
    json coords = json::array();
    for (double c : s.coords) coords.push_back(number(c));
    skipped.push_back({{"model", s.model}, {"n", s.n}, {"coords", coords}, {"reason", s.reason}});
  }
  const json doc{{"format", kFormat},         {"version", kVersion},
                 {"seed", result.seed},       {"points", result.points},
                 {"exit_code", result.exit_code}, {"reports", reports},
                 {"skipped_points", skipped}, {"warnings", result.warnings}};
  return doc.dump(2) + "\n";
}

RunResult parse_structured(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("format").get<std::string>() != kFormat) throw ConfigError("not a weylcheck report");
    if (doc.at("version").get<int>() != kVersion) throw ConfigError("unsupported report version");
    RunResult out;
    out.seed = doc.at("seed").get<std::uint64_t>();
    out.points = doc.at("points").get<int>();
    out.exit_code = doc.at("exit_code").get<int>();
    for (const auto& r : doc.at("reports")) out.reports.push_back(report_from_json(r));
    for (const auto& s : doc.at("skipped_points")) {
      SkippedPoint p;
      p.model = s.at("model").get<std::string>();
      p.n = s.at("n").get<int>();
      for (const auto& c : s.at("coords")) p.coords.push_back(read_number(c));
      p.reason = s.at("reason").get<std::string>();
      out.skipped_points.push_back(std::move(p));
    }
    out.warnings = doc.at("warnings").get<std::vector<std::string>>();
    return out;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  } catch (const UsageError& e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  }
}

std::string to_text(const RunResult& result) {
  std::ostringstream os;
  os << "weylcheck report  seed=" << result.seed << "  points=" << result.points << "\n";

  // identity id -> rows in result order
  std::map<std::string, std::vector<const IdentityReport*>> by_id;
  for (const auto& r : result.reports) by_id[r.identity_id].push_back(&r);

  int unexpected = 0;
  for (std::string_view group : identity_groups()) {
    os << "\n== " << group << " ==\n";
    for (const IdentityInfo& info : identity_registry()) {
      if (info.group != group) continue;
      const auto it = by_id.find(std::string(info.id));
      if (it == by_id.end()) continue;
      os << "\n" << info.id << "\n    " << info.reference << "\n";
      for (const IdentityReport* r : it->second) {
        const bool ok = r->meets_expectation();
        if (!ok) ++unexpected;
        std::string tag;
        if (r->verdict == Verdict::not_applicable)
          tag = " n/a ";
        else if (r->expected == Verdict::fail)
          tag = ok ? "XFAIL" : "XPASS";
        else
          tag = ok ? "PASS " : "FAIL ";
        os << "  [" << tag << "] " << r->model << " n=" << r->n;
        if (r->verdict == Verdict::not_applicable) {
          if (r->observed) os << "  hypothesis not met (observed " << format_double(*r->observed) << ")";
        } else {
          os << "  points=" << r->points_tested << "  residual=" << format_double(r->max_residual)
             << "  scale=" << format_double(r->scale) << "  tol=" << format_double(r->tolerance);
        }
        os << "\n";
      }
    }
  }

  if (!result.skipped_points.empty()) {
    os << "\nskipped points:\n";
    for (const auto& s : result.skipped_points) {
      os << "  " << s.model << " n=" << s.n << " (";
      for (std::size_t i = 0; i < s.coords.size(); ++i) os << (i ? ", " : "") << s.coords[i];
      os << "): " << s.reason << "\n";
    }
  }
  for (const auto& w : result.warnings) os << "warning: " << w << "\n";
  os << "\n" << result.reports.size() << " reports, " << unexpected << " unexpected; exit code " << result.exit_code
     << "\n";
  return os.str();
}

}  // namespace weylcheck
