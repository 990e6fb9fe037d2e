#include "qglab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace qg {

void CheckReport::add(std::string check_id, std::string paper_ref, Real residual, Real tol) {
  CheckResult r;
  r.check_id = std::move(check_id);
  r.paper_ref = std::move(paper_ref);
  r.residual = std::isfinite(residual) ? residual : std::numeric_limits<Real>::max();
  r.tol = tol;
  r.pass = std::isfinite(residual) && residual <= tol;
  checks_.push_back(std::move(r));
}

void CheckReport::merge(const CheckReport& other) {
  checks_.insert(checks_.end(), other.checks_.begin(), other.checks_.end());
}

int CheckReport::passed() const {
  return static_cast<int>(std::count_if(checks_.begin(), checks_.end(),
                                        [](const CheckResult& r) { return r.pass; }));
}

Real CheckReport::max_residual() const {
  Real m = 0;
  for (const auto& r : checks_) m = std::max(m, r.residual);
  return m;
}

std::vector<CheckResult> CheckReport::failures() const {
  std::vector<CheckResult> out;
  for (const auto& r : checks_)
    if (!r.pass) out.push_back(r);
  return out;
}

std::string format_double(Real v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string CheckReport::to_json() const {
  std::vector<CheckResult> sorted = checks_;
  std::sort(sorted.begin(), sorted.end(),
            [](const CheckResult& a, const CheckResult& b) { return a.check_id < b.check_id; });

  std::string out = "{\n  \"checks\": [";
  for (size_t i = 0; i < sorted.size(); ++i) {
    const auto& r = sorted[i];
    out += (i == 0) ? "\n" : ",\n";
    out += "    {\"check_id\": \"" + json_escape(r.check_id) + "\", \"paper_ref\": \"" +
           json_escape(r.paper_ref) + "\", \"residual\": " + format_double(r.residual) +
           ", \"tol\": " + format_double(r.tol) + ", \"pass\": " + (r.pass ? "true" : "false") +
           "}";
  }
  out += sorted.empty() ? "],\n" : "\n  ],\n";
  out += "  \"summary\": {\"total\": " + std::to_string(total()) +
         ", \"passed\": " + std::to_string(passed()) +
         ", \"max_residual\": " + format_double(max_residual()) + "}\n}\n";
  return out;
}

}  // namespace qg
