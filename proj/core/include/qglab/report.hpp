#pragma once

#include <string>
#include <vector>

#include "qglab/types.hpp"

namespace qg {

// One verified identity: residual against a pinned tolerance, plus the anchor
// label naming which statement was checked.
struct CheckResult {
  std::string check_id;
  std::string paper_ref;
  Real residual = 0;
  Real tol = kDefaultTol;
  bool pass = false;
};

class CheckReport {
 public:
  // Non-finite residuals are clamped to DBL_MAX and fail.
  void add(std::string check_id, std::string paper_ref, Real residual, Real tol = kDefaultTol);
  void merge(const CheckReport& other);

  const std::vector<CheckResult>& checks() const { return checks_; }
  int total() const { return static_cast<int>(checks_.size()); }
  int passed() const;
  Real max_residual() const;
  bool all_pass() const { return passed() == total(); }
  std::vector<CheckResult> failures() const;

  // Byte-deterministic serialization: checks sorted by check_id, fixed key
  // order, doubles rendered with %.17g.
  std::string to_json() const;

 private:
  std::vector<CheckResult> checks_;
};

std::string format_double(Real v);
std::string json_escape(const std::string& s);

}  // namespace qg
