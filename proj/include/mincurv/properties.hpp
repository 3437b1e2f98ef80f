#pragma once

// Randomized property sweeps over the curvature operator, the DPP and PDE
// step maps and the concentric strategies. Deterministic for a given seed.

#include <cstdint>
#include <string>
#include <vector>

namespace mincurv {

struct PropertyResult {
  std::string name;
  int trials = 0;
  int failures = 0;
  /// First failing case, if any.
  std::string detail;

  bool passed() const { return failures == 0 && trials > 0; }
};

/// `trials` scales every suite: the operator axioms run `trials` cases, the
/// brute-force and step-map suites trials / 5 and trials / 10.
std::vector<PropertyResult> run_property_suites(int trials, std::uint64_t seed);

}  // namespace mincurv
