#pragma once

// Invariant batteries behind `nnst verify <suite>`. Each suite is a list of
// named checks; results depend only on the seed.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nnst {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;

  bool passed() const;
};

/// lp, leray, energy, monotonicity, minty, transport, exponents
std::span<const std::string_view> suite_names();

/// Throws InvalidArgument for an unknown suite name.
SuiteReport run_suite(std::string_view name, std::uint64_t seed);

}  // namespace nnst
