#pragma once

#include <string>
#include <vector>

#include "matder/lie.hpp"

namespace matder {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // deterministic: counts and witnesses, never timings
};

struct AcceptanceOptions {
  std::uint64_t seed = 42;
  /// Path to the CLI binary; when set, the determinism criterion also
  /// spawns `selftest` twice and compares bytes end to end.
  std::string cli_path;
};

/// Runs the full acceptance suite. One result per criterion, in order.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);

/// One line per criterion: "[PASS] criterion N: name (detail)".
std::string format_acceptance(const std::vector<CriterionResult>& results);

/// Self-test entry used by the CLI: runs the suite (without spawning any
/// binaries) and renders the summary with per-suite pass/fail counts.
struct SelftestOutput {
  std::string text;
  bool all_passed = false;
};
SelftestOutput selftest(std::uint64_t seed);

}  // namespace matder
