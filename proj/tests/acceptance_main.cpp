// Acceptance runner: one pass/fail line per criterion, exit 0 iff all pass.
#include <cstring>
#include <iostream>
#include <string>

#include "matder/acceptance.hpp"

int main(int argc, char** argv) {
  matder::AcceptanceOptions opt;
  for (int k = 1; k < argc; ++k) {
    if (std::strcmp(argv[k], "--seed") == 0 && k + 1 < argc)
      opt.seed = std::stoull(argv[++k]);
    else if (std::strcmp(argv[k], "--cli") == 0 && k + 1 < argc)
      opt.cli_path = argv[++k];
    else {
      std::cerr << "usage: acceptance [--seed N] [--cli PATH]\n";
      return 1;
    }
  }
  auto results = matder::run_acceptance(opt);
  std::cout << matder::format_acceptance(results);
  for (const auto& r : results)
    if (!r.passed) return 1;
  return 0;
}
