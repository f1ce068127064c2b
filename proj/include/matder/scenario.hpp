#pragma once

#include <optional>
#include <string>
#include <variant>

#include "matder/lie.hpp"
#include "matder/rings_builtin.hpp"

namespace matder {

/// A named operator, in whichever class its construction lands.
using AnyMatrix = std::variant<FiniteMatrix, RcfOperator, ColumnFiniteOperator>;

/// Operator spec: "shift" | "identity" | {"kind":"diag","formula":"a*i+b"}
/// | {"kind":"finite","entries":[[i,j,"text"],...]}
/// | {"kind":"ones_row","row":k} | {"kind":"sum","parts":[...]}.
AnyMatrix build_operator(const RingPtr& ring, const json& spec);

/// Derivation descriptor: {"kind":"inner","operator":...}
/// | {"kind":"lift","derivation": "zero" | "d/dt"
///       | {"kind":"inner_ring","element":"text"}}
/// | {"kind":"sum","parts":[...]}.
MatrixDerivation build_derivation(const RingPtr& ring, const json& desc,
                                  Ambient ambient);

/// One scenario document: ring, derivation (associative or Lie), window,
/// seed, trials, base index, reservoir, optional output path. Unknown keys
/// are rejected; all bounds must be >= 1.
struct Scenario {
  RingPtr ring;
  std::optional<MatrixDerivation> associative;
  std::optional<LieDerivation> lie;
  Window window{1};
  std::uint64_t seed = 0;
  int trials = 3;
  Index i0 = 0;
  Index reservoir = 0;  // Lie only; 0 = pick 2*window
  std::optional<std::string> out_path;
  json resolved;  // canonical echo, embedded in the report
};

Scenario parse_scenario(const json& doc);
Scenario parse_scenario_file(const std::string& path);

struct RunResult {
  DecompositionReport report;
  json report_json;  // report + tool version + resolved scenario
  int exit_code;     // 0 decomposed, 2 refuted, 3 inconclusive/unsupported
};

RunResult run_scenario(const Scenario& sc);

/// Affine index formula "a*i+b" (terms may come in any order/sign),
/// evaluated in the ring as (a*i + b) * 1.
std::pair<long long, long long> parse_affine_formula(const std::string& s);

}  // namespace matder
