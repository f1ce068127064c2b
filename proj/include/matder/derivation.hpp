#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "matder/matrix.hpp"

namespace matder {

using json = nlohmann::json;

/// Sorted triple list [[i, j, "element-text"], ...].
json fm_to_json(const FiniteMatrix& m);

/// Window report: {"bound": n, "entries": [[i, j, "element-text"], ...]}.
json window_report_json(const FiniteMatrix& window_table, Index bound);

/// Which matrix ring is being differentiated.
enum class Ambient { m_inf, m_rcf, m_full };
std::string to_string(Ambient a);
Ambient ambient_from_string(const std::string& s);

/// Planted engine defects for the mutation-sensitivity harness. Test
/// instrumentation only; the CLI never sets these.
enum class Mutation {
  none,
  flip_bracket_sign,   // every engine-side bracket computes ba - ab
  drop_correction,     // diagonal correction skipped, residual taken raw
  skip_antisymmetry,   // validator omits the antisymmetry check
};

struct Provenance;
using ProvenancePtr = std::shared_ptr<const Provenance>;

/// How a derivation was constructed, when it was constructed rather than
/// supplied as a black box. Used for reporting and for assembling the full
/// off-diagonal operator when rows are reachable.
struct Provenance {
  enum class Kind { inner, lift, sum, negated };
  Kind kind;

  std::optional<RcfOperator> inner_rcf;           // inner over an rcf operator
  std::optional<ColumnFiniteOperator> inner_col;  // inner over a column-only one
  std::optional<CoefficientDerivation> lifted;
  std::vector<ProvenancePtr> parts;

  json describe() const;
};

/// A derivation of a matrix ring, presented as a black box on matrix units:
/// eval_unit(i, j, r) = d(e_ij(r)). Values must be certified finite; a box
/// that cannot deliver one raises ProbeError, which decompose reports as
/// inconclusive.
class MatrixDerivation {
 public:
  using UnitFn = std::function<FiniteMatrix(Index, Index, const RingElement&)>;

  static MatrixDerivation black_box(RingPtr ring, Ambient ambient, UnitFn fn,
                                    bool concurrent_ok = false);

  /// ad(a) for a row-and-column-finite a. Valid for every ambient: values
  /// on units stay finite by the ideal property.
  static MatrixDerivation inner(const RcfOperator& a, Ambient ambient);

  /// ad(a) for a column-finite-only a; ambient m_full only (for m_inf and
  /// m_rcf the values could leave the finite class). Rows of a are not
  /// observable, so each needed row is reconstructed by scanning columns
  /// under a budget; a row that exceeds it makes the probe inconclusive.
  static MatrixDerivation inner(const ColumnFiniteOperator& a);

  /// Entrywise application of a coefficient derivation.
  static MatrixDerivation lift(const CoefficientDerivation& u, Ambient ambient);

  static MatrixDerivation sum(const MatrixDerivation& d1,
                              const MatrixDerivation& d2);
  static MatrixDerivation negated(const MatrixDerivation& d);

  FiniteMatrix eval_unit(Index i, Index j, const RingElement& r) const;

  const RingPtr& ring_ptr() const { return ring_; }
  Ambient ambient() const { return ambient_; }
  const ProvenancePtr& provenance() const { return provenance_; }
  bool concurrent_ok() const { return concurrent_ok_; }

 private:
  MatrixDerivation(RingPtr ring, Ambient ambient, UnitFn fn, ProvenancePtr p,
                   bool concurrent_ok)
      : ring_(std::move(ring)),
        ambient_(ambient),
        fn_(std::move(fn)),
        provenance_(std::move(p)),
        concurrent_ok_(concurrent_ok) {}

  RingPtr ring_;
  Ambient ambient_;
  UnitFn fn_;
  ProvenancePtr provenance_;
  bool concurrent_ok_ = false;
};

/// d(X) for finite X, by additivity over the support.
FiniteMatrix evaluate(const MatrixDerivation& d, const FiniteMatrix& x);

/// Consistency audit of a black box on the window: additivity in the
/// coefficient, the product rule on unit products, the row/column cross
/// shape of d(e_kk(1)), and the antisymmetry of its off-diagonal entries.
/// Empty result: consistent with being a derivation as far as probed.
std::vector<Diagnostic> validate_derivation(const MatrixDerivation& d,
                                            Window w, std::uint64_t seed,
                                            int trials,
                                            Mutation mutation = Mutation::none);

/// A named check failure with its witness.
struct EngineRefutation {
  std::string check;
  json witness;
};

/// Off-diagonal extraction: v_ij = entry (i,j) of d(e_jj(1)) for i != j
/// inside the window, zero diagonal. Verified against the window bracket
/// identity before returning.
std::variant<FiniteMatrix, EngineRefutation> extract_v(
    const MatrixDerivation& d, Window w);

/// Coefficient map of a diagonal-killing derivation at (i, j):
/// r -> entry (i,j) of d'(e_ij(r)). Probes that stray outside {(i,j)}
/// raise RefutationError with the witness.
class CoefficientMap {
 public:
  CoefficientMap(MatrixDerivation d_prime, Index i, Index j);
  RingElement operator()(const RingElement& r) const;
  Index i() const { return i_; }
  Index j() const { return j_; }

 private:
  MatrixDerivation d_;
  Index i_, j_;
};

/// Builds the coefficient map after verifying d'(e_kk(1)) = 0 for k in
/// {i, j}; a nonzero probe refutes with the witness.
std::variant<CoefficientMap, EngineRefutation> coefficient_map(
    const MatrixDerivation& d_prime, Index i, Index j);

/// Diagonal correction: c(i) = d'_{i,i0}(1) (so c(i0) = 0), the cocycle
/// identity d'_ij(1) = d'_ik(1) + d'_kj(1) across the window, and the
/// residual u(r) = d'_ij(r) - (c(i) r - r c(j)) with its independence of
/// the choice of (i, j) sampled.
struct CocycleResult {
  std::vector<RingElement> c;  // window table, c[i0] = 0
  CoefficientDerivation u;
};
std::variant<CocycleResult, EngineRefutation> cocycle_correct(
    const MatrixDerivation& d_prime, Window w, Index i0, std::uint64_t seed,
    int trials);

enum class Status { decomposed, refuted, inconclusive, unsupported };
std::string to_string(Status s);

struct CheckOutcome {
  std::string name;
  std::string outcome;  // "pass" | "fail" | "skipped"
  json detail;          // witness on failure, scope note when useful
};

/// Output of the decomposition pipelines. All verdicts are scoped to the
/// window and to the columns actually probed; the notes say so explicitly.
struct DecompositionReport {
  Status status = Status::inconclusive;
  std::string ring_name;
  std::string ambient;
  Index window_bound = 0;
  Index i0 = 0;

  std::optional<FiniteMatrix> v_window;  // zero diagonal
  std::vector<std::pair<Index, RingElement>> correction;  // (i, c(i)), i < bound
  std::optional<CoefficientDerivation> residual;
  std::string residual_description;

  /// Full off-diagonal part as an operator, when provenance reaches rows.
  std::optional<RcfOperator> v_full;

  std::vector<CheckOutcome> checks;
  std::vector<std::string> notes;
  std::string failure_reason;  // refuted/inconclusive/unsupported detail
  std::string applicability;   // Lie layer: the half-element gate verdict

  json to_json() const;
};

/// The off-diagonal part of the inner summands recorded in a provenance
/// tree, as a genuine rcf operator. Null when rows are out of reach.
std::optional<RcfOperator> provenance_offdiag_operator(
    const RingPtr& ring, const ProvenancePtr& prov);

struct DecomposeOptions {
  Window window;
  std::uint64_t seed = 0;
  int trials = 3;
  Index i0 = 0;
  /// eval_unit call cap; 0 picks a default proportional to bound^2 * trials.
  std::size_t probe_budget = 0;
  Mutation mutation = Mutation::none;
};

/// The full pipeline: validate, extract v, row-probe it (skipped for the
/// full ring, where the inner part may be only column-finite), subtract
/// ad(v) lazily, extract coefficient maps, apply the diagonal correction,
/// and re-verify d against ad(v + diag(c)) + lift(u) on every window unit.
DecompositionReport decompose(const MatrixDerivation& d,
                              const DecomposeOptions& opt);

/// Human-oriented residual description ("zero" when the ring forces it,
/// p(t)*d/dt over Z[t], a sampled table otherwise).
std::string describe_residual(const CoefficientDerivation& u,
                              std::uint64_t seed);

}  // namespace matder
