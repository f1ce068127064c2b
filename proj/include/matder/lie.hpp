#pragma once

#include "matder/derivation.hpp"

namespace matder {

/// The Lie rings under study. sl_inf is the bracket span of the finite
/// matrices; the gl variants are the associative rings with [a,b] = ab - ba.
enum class LieAmbient { sl_inf, gl_full, gl_rcf };
std::string to_string(LieAmbient a);
LieAmbient lie_ambient_from_string(const std::string& s);

/// A derivation of one of the Lie rings, presented on generator probes.
/// For sl_inf the probe set is the off-diagonal units e_ij(r), i != j, and
/// the diagonal differences e_kk(1) - e_ww(1); for the gl ambients all
/// units are probe-able.
class LieDerivation {
 public:
  using OffDiagFn =
      std::function<FiniteMatrix(Index, Index, const RingElement&)>;
  using DiagDiffFn = std::function<FiniteMatrix(Index, Index)>;
  using DiagUnitFn = std::function<FiniteMatrix(Index, const RingElement&)>;

  /// Restriction of an associative-ring derivation to the Lie probe set.
  /// For sl_inf the diagonal-unit view is deliberately dropped: only the
  /// differences remain observable, as for a genuine sl derivation.
  static LieDerivation from_associative(const MatrixDerivation& d,
                                        LieAmbient ambient);

  static LieDerivation black_box(RingPtr ring, LieAmbient ambient,
                                 OffDiagFn offdiag, DiagDiffFn diagdiff,
                                 std::optional<DiagUnitFn> diag_unit,
                                 bool concurrent_ok = false);

  FiniteMatrix eval_offdiag(Index i, Index j, const RingElement& r) const;
  FiniteMatrix eval_diagdiff(Index k, Index w) const;
  bool has_diag_units() const { return diag_unit_.has_value(); }
  FiniteMatrix eval_diag_unit(Index k, const RingElement& r) const;

  const RingPtr& ring_ptr() const { return ring_; }
  LieAmbient ambient() const { return ambient_; }
  const ProvenancePtr& provenance() const { return provenance_; }
  bool concurrent_ok() const { return concurrent_ok_; }

 private:
  LieDerivation(RingPtr ring, LieAmbient ambient, OffDiagFn off,
                DiagDiffFn diff, std::optional<DiagUnitFn> diag_unit,
                ProvenancePtr prov, bool concurrent_ok)
      : ring_(std::move(ring)),
        ambient_(ambient),
        offdiag_(std::move(off)),
        diagdiff_(std::move(diff)),
        diag_unit_(std::move(diag_unit)),
        provenance_(std::move(prov)),
        concurrent_ok_(concurrent_ok) {}

  RingPtr ring_;
  LieAmbient ambient_;
  OffDiagFn offdiag_;
  DiagDiffFn diagdiff_;
  std::optional<DiagUnitFn> diag_unit_;
  ProvenancePtr provenance_;
  bool concurrent_ok_ = false;
};

/// Decides membership in sl via the trace: a finite matrix lies in the
/// bracket span iff its trace lies in the additive span of the coefficient
/// ring's commutators, which the ring's oracle answers.
struct SlMembershipOracle {
  RingPtr ring;
};

/// Throws UsageError when the ring carries no commutator-span oracle.
bool sl_member(const FiniteMatrix& x, const SlMembershipOracle& oracle);

/// Sampled additivity + Lie product rule on generator pairs whose brackets
/// stay inside the probe-reachable span; for sl_inf also checks that all
/// probe values are sl members.
std::vector<Diagnostic> lie_validate(const LieDerivation& d, Window w,
                                     std::uint64_t seed, int trials);

/// Off-diagonal extraction through reservoir probes: reads
/// D(e_kk(1) - e_ww(1)) for a reservoir index w outside the window and
/// takes column k. The gl ambients probe e_kk(1) directly.
std::variant<FiniteMatrix, EngineRefutation> lie_extract_offdiag(
    const LieDerivation& d, Window w, Index reservoir);

struct LieDecomposeOptions {
  Window window;
  std::uint64_t seed = 0;
  int trials = 3;
  Index i0 = 0;
  /// Reservoir index for sl probes; 0 picks 2*bound. Must be >= bound.
  Index reservoir = 0;
  std::size_t probe_budget = 0;
  Mutation mutation = Mutation::none;
};

/// The Lie pipeline: gate on the half element, validate, extract v through
/// reservoir probes, row-probe it (sl_inf and gl_rcf claim an rcf inner
/// part), correct the diagonal, extract the residual, and round-trip on all
/// window off-diagonal units and diagonal differences.
DecompositionReport lie_decompose(const LieDerivation& d,
                                  const LieDecomposeOptions& opt);

}  // namespace matder
