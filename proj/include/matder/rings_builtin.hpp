#pragma once

#include <vector>

#include "matder/ring.hpp"

namespace matder {

/// The integers, arbitrary precision. Text form: decimal.
RingPtr integers();

/// Z/n for n >= 2. Text form: decimal residue in [0, n).
RingPtr zmod(const Int& n);

/// Polynomials over the integers in one variable t, with exact coefficients.
/// Text form: degree-ascending coefficient list "[c0,c1,...]" ("[]" is zero).
RingPtr poly_over_z();

/// 2x2 matrices over Z/p, p prime. Text form: "[[a,b],[c,d]]".
/// The stock non-commutative coefficient ring.
RingPtr mat2_over_zmod(const Int& p);

/// Parse a ring spec string: "Z" | "Z/<n>" | "Z[t]" | "M2(Z/<p>)".
RingPtr ring_from_spec(const std::string& spec);

/// d/dt on Z[t]. Usage error for any other ring.
CoefficientDerivation poly_ddt(const RingPtr& ring);

/// The derivations this kernel ships for a built-in ring: always the zero
/// derivation; d/dt for Z[t]. Inner ring derivations of non-commutative
/// rings are made on demand via inner_ring_derivation.
std::vector<CoefficientDerivation> builtin_derivations(const RingPtr& ring);

/// Parse a coefficient-derivation name for scenario files:
/// "zero" | "d/dt". Inner ring derivations use a structured descriptor.
CoefficientDerivation derivation_from_name(const RingPtr& ring,
                                           const std::string& name);

}  // namespace matder
