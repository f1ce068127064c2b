#include "matder/ring.hpp"

#include <sstream>

namespace matder {

void Ring::require_mine(const RingElement& a) const {
  if (!a.valid() || !same_ring(*this, a.ring()))
    throw UsageError("element of ring '" +
                     (a.valid() ? a.ring().name() : std::string("<null>")) +
                     "' used with ring '" + name() + "'");
}

void Ring::require_same(const RingElement& a, const RingElement& b) const {
  require_mine(a);
  require_mine(b);
}

RingElement SampleStream::next() {
  const std::uint64_t k = count_++;
  if (k == 0) return ring_->zero();
  if (k == 1) return ring_->one();
  if (k == 2) {
    if (auto nc = ring_->noncentral_element()) return *nc;
  }
  return ring_->sample(rng_, size_bound_);
}

CoefficientDerivation CoefficientDerivation::zero_derivation(RingPtr ring) {
  RingPtr r = ring;
  return CoefficientDerivation(
      ring, "zero", [r](const RingElement& a) {
        r->require_mine(a);
        return r->zero();
      });
}

RingElement CoefficientDerivation::operator()(const RingElement& a) const {
  ring_->require_mine(a);
  RingElement out = fn_(a);
  ring_->require_mine(out);
  return out;
}

RingElement commutator(const RingElement& a, const RingElement& b) {
  a.ring().require_same(a, b);
  return a * b - b * a;
}

CoefficientDerivation inner_ring_derivation(const RingElement& r) {
  RingPtr ring = r.ring_ptr();
  RingElement fixed = r;
  return CoefficientDerivation(
      ring, "ad(" + r.text() + ")", [fixed](const RingElement& x) {
        return fixed * x - x * fixed;
      });
}

CoefficientDerivation derivation_commutator(const CoefficientDerivation& u1,
                                            const CoefficientDerivation& u2) {
  if (!same_ring(*u1.ring_ptr(), *u2.ring_ptr()))
    throw UsageError("derivation commutator across different rings");
  CoefficientDerivation a = u1, b = u2;
  return CoefficientDerivation(
      u1.ring_ptr(), "[" + u1.name() + "," + u2.name() + "]",
      [a, b](const RingElement& x) { return a(b(x)) - b(a(x)); });
}

namespace {

std::string witness2(const RingElement& a, const RingElement& b) {
  return "a=" + a.text() + ", b=" + b.text();
}

std::string witness3(const RingElement& a, const RingElement& b,
                     const RingElement& c) {
  return witness2(a, b) + ", c=" + c.text();
}

}  // namespace

std::vector<Diagnostic> check_ring_axioms(const RingPtr& ring,
                                          std::uint64_t seed, int trials) {
  if (trials < 1) throw UsageError("check_ring_axioms: trials must be >= 1");
  std::vector<Diagnostic> out;
  auto fail = [&](const std::string& check, const std::string& detail) {
    out.push_back({check, detail});
  };

  SampleStream s(ring, derive_seed(seed, "ring-axioms"));
  const RingElement zero = ring->zero(), one = ring->one();

  if (!ring->eq(zero, zero)) fail("eq-reflexive", "eq(0,0) is false");
  for (int t = 0; t < trials; ++t) {
    RingElement a = s.next(), b = s.next(), c = s.next();
    if (!ring->eq(a, a)) fail("eq-reflexive", "a=" + a.text());
    if (ring->eq(a, b) != ring->eq(b, a)) fail("eq-symmetric", witness2(a, b));

    if (!ring->eq(a + b, b + a)) fail("add-commutative", witness2(a, b));
    if (!ring->eq((a + b) + c, a + (b + c)))
      fail("add-associative", witness3(a, b, c));
    if (!ring->eq(a + zero, a)) fail("add-zero", "a=" + a.text());
    if (!ring->eq(a + (-a), zero)) fail("add-inverse", "a=" + a.text());

    if (!ring->eq((a * b) * c, a * (b * c)))
      fail("mul-associative", witness3(a, b, c));
    if (!ring->eq(a * (b + c), a * b + a * c))
      fail("mul-distributes-left", witness3(a, b, c));
    if (!ring->eq((a + b) * c, a * c + b * c))
      fail("mul-distributes-right", witness3(a, b, c));
    if (!ring->eq(one * a, a) || !ring->eq(a * one, a))
      fail("mul-unit", "a=" + a.text());

    if (ring->is_commutative() && !ring->eq(a * b, b * a))
      fail("mul-commutative", witness2(a, b));

    // eq must be a congruence; exercise it through a distinct handle of the
    // same value (text round trip).
    RingElement a2 = ring->from_text(ring->to_text(a));
    if (!ring->eq(a, a2)) fail("eq-text-roundtrip", "a=" + a.text());
    if (!ring->eq(a2 + c, a + c) || !ring->eq(a2 * c, a * c))
      fail("eq-congruence", witness2(a, c));
  }

  if (auto h = ring->half()) {
    if (!ring->eq(*h + *h, one)) fail("half", "half=" + h->text());
  }
  return out;
}

std::vector<Diagnostic> check_derivation_law(const CoefficientDerivation& u,
                                             std::uint64_t seed, int trials) {
  if (trials < 1)
    throw UsageError("check_derivation_law: trials must be >= 1");
  std::vector<Diagnostic> out;
  const RingPtr& ring = u.ring_ptr();
  SampleStream s(ring, derive_seed(seed, "derivation-law"));

  if (!u(ring->one()).is_zero())
    out.push_back({"derivation-unit", "u(1) = " + u(ring->one()).text()});

  for (int t = 0; t < trials; ++t) {
    RingElement a = s.next(), b = s.next();
    if (u(a + b) != u(a) + u(b))
      out.push_back({"derivation-additive", witness2(a, b)});
    if (u(a * b) != u(a) * b + a * u(b))
      out.push_back({"derivation-leibniz", witness2(a, b)});
  }
  return out;
}

}  // namespace matder
