#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "matder/errors.hpp"
#include "matder/rng.hpp"

namespace matder {

using Int = boost::multiprecision::cpp_int;

/// Payloads of the built-in coefficient rings. A polynomial is a
/// degree-ascending coefficient list with trailing zeros stripped; a 2x2
/// matrix is stored row major.
struct PolyValue {
  std::vector<Int> coeffs;
};
struct Mat2Value {
  std::array<Int, 4> a;
};
using ElementValue = std::variant<Int, PolyValue, Mat2Value>;

class Ring;
using RingPtr = std::shared_ptr<const Ring>;

/// Immutable element of a specific ring. Operations between elements of
/// different rings are usage errors. Elements keep their ring alive.
class RingElement {
 public:
  RingElement() = default;

  RingElement(RingPtr ring, ElementValue value)
      : ring_(std::move(ring)), value_(std::move(value)) {}

  bool valid() const { return ring_ != nullptr; }
  const Ring& ring() const;
  const RingPtr& ring_ptr() const;
  const ElementValue& value() const { return value_; }

  bool is_zero() const;
  std::string text() const;

  friend RingElement operator+(const RingElement& a, const RingElement& b);
  friend RingElement operator-(const RingElement& a, const RingElement& b);
  friend RingElement operator-(const RingElement& a);
  friend RingElement operator*(const RingElement& a, const RingElement& b);
  friend bool operator==(const RingElement& a, const RingElement& b);
  friend bool operator!=(const RingElement& a, const RingElement& b) {
    return !(a == b);
  }

 private:
  RingPtr ring_;
  ElementValue value_;
};

/// A unital associative coefficient ring with exact operations. Concrete
/// rings are immutable and all operations are pure, so a ring and its
/// elements may be shared freely across threads.
///
/// Identity is by name(): two instances with the same canonical name are the
/// same ring (e.g. two `zmod(6)` handles are interchangeable).
class Ring : public std::enable_shared_from_this<Ring> {
 public:
  virtual ~Ring() = default;

  virtual std::string name() const = 0;
  virtual bool is_commutative() const = 0;

  virtual RingElement zero() const = 0;
  virtual RingElement one() const = 0;
  virtual RingElement add(const RingElement& a, const RingElement& b) const = 0;
  virtual RingElement neg(const RingElement& a) const = 0;
  virtual RingElement mul(const RingElement& a, const RingElement& b) const = 0;
  virtual bool eq(const RingElement& a, const RingElement& b) const = 0;

  RingElement sub(const RingElement& a, const RingElement& b) const {
    return add(a, neg(b));
  }
  bool is_zero(const RingElement& a) const { return eq(a, zero()); }

  /// Element h with h + h = one, when one exists.
  virtual std::optional<RingElement> half() const { return std::nullopt; }

  /// Membership in the additive span of commutators {ab - ba}.
  /// nullopt: this ring provides no such oracle.
  virtual std::optional<bool> commutator_span_member(
      const RingElement& /*a*/) const {
    return std::nullopt;
  }

  /// One raw random element. Combine with SampleStream for the guarantee
  /// that early draws cover zero, one and a non-central element.
  virtual RingElement sample(SplitMix64& rng, unsigned size_bound) const = 0;

  /// Some non-central element, when the ring has one.
  virtual std::optional<RingElement> noncentral_element() const {
    return std::nullopt;
  }

  /// n * one, computed in the ring. The image of the integers.
  virtual RingElement from_integer(const Int& n) const = 0;

  virtual std::string to_text(const RingElement& a) const = 0;
  virtual RingElement from_text(const std::string& s) const = 0;

  /// All elements, for finite rings small enough to enumerate.
  virtual std::optional<std::vector<RingElement>> enumerate_all() const {
    return std::nullopt;
  }

  /// true when additivity alone forces every derivation of this ring to be
  /// zero (integers and their quotients: u(k*1) = k*u(1) = 0).
  virtual bool derivations_trivial() const { return false; }

  void require_mine(const RingElement& a) const;
  void require_same(const RingElement& a, const RingElement& b) const;

 protected:
  RingElement wrap(ElementValue v) const {
    return RingElement(shared_from_this(), std::move(v));
  }
};

inline const Ring& RingElement::ring() const {
  if (!ring_) throw UsageError("operation on a null ring element");
  return *ring_;
}

inline const RingPtr& RingElement::ring_ptr() const {
  if (!ring_) throw UsageError("operation on a null ring element");
  return ring_;
}

inline bool same_ring(const Ring& a, const Ring& b) {
  return &a == &b || a.name() == b.name();
}

inline RingElement operator+(const RingElement& a, const RingElement& b) {
  return a.ring().add(a, b);
}
inline RingElement operator-(const RingElement& a, const RingElement& b) {
  return a.ring().sub(a, b);
}
inline RingElement operator-(const RingElement& a) { return a.ring().neg(a); }
inline RingElement operator*(const RingElement& a, const RingElement& b) {
  return a.ring().mul(a, b);
}
inline bool operator==(const RingElement& a, const RingElement& b) {
  return a.ring().eq(a, b);
}

inline bool RingElement::is_zero() const { return ring().is_zero(*this); }
inline std::string RingElement::text() const { return ring().to_text(*this); }

/// Seeded element source. The first draws of every stream cover zero, one
/// and (when the ring has one) a non-central element, so axiom and Leibniz
/// samplers are never vacuous.
class SampleStream {
 public:
  SampleStream(RingPtr ring, std::uint64_t seed, unsigned size_bound = 4)
      : ring_(std::move(ring)), rng_(seed), size_bound_(size_bound) {}

  RingElement next();

  /// Drop the next n draws. Callers that already cover the forced head
  /// (zero, one, a non-central element) skip it to get variety early.
  SampleStream& skip(int n) {
    for (int t = 0; t < n; ++t) next();
    return *this;
  }

  const RingPtr& ring_ptr() const { return ring_; }

 private:
  RingPtr ring_;
  SplitMix64 rng_;
  std::uint64_t count_ = 0;
  unsigned size_bound_;
};

/// A derivation of the coefficient ring: an additive map satisfying the
/// product rule. The map must be pure; it is applied from multiple call
/// sites and its results are assumed reproducible.
class CoefficientDerivation {
 public:
  using Fn = std::function<RingElement(const RingElement&)>;

  CoefficientDerivation(RingPtr ring, std::string name, Fn fn)
      : ring_(std::move(ring)), name_(std::move(name)), fn_(std::move(fn)) {}

  static CoefficientDerivation zero_derivation(RingPtr ring);

  const RingPtr& ring_ptr() const { return ring_; }
  const std::string& name() const { return name_; }

  RingElement operator()(const RingElement& a) const;

 private:
  RingPtr ring_;
  std::string name_;
  Fn fn_;
};

RingElement commutator(const RingElement& a, const RingElement& b);

/// x -> rx - xr.
CoefficientDerivation inner_ring_derivation(const RingElement& r);

/// [u1, u2] = u1∘u2 - u2∘u1 (again a derivation).
CoefficientDerivation derivation_commutator(const CoefficientDerivation& u1,
                                            const CoefficientDerivation& u2);

struct Diagnostic {
  std::string check;
  std::string detail;
};

/// Sampled ring-axiom audit: abelian group under +, associativity and
/// two-sided distributivity of *, unit laws, eq congruence, declared
/// commutativity, half consistency. Empty result = no violation found.
std::vector<Diagnostic> check_ring_axioms(const RingPtr& ring,
                                          std::uint64_t seed, int trials);

/// Sampled additivity + product-rule audit of a coefficient derivation.
std::vector<Diagnostic> check_derivation_law(const CoefficientDerivation& u,
                                             std::uint64_t seed, int trials);

}  // namespace matder
