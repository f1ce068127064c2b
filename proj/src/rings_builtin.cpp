#include "matder/rings_builtin.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace matder {

namespace {

Int parse_int_strict(const std::string& s) {
  if (s.empty()) throw ParseError("empty integer literal");
  std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (start == s.size()) throw ParseError("bad integer literal '" + s + "'");
  for (std::size_t i = start; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i])))
      throw ParseError("bad integer literal '" + s + "'");
  return Int(s);
}

Int norm_mod(const Int& x, const Int& n) { return ((x % n) + n) % n; }

/// Split "a,b,c" at top level (no nesting in our forms beyond one bracket
/// depth, which the callers strip first).
std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t depth = 0, start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '[') ++depth;
    if (s[i] == ']') {
      if (depth == 0) throw ParseError("unbalanced ']' in '" + s + "'");
      --depth;
    }
    if (s[i] == ',' && depth == 0) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  out.push_back(s.substr(start));
  return out;
}

std::string strip_spaces(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  return out;
}

std::string expect_brackets(const std::string& s, const std::string& what) {
  if (s.size() < 2 || s.front() != '[' || s.back() != ']')
    throw ParseError("expected bracketed " + what + ", got '" + s + "'");
  return s.substr(1, s.size() - 2);
}

class IntegerRing final : public Ring {
 public:
  std::string name() const override { return "Z"; }
  bool is_commutative() const override { return true; }

  RingElement zero() const override { return wrap(Int(0)); }
  RingElement one() const override { return wrap(Int(1)); }

  RingElement add(const RingElement& a, const RingElement& b) const override {
    require_same(a, b);
    return wrap(val(a) + val(b));
  }
  RingElement neg(const RingElement& a) const override {
    require_mine(a);
    return wrap(-val(a));
  }
  RingElement mul(const RingElement& a, const RingElement& b) const override {
    require_same(a, b);
    return wrap(val(a) * val(b));
  }
  bool eq(const RingElement& a, const RingElement& b) const override {
    require_same(a, b);
    return val(a) == val(b);
  }

  RingElement sample(SplitMix64& rng, unsigned size_bound) const override {
    const std::int64_t m = 3 + static_cast<std::int64_t>(size_bound);
    return wrap(Int(rng.in_range(-m, m)));
  }

  RingElement from_integer(const Int& n) const override { return wrap(n); }

  std::string to_text(const RingElement& a) const override {
    require_mine(a);
    return val(a).str();
  }
  RingElement from_text(const std::string& s) const override {
    return wrap(parse_int_strict(strip_spaces(s)));
  }

  std::optional<bool> commutator_span_member(
      const RingElement& a) const override {
    require_mine(a);
    return is_zero(a);
  }

  bool derivations_trivial() const override { return true; }

 private:
  static const Int& val(const RingElement& a) {
    return std::get<Int>(a.value());
  }
};

class ZmodRing final : public Ring {
 public:
  explicit ZmodRing(Int n) : n_(std::move(n)) {
    if (n_ < 2) throw UsageError("Z/n requires n >= 2");
  }

  std::string name() const override { return "Z/" + n_.str(); }
  bool is_commutative() const override { return true; }

  RingElement zero() const override { return wrap(Int(0)); }
  RingElement one() const override { return wrap(Int(1)); }

  RingElement add(const RingElement& a, const RingElement& b) const override {
    require_same(a, b);
    return wrap(norm_mod(val(a) + val(b), n_));
  }
  RingElement neg(const RingElement& a) const override {
    require_mine(a);
    return wrap(norm_mod(-val(a), n_));
  }
  RingElement mul(const RingElement& a, const RingElement& b) const override {
    require_same(a, b);
    return wrap(norm_mod(val(a) * val(b), n_));
  }
  bool eq(const RingElement& a, const RingElement& b) const override {
    require_same(a, b);
    return val(a) == val(b);
  }

  std::optional<RingElement> half() const override {
    if (n_ % 2 == 0) return std::nullopt;
    return wrap(Int((n_ + 1) / 2));
  }

  std::optional<bool> commutator_span_member(
      const RingElement& a) const override {
    require_mine(a);
    return is_zero(a);
  }

  RingElement sample(SplitMix64& rng, unsigned) const override {
    if (n_ <= 0xffffffffULL)
      return wrap(Int(rng.below(static_cast<std::uint64_t>(n_))));
    // wide modulus: build a number from 64-bit chunks, then reduce
    Int x = 0;
    for (int i = 0; i < 4; ++i) x = (x << 64) + rng.next();
    return wrap(norm_mod(x, n_));
  }

  RingElement from_integer(const Int& n) const override {
    return wrap(norm_mod(n, n_));
  }

  std::string to_text(const RingElement& a) const override {
    require_mine(a);
    return val(a).str();
  }
  RingElement from_text(const std::string& s) const override {
    return wrap(norm_mod(parse_int_strict(strip_spaces(s)), n_));
  }

  std::optional<std::vector<RingElement>> enumerate_all() const override {
    if (n_ > 4096) return std::nullopt;
    std::vector<RingElement> out;
    for (Int i = 0; i < n_; ++i) out.push_back(wrap(Int(i)));
    return out;
  }

  bool derivations_trivial() const override { return true; }

 private:
  static const Int& val(const RingElement& a) {
    return std::get<Int>(a.value());
  }
  Int n_;
};

class PolyRing final : public Ring {
 public:
  std::string name() const override { return "Z[t]"; }
  bool is_commutative() const override { return true; }

  RingElement zero() const override { return wrap(PolyValue{}); }
  RingElement one() const override { return wrap(PolyValue{{Int(1)}}); }

  RingElement add(const RingElement& a, const RingElement& b) const override {
    require_same(a, b);
    const auto& x = val(a).coeffs;
    const auto& y = val(b).coeffs;
    std::vector<Int> c(std::max(x.size(), y.size()), Int(0));
    for (std::size_t i = 0; i < x.size(); ++i) c[i] += x[i];
    for (std::size_t i = 0; i < y.size(); ++i) c[i] += y[i];
    return wrap(normalized(std::move(c)));
  }
  RingElement neg(const RingElement& a) const override {
    require_mine(a);
    std::vector<Int> c = val(a).coeffs;
    for (auto& v : c) v = -v;
    return wrap(PolyValue{std::move(c)});
  }
  RingElement mul(const RingElement& a, const RingElement& b) const override {
    require_same(a, b);
    const auto& x = val(a).coeffs;
    const auto& y = val(b).coeffs;
    if (x.empty() || y.empty()) return zero();
    std::vector<Int> c(x.size() + y.size() - 1, Int(0));
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = 0; j < y.size(); ++j) c[i + j] += x[i] * y[j];
    return wrap(normalized(std::move(c)));
  }
  bool eq(const RingElement& a, const RingElement& b) const override {
    require_same(a, b);
    return val(a).coeffs == val(b).coeffs;
  }

  std::optional<bool> commutator_span_member(
      const RingElement& a) const override {
    require_mine(a);
    return is_zero(a);
  }

  RingElement sample(SplitMix64& rng, unsigned size_bound) const override {
    const std::uint64_t deg_cap = std::min<std::uint64_t>(3, size_bound);
    const std::uint64_t deg = rng.below(deg_cap + 1);
    std::vector<Int> c;
    for (std::uint64_t i = 0; i <= deg; ++i)
      c.push_back(Int(rng.in_range(-3, 3)));
    return wrap(normalized(std::move(c)));
  }

  RingElement from_integer(const Int& n) const override {
    if (n == 0) return zero();
    return wrap(PolyValue{{n}});
  }

  std::string to_text(const RingElement& a) const override {
    require_mine(a);
    std::ostringstream os;
    os << '[';
    const auto& c = val(a).coeffs;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i) os << ',';
      os << c[i].str();
    }
    os << ']';
    return os.str();
  }
  RingElement from_text(const std::string& raw) const override {
    const std::string s = strip_spaces(raw);
    const std::string inner = expect_brackets(s, "coefficient list");
    std::vector<Int> c;
    if (!inner.empty())
      for (const auto& part : split_commas(inner))
        c.push_back(parse_int_strict(part));
    return wrap(normalized(std::move(c)));
  }

 private:
  static PolyValue normalized(std::vector<Int> c) {
    while (!c.empty() && c.back() == 0) c.pop_back();
    return PolyValue{std::move(c)};
  }
  static const PolyValue& val(const RingElement& a) {
    return std::get<PolyValue>(a.value());
  }
};

class Mat2Ring final : public Ring {
 public:
  explicit Mat2Ring(Int p) : p_(std::move(p)) {
    if (p_ < 2) throw UsageError("M2(Z/p) requires prime p >= 2");
    for (Int d = 2; d * d <= p_; ++d)
      if (p_ % d == 0)
        throw UsageError("M2(Z/p) requires a prime modulus, got " + p_.str());
  }

  std::string name() const override { return "M2(Z/" + p_.str() + ")"; }
  bool is_commutative() const override { return false; }

  RingElement zero() const override {
    return wrap(Mat2Value{{Int(0), Int(0), Int(0), Int(0)}});
  }
  RingElement one() const override {
    return wrap(Mat2Value{{Int(1), Int(0), Int(0), Int(1)}});
  }

  RingElement add(const RingElement& a, const RingElement& b) const override {
    require_same(a, b);
    Mat2Value c;
    for (int i = 0; i < 4; ++i)
      c.a[i] = norm_mod(val(a).a[i] + val(b).a[i], p_);
    return wrap(c);
  }
  RingElement neg(const RingElement& a) const override {
    require_mine(a);
    Mat2Value c;
    for (int i = 0; i < 4; ++i) c.a[i] = norm_mod(-val(a).a[i], p_);
    return wrap(c);
  }
  RingElement mul(const RingElement& a, const RingElement& b) const override {
    require_same(a, b);
    const auto& x = val(a).a;
    const auto& y = val(b).a;
    Mat2Value c;
    c.a[0] = norm_mod(x[0] * y[0] + x[1] * y[2], p_);
    c.a[1] = norm_mod(x[0] * y[1] + x[1] * y[3], p_);
    c.a[2] = norm_mod(x[2] * y[0] + x[3] * y[2], p_);
    c.a[3] = norm_mod(x[2] * y[1] + x[3] * y[3], p_);
    return wrap(c);
  }
  bool eq(const RingElement& a, const RingElement& b) const override {
    require_same(a, b);
    return val(a).a == val(b).a;
  }

  std::optional<RingElement> half() const override {
    if (p_ % 2 == 0) return std::nullopt;
    const Int h = (p_ + 1) / 2;
    return wrap(Mat2Value{{h, Int(0), Int(0), h}});
  }

  /// In a full matrix ring over a field the additive span of commutators is
  /// exactly the trace-zero set (checked against brute force in tests).
  std::optional<bool> commutator_span_member(
      const RingElement& a) const override {
    require_mine(a);
    return norm_mod(val(a).a[0] + val(a).a[3], p_) == 0;
  }

  RingElement sample(SplitMix64& rng, unsigned) const override {
    Mat2Value c;
    for (int i = 0; i < 4; ++i)
      c.a[i] = Int(rng.below(static_cast<std::uint64_t>(p_)));
    return wrap(c);
  }

  std::optional<RingElement> noncentral_element() const override {
    return wrap(Mat2Value{{Int(0), Int(1), Int(0), Int(0)}});
  }

  RingElement from_integer(const Int& n) const override {
    const Int r = norm_mod(n, p_);
    return wrap(Mat2Value{{r, Int(0), Int(0), r}});
  }

  std::string to_text(const RingElement& m) const override {
    require_mine(m);
    const auto& x = val(m).a;
    std::ostringstream os;
    os << "[[" << x[0].str() << ',' << x[1].str() << "],[" << x[2].str()
       << ',' << x[3].str() << "]]";
    return os.str();
  }
  RingElement from_text(const std::string& raw) const override {
    const std::string s = strip_spaces(raw);
    const std::string outer = expect_brackets(s, "matrix");
    const auto rows = split_commas(outer);
    if (rows.size() != 2) throw ParseError("expected two rows in '" + raw + "'");
    Mat2Value c;
    for (int r = 0; r < 2; ++r) {
      const auto cells = split_commas(expect_brackets(rows[r], "matrix row"));
      if (cells.size() != 2)
        throw ParseError("expected two entries in row '" + rows[r] + "'");
      for (int j = 0; j < 2; ++j)
        c.a[2 * r + j] = norm_mod(parse_int_strict(cells[j]), p_);
    }
    return wrap(c);
  }

  std::optional<std::vector<RingElement>> enumerate_all() const override {
    if (p_ * p_ * p_ * p_ > 10000) return std::nullopt;
    std::vector<RingElement> out;
    for (Int a = 0; a < p_; ++a)
      for (Int b = 0; b < p_; ++b)
        for (Int c = 0; c < p_; ++c)
          for (Int d = 0; d < p_; ++d)
            out.push_back(wrap(Mat2Value{{a, b, c, d}}));
    return out;
  }

 private:
  static const Mat2Value& val(const RingElement& a) {
    return std::get<Mat2Value>(a.value());
  }
  Int p_;
};

}  // namespace

RingPtr integers() {
  static const RingPtr r = std::make_shared<const IntegerRing>();
  return r;
}

RingPtr zmod(const Int& n) { return std::make_shared<const ZmodRing>(n); }

RingPtr poly_over_z() {
  static const RingPtr r = std::make_shared<const PolyRing>();
  return r;
}

RingPtr mat2_over_zmod(const Int& p) {
  return std::make_shared<const Mat2Ring>(p);
}

RingPtr ring_from_spec(const std::string& raw) {
  const std::string s = strip_spaces(raw);
  if (s == "Z") return integers();
  if (s == "Z[t]") return poly_over_z();
  if (s.rfind("Z/", 0) == 0) return zmod(parse_int_strict(s.substr(2)));
  if (s.rfind("M2(Z/", 0) == 0 && s.back() == ')')
    return mat2_over_zmod(parse_int_strict(s.substr(5, s.size() - 6)));
  throw ParseError("unknown ring spec '" + raw + "' (expected Z, Z/<n>, "
                   "Z[t], or M2(Z/<p>))");
}

CoefficientDerivation poly_ddt(const RingPtr& ring) {
  if (ring->name() != "Z[t]")
    throw UsageError("d/dt is a derivation of Z[t], not of " + ring->name());
  RingPtr r = ring;
  return CoefficientDerivation(
      ring, "d/dt", [r](const RingElement& a) {
        const auto& c = std::get<PolyValue>(a.value()).coeffs;
        std::vector<Int> d;
        for (std::size_t k = 1; k < c.size(); ++k)
          d.push_back(Int(k) * c[k]);
        while (!d.empty() && d.back() == 0) d.pop_back();
        ElementValue v = PolyValue{std::move(d)};
        return RingElement(r, std::move(v));
      });
}

std::vector<CoefficientDerivation> builtin_derivations(const RingPtr& ring) {
  std::vector<CoefficientDerivation> out;
  out.push_back(CoefficientDerivation::zero_derivation(ring));
  if (ring->name() == "Z[t]") out.push_back(poly_ddt(ring));
  return out;
}

CoefficientDerivation derivation_from_name(const RingPtr& ring,
                                           const std::string& name) {
  if (name == "zero") return CoefficientDerivation::zero_derivation(ring);
  if (name == "d/dt") return poly_ddt(ring);
  throw ParseError("unknown coefficient derivation '" + name + "'");
}

}  // namespace matder
