#include "doctest.h"

#include "matder/lie.hpp"
#include "matder/rings_builtin.hpp"

using namespace matder;

namespace {

LieDerivation lie_inner(const RcfOperator& a, LieAmbient amb,
                        Ambient base = Ambient::m_inf) {
  return LieDerivation::from_associative(MatrixDerivation::inner(a, base),
                                         amb);
}

}  // namespace

TEST_CASE("sl membership") {
  RingPtr Z = integers();
  SlMembershipOracle zo{Z};
  CHECK(sl_member(unit(0, 1, Z->one()), zo));
  CHECK(!sl_member(unit(0, 0, Z->one()), zo));
  CHECK(sl_member(sub(unit(0, 0, Z->one()), unit(3, 3, Z->one())), zo));

  RingPtr M = mat2_over_zmod(3);
  SlMembershipOracle mo{M};
  // the coefficient trace 1 + 2 vanishes mod 3
  CHECK(sl_member(unit(0, 0, M->from_text("[[1,0],[0,2]]")), mo));
  CHECK(!sl_member(unit(0, 0, M->one()), mo));
}

TEST_CASE("lie validation clears true derivations") {
  RingPtr Z3 = zmod(3);
  CHECK(lie_validate(lie_inner(shift_operator(Z3), LieAmbient::sl_inf),
                     Window(5), 2, 8)
            .empty());
  RingPtr P = poly_over_z();
  CHECK(lie_validate(
            LieDerivation::from_associative(
                MatrixDerivation::lift(poly_ddt(P), Ambient::m_inf),
                LieAmbient::sl_inf),
            Window(5), 2, 8)
            .empty());
}

TEST_CASE("lie validation flags a planted sign flip") {
  RingPtr Z3 = zmod(3);
  auto good = MatrixDerivation::inner(shift_operator(Z3), Ambient::m_inf);
  // off-diagonal probes negated, diagonal differences left alone: the
  // product rule cannot survive
  auto bad = LieDerivation::black_box(
      Z3, LieAmbient::sl_inf,
      [good](Index i, Index j, const RingElement& r) {
        return neg(good.eval_unit(i, j, r));
      },
      [good, Z3](Index k, Index w) {
        return sub(good.eval_unit(k, k, Z3->one()),
                   good.eval_unit(w, w, Z3->one()));
      },
      std::nullopt);
  bool flagged = false;
  for (std::uint64_t seed = 0; seed < 4; ++seed)
    if (!lie_validate(bad, Window(4), seed, 10).empty()) flagged = true;
  CHECK(flagged);
}

TEST_CASE("off-diagonal extraction via reservoir probes") {
  RingPtr Z = integers();
  auto d1 = lie_inner(to_operator(unit(0, 1, Z->one())), LieAmbient::sl_inf);
  auto v1 = lie_extract_offdiag(d1, Window(3), 9);
  REQUIRE(std::holds_alternative<FiniteMatrix>(v1));
  CHECK(std::get<FiniteMatrix>(v1) == unit(0, 1, Z->one()));

  auto d2 = lie_inner(
      diag_operator(Z, [Z](Index i) { return Z->from_integer(Int(i)); }),
      LieAmbient::sl_inf);
  auto v2 = lie_extract_offdiag(d2, Window(4), 9);
  REQUIRE(std::holds_alternative<FiniteMatrix>(v2));
  CHECK(std::get<FiniteMatrix>(v2).is_zero());

  auto d3 = LieDerivation::from_associative(
      MatrixDerivation::lift(poly_ddt(poly_over_z()), Ambient::m_inf),
      LieAmbient::sl_inf);
  auto v3 = lie_extract_offdiag(d3, Window(4), 9);
  REQUIRE(std::holds_alternative<FiniteMatrix>(v3));
  CHECK(std::get<FiniteMatrix>(v3).is_zero());
}

TEST_CASE("extraction is reservoir-independent for true derivations") {
  RingPtr Z3 = zmod(3);
  FiniteMatrix fin(Z3);
  SampleStream s(Z3, 31);
  SplitMix64 rng(7);
  for (int e = 0; e < 7; ++e)
    fin.set_entry(rng.below(5), rng.below(5), s.next());
  auto D = lie_inner(add(to_operator(fin), shift_operator(Z3)),
                     LieAmbient::sl_inf);
  auto va = lie_extract_offdiag(D, Window(5), 12);
  auto vb = lie_extract_offdiag(D, Window(5), 17);
  REQUIRE(std::holds_alternative<FiniteMatrix>(va));
  REQUIRE(std::holds_alternative<FiniteMatrix>(vb));
  CHECK(std::get<FiniteMatrix>(va) == std::get<FiniteMatrix>(vb));
}

TEST_CASE("lie decomposition over rings with a half element") {
  RingPtr Z3 = zmod(3);
  auto D = lie_inner(shift_operator(Z3), LieAmbient::sl_inf);
  LieDecomposeOptions opt{Window(5)};
  opt.reservoir = 12;
  opt.seed = 7;
  auto rep = lie_decompose(D, opt);
  REQUIRE(rep.status == Status::decomposed);
  CHECK(rep.applicability == "half present");
  CHECK(*rep.v_window == window_of(shift_operator(Z3), Window(5)));
  for (const auto& [i, c] : rep.correction) CHECK(c.is_zero());
  CHECK(rep.residual_description == "zero");

  RingPtr M = mat2_over_zmod(3);
  RingElement m0 = M->from_text("[[1,2],[0,1]]");
  auto Dm = LieDerivation::from_associative(
      MatrixDerivation::sum(
          MatrixDerivation::inner(to_operator(unit(0, 1, M->one())),
                                  Ambient::m_inf),
          MatrixDerivation::lift(inner_ring_derivation(m0), Ambient::m_inf)),
      LieAmbient::sl_inf);
  LieDecomposeOptions opt2{Window(5)};
  opt2.reservoir = 16;
  opt2.seed = 3;
  auto rep2 = lie_decompose(Dm, opt2);
  REQUIRE(rep2.status == Status::decomposed);
  CHECK(*rep2.v_window == unit(0, 1, M->one()));
  SampleStream s(M, 19);
  auto want = inner_ring_derivation(m0);
  for (int t = 0; t < 10; ++t) {
    RingElement x = s.next();
    CHECK((*rep2.residual)(x) == want(x));
  }
}

TEST_CASE("lie decomposition gates on the half element") {
  for (const char* spec : {"Z", "Z/6", "Z[t]"}) {
    RingPtr ring = ring_from_spec(spec);
    auto D = lie_inner(shift_operator(ring), LieAmbient::sl_inf);
    LieDecomposeOptions opt{Window(4)};
    opt.reservoir = 10;
    auto rep = lie_decompose(D, opt);
    CAPTURE(spec);
    CHECK(rep.status == Status::unsupported);
    CHECK(rep.applicability.find("half absent") != std::string::npos);
  }
}

TEST_CASE("gl ambients probe diagonal units directly") {
  RingPtr Z3 = zmod(3);
  auto d = MatrixDerivation::inner(
      diag_operator(Z3, [Z3](Index i) { return Z3->from_integer(Int(i)); }),
      Ambient::m_rcf);
  auto D = LieDerivation::from_associative(d, LieAmbient::gl_rcf);
  CHECK(D.has_diag_units());
  LieDecomposeOptions opt{Window(6)};
  opt.seed = 5;
  auto rep = lie_decompose(D, opt);
  REQUIRE(rep.status == Status::decomposed);
  for (const auto& [i, c] : rep.correction)
    CHECK(c == Z3->from_integer(Int(i)));

  auto Dsl = lie_inner(shift_operator(Z3), LieAmbient::sl_inf);
  CHECK(!Dsl.has_diag_units());
  CHECK_THROWS_AS(Dsl.eval_diag_unit(0, Z3->one()), UsageError);
}

TEST_CASE("brackets of rcf against finite sl members stay in sl") {
  RingPtr M = mat2_over_zmod(3);
  SlMembershipOracle oracle{M};
  SplitMix64 rng(23);
  SampleStream s(M, 29);
  auto a = add(shift_operator(M),
               diag_operator(M, [M](Index i) {
                 return M->from_integer(Int(i) + 2);
               }));
  for (int t = 0; t < 20; ++t) {
    // x: a finite sl member (off-diagonal parts plus a traceless diagonal)
    FiniteMatrix x(M);
    for (int e = 0; e < 4; ++e) {
      Index i = rng.below(5), j = rng.below(5);
      if (i != j) x.add_entry(i, j, s.next());
    }
    RingElement d0 = s.next();
    x.add_entry(0, 0, d0);
    x.add_entry(1, 1, M->neg(d0));
    REQUIRE(sl_member(x, oracle));
    CHECK(sl_member(bracket(a, x), oracle));
  }
}

TEST_CASE("lifting respects brackets") {
  RingPtr M = mat2_over_zmod(5);
  auto u1 = inner_ring_derivation(M->from_text("[[0,1],[0,0]]"));
  auto u2 = inner_ring_derivation(M->from_text("[[1,0],[0,3]]"));
  auto l1 = MatrixDerivation::lift(u1, Ambient::m_inf);
  auto l2 = MatrixDerivation::lift(u2, Ambient::m_inf);
  auto l12 = MatrixDerivation::lift(derivation_commutator(u1, u2),
                                    Ambient::m_inf);
  SampleStream s(M, 37);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j) {
      RingElement r = s.next();
      FiniteMatrix lhs = l12.eval_unit(i, j, r);
      FiniteMatrix rhs = sub(evaluate(l1, l2.eval_unit(i, j, r)),
                             evaluate(l2, l1.eval_unit(i, j, r)));
      CHECK(lhs == rhs);
    }
}
