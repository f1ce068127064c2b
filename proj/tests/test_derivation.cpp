#include "doctest.h"

#include "matder/derivation.hpp"
#include "matder/rings_builtin.hpp"

using namespace matder;

namespace {

RingPtr Z() { return integers(); }
RingElement zi(long long n) { return Z()->from_integer(Int(n)); }

MatrixDerivation inner_diag_n(const RingPtr& ring) {
  RingPtr r = ring;
  return MatrixDerivation::inner(
      diag_operator(ring, [r](Index i) { return r->from_integer(Int(i)); }),
      Ambient::m_inf);
}

bool zero_on_samples(const CoefficientDerivation& u, std::uint64_t seed) {
  SampleStream s(u.ring_ptr(), seed);
  for (int t = 0; t < 12; ++t)
    if (!u(s.next()).is_zero()) return false;
  return true;
}

}  // namespace

TEST_CASE("inner derivations on units") {
  auto d = MatrixDerivation::inner(to_operator(unit(0, 1, zi(1))),
                                   Ambient::m_inf);
  CHECK(d.eval_unit(1, 1, zi(1)) == unit(0, 1, zi(1)));

  auto did = MatrixDerivation::inner(identity_operator(Z()), Ambient::m_inf);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j)
      CHECK(did.eval_unit(i, j, zi(3)).is_zero());

  auto ds = MatrixDerivation::inner(shift_operator(Z()), Ambient::m_inf);
  CHECK(ds.eval_unit(0, 0, zi(1)) == unit(1, 0, zi(1)));
  CHECK(ds.eval_unit(1, 1, zi(1)) ==
        sub(unit(2, 1, zi(1)), unit(1, 0, zi(1))));
}

TEST_CASE("inner over a column-only operator demands the full ambient") {
  auto d = MatrixDerivation::inner(ones_row_operator(Z(), 0));
  CHECK(d.ambient() == Ambient::m_full);
  // probes through the heavy row cannot be certified finite
  CHECK_THROWS_AS(d.eval_unit(1, 0, zi(1)), ProbeError);
  // probes that avoid it are exact: [r0, e_12(1)] = e_02(1) - 0
  CHECK(d.eval_unit(1, 2, zi(1)) == unit(0, 2, zi(1)));

  CHECK_THROWS_AS(
      MatrixDerivation::inner(
          static_cast<const ColumnFiniteOperator&>(shift_operator(Z()))),
      UsageError);
}

TEST_CASE("lifted coefficient derivations") {
  RingPtr P = poly_over_z();
  auto d = MatrixDerivation::lift(poly_ddt(P), Ambient::m_inf);
  RingElement t2 = P->from_text("[0,0,1]");
  CHECK(d.eval_unit(2, 5, t2) == unit(2, 5, P->from_text("[0,2]")));

  auto dz = MatrixDerivation::lift(CoefficientDerivation::zero_derivation(Z()),
                                   Ambient::m_inf);
  CHECK(dz.eval_unit(0, 0, zi(7)).is_zero());

  RingPtr M = mat2_over_zmod(3);
  RingElement r0 = M->from_text("[[0,1],[0,0]]");
  auto dm = MatrixDerivation::lift(inner_ring_derivation(r0), Ambient::m_inf);
  RingElement x = M->from_text("[[0,0],[1,0]]");
  CHECK(dm.eval_unit(1, 3, x) == unit(1, 3, r0 * x - x * r0));
}

TEST_CASE("sums and evaluation by additivity") {
  auto d1 = MatrixDerivation::inner(to_operator(unit(0, 1, zi(1))),
                                    Ambient::m_inf);
  auto d2 = MatrixDerivation::lift(CoefficientDerivation::zero_derivation(Z()),
                                   Ambient::m_inf);
  auto d = MatrixDerivation::sum(d1, d2);

  CHECK(evaluate(d1, unit(1, 1, zi(1))) == unit(0, 1, zi(1)));
  CHECK(evaluate(d, FiniteMatrix(Z())).is_zero());

  FiniteMatrix x(Z());
  x.set_entry(1, 1, zi(2));
  x.set_entry(3, 0, zi(-1));
  CHECK(evaluate(d, x) == add(evaluate(d1, x), evaluate(d2, x)));

  auto dpoly = MatrixDerivation::lift(
      CoefficientDerivation::zero_derivation(poly_over_z()), Ambient::m_inf);
  CHECK_THROWS_AS(MatrixDerivation::sum(d1, dpoly), UsageError);
  auto dfull = MatrixDerivation::lift(
      CoefficientDerivation::zero_derivation(Z()), Ambient::m_full);
  CHECK_THROWS_AS(MatrixDerivation::sum(d1, dfull), UsageError);
}

TEST_CASE("validator clears true derivations") {
  CHECK(validate_derivation(
            MatrixDerivation::inner(shift_operator(Z()), Ambient::m_inf),
            Window(5), 3, 8)
            .empty());
  CHECK(validate_derivation(
            MatrixDerivation::lift(poly_ddt(poly_over_z()), Ambient::m_inf),
            Window(5), 3, 8)
            .empty());
}

TEST_CASE("validator flags a perturbed box") {
  // ad(S) with the (0,0) probe zeroed out: the product rule breaks on
  // instances through e_00
  auto box = MatrixDerivation::black_box(
      Z(), Ambient::m_inf, [](Index i, Index j, const RingElement& r) {
        if (i == 0 && j == 0) return FiniteMatrix(integers());
        return bracket(shift_operator(integers()), unit(i, j, r));
      });
  bool flagged = false;
  for (std::uint64_t seed = 0; seed < 4; ++seed)
    if (!validate_derivation(box, Window(3), seed, 10).empty()) flagged = true;
  CHECK(flagged);
}

TEST_CASE("off-diagonal extraction") {
  auto v1 = extract_v(
      MatrixDerivation::inner(to_operator(unit(0, 1, zi(1))), Ambient::m_inf),
      Window(4));
  REQUIRE(std::holds_alternative<FiniteMatrix>(v1));
  CHECK(std::get<FiniteMatrix>(v1) == unit(0, 1, zi(1)));

  auto v2 = extract_v(inner_diag_n(Z()), Window(4));
  REQUIRE(std::holds_alternative<FiniteMatrix>(v2));
  CHECK(std::get<FiniteMatrix>(v2).is_zero());

  auto v3 = extract_v(
      MatrixDerivation::inner(shift_operator(Z()), Ambient::m_inf), Window(5));
  REQUIRE(std::holds_alternative<FiniteMatrix>(v3));
  CHECK(std::get<FiniteMatrix>(v3) ==
        window_of(shift_operator(Z()), Window(5)));

  // a box with a populated diagonal in d(e_kk(1)) violates the cross shape
  auto bad = MatrixDerivation::black_box(
      Z(), Ambient::m_inf, [](Index i, Index j, const RingElement& r) {
        return unit(i, j, r);  // d(e_kk(1)) = e_kk(1): (k,k) occupied
      });
  auto vb = extract_v(bad, Window(3));
  REQUIRE(std::holds_alternative<EngineRefutation>(vb));
  CHECK(std::get<EngineRefutation>(vb).check == "lemma1_shape");
}

TEST_CASE("coefficient maps") {
  RingPtr P = poly_over_z();
  auto lift_ddt = MatrixDerivation::lift(poly_ddt(P), Ambient::m_inf);
  auto cm = coefficient_map(lift_ddt, 2, 6);
  REQUIRE(std::holds_alternative<CoefficientMap>(cm));
  auto& map26 = std::get<CoefficientMap>(cm);
  RingElement t3 = P->from_text("[0,0,0,1]");
  CHECK(map26(t3) == P->from_text("[0,0,3]"));

  auto dd = inner_diag_n(Z());
  auto cm2 = coefficient_map(dd, 5, 2);
  REQUIRE(std::holds_alternative<CoefficientMap>(cm2));
  CHECK(std::get<CoefficientMap>(cm2)(zi(4)) == zi(12));  // (5-2)*4

  // precondition: d'(e_kk(1)) must vanish
  auto not_killed = MatrixDerivation::inner(to_operator(unit(0, 1, zi(1))),
                                            Ambient::m_inf);
  auto cm3 = coefficient_map(not_killed, 0, 1);
  REQUIRE(std::holds_alternative<EngineRefutation>(cm3));

  // stray support surfaces as a refutation at probe time
  auto stray = MatrixDerivation::black_box(
      Z(), Ambient::m_inf, [](Index i, Index j, const RingElement& r) {
        if (i == j) return FiniteMatrix(integers());
        FiniteMatrix out = unit(i, j, r);
        out.add_entry(0, 7, r);
        return out;
      });
  auto cm4 = coefficient_map(stray, 2, 3);
  REQUIRE(std::holds_alternative<CoefficientMap>(cm4));
  CHECK_THROWS_AS(std::get<CoefficientMap>(cm4)(zi(1)), RefutationError);
}

TEST_CASE("cocycle correction") {
  auto r1 = cocycle_correct(inner_diag_n(Z()), Window(6), 0, 17, 4);
  REQUIRE(std::holds_alternative<CocycleResult>(r1));
  const auto& c1 = std::get<CocycleResult>(r1);
  for (Index i = 0; i < 6; ++i) CHECK(c1.c[i] == zi(i));
  CHECK(zero_on_samples(c1.u, 5));

  RingPtr P = poly_over_z();
  auto r2 = cocycle_correct(MatrixDerivation::lift(poly_ddt(P), Ambient::m_inf),
                            Window(5), 0, 17, 4);
  REQUIRE(std::holds_alternative<CocycleResult>(r2));
  const auto& c2 = std::get<CocycleResult>(r2);
  for (const auto& c : c2.c) CHECK(c.is_zero());
  RingElement t2 = P->from_text("[0,0,1]");
  CHECK(c2.u(t2) == P->from_text("[0,2]"));

  RingPtr ring = Z();
  auto central = MatrixDerivation::inner(
      diag_operator(ring, [ring](Index) { return ring->from_integer(5); }),
      Ambient::m_inf);
  auto r3 = cocycle_correct(central, Window(5), 0, 17, 4);
  REQUIRE(std::holds_alternative<CocycleResult>(r3));
  for (const auto& c : std::get<CocycleResult>(r3).c) CHECK(c.is_zero());
  CHECK(zero_on_samples(std::get<CocycleResult>(r3).u, 6));
}

TEST_CASE("decompose: spec walkthroughs") {
  // mixed inner + lift over Z[t]
  RingPtr P = poly_over_z();
  FiniteMatrix a(P);
  a.set_entry(0, 1, P->one());
  a.set_entry(1, 2, P->from_integer(2));
  auto d = MatrixDerivation::sum(
      MatrixDerivation::inner(to_operator(a), Ambient::m_inf),
      MatrixDerivation::lift(poly_ddt(P), Ambient::m_inf));
  DecomposeOptions opt{Window(6)};
  opt.seed = 11;
  auto rep = decompose(d, opt);
  REQUIRE(rep.status == Status::decomposed);
  CHECK(*rep.v_window == a);
  for (const auto& [i, c] : rep.correction) CHECK(c.is_zero());
  RingElement t = P->from_text("[0,1]");
  CHECK((*rep.residual)(t) == P->one());
  CHECK(rep.residual_description == "([1])*d/dt");

  // the diagonal correction case, frozen
  auto rep2 = decompose(inner_diag_n(Z()), opt);
  REQUIRE(rep2.status == Status::decomposed);
  CHECK(rep2.v_window->is_zero());
  for (const auto& [i, c] : rep2.correction) CHECK(c == zi(i));
  CHECK(rep2.residual_description == "zero");

  // the zero derivation
  auto rep3 = decompose(
      MatrixDerivation::lift(CoefficientDerivation::zero_derivation(Z()),
                             Ambient::m_inf),
      opt);
  REQUIRE(rep3.status == Status::decomposed);
  CHECK(rep3.v_window->is_zero());
  for (const auto& [i, c] : rep3.correction) CHECK(c.is_zero());
  CHECK(rep3.residual_description == "zero");
}

TEST_CASE("decompose: nested windows agree") {
  RingPtr M = mat2_over_zmod(3);
  FiniteMatrix fin(M);
  SampleStream s(M, 91);
  SplitMix64 rng(17);
  for (int e = 0; e < 8; ++e)
    fin.set_entry(rng.below(6), rng.below(6), s.next());
  auto a = add(to_operator(fin), shift_operator(M));
  auto d = MatrixDerivation::sum(
      MatrixDerivation::inner(a, Ambient::m_inf),
      MatrixDerivation::lift(inner_ring_derivation(s.next()), Ambient::m_inf));

  DecomposeOptions small{Window(4)};
  small.seed = 5;
  DecomposeOptions large{Window(7)};
  large.seed = 5;
  auto rs = decompose(d, small);
  auto rl = decompose(d, large);
  REQUIRE(rs.status == Status::decomposed);
  REQUIRE(rl.status == Status::decomposed);
  CHECK(*rs.v_window == window_of(*rl.v_window, Window(4)));
  for (Index i = 0; i < 4; ++i)
    CHECK(rs.correction[i].second == rl.correction[i].second);
}

TEST_CASE("decompose: lifts extract a zero off-diagonal part exactly") {
  RingPtr P = poly_over_z();
  auto rep = decompose(MatrixDerivation::lift(poly_ddt(P), Ambient::m_inf),
                       DecomposeOptions{Window(6)});
  REQUIRE(rep.status == Status::decomposed);
  CHECK(rep.v_window->is_zero());
}

TEST_CASE("decompose: refutations carry the failing check and witness") {
  // a finite inner part whose row 0 is too dense for the probe budget is
  // flagged by the row probe; the verdict is scoped to the scanned columns
  FiniteMatrix heavy(Z());
  for (Index k = 1; k < 16; ++k) heavy.set_entry(0, k, zi(1));
  auto d = MatrixDerivation::inner(to_operator(heavy), Ambient::m_inf);
  auto rep = decompose(d, DecomposeOptions{Window(6)});
  CHECK(rep.status == Status::refuted);
  CHECK(rep.failure_reason == "lemma3_row_probe");
  REQUIRE(!rep.checks.empty());
  CHECK(rep.checks.back().outcome == "fail");

  // ambient M_full skips the row probe and decomposes the same input
  auto dfull = MatrixDerivation::inner(
      static_cast<const RcfOperator&>(to_operator(heavy)), Ambient::m_full);
  auto repf = decompose(dfull, DecomposeOptions{Window(6)});
  CHECK(repf.status == Status::decomposed);
  bool skipped = false;
  for (const auto& c : repf.checks)
    if (c.name == "lemma3_row_probe" && c.outcome == "skipped") skipped = true;
  CHECK(skipped);
}

TEST_CASE("decompose: adversarial boxes land in the right buckets") {
  DecomposeOptions opt{Window(4)};
  opt.seed = 3;

  // wrong-ring values: not certifiable, inconclusive
  auto wrong_ring = MatrixDerivation::black_box(
      Z(), Ambient::m_inf, [](Index i, Index j, const RingElement&) {
        return unit(i, j, poly_over_z()->one());
      });
  CHECK(decompose(wrong_ring, opt).status == Status::inconclusive);

  // a throwing box: black-box failure, inconclusive
  auto throwing = MatrixDerivation::black_box(
      Z(), Ambient::m_inf,
      [](Index, Index, const RingElement&) -> FiniteMatrix {
        throw std::runtime_error("backend unavailable");
      });
  auto rept = decompose(throwing, opt);
  CHECK(rept.status == Status::inconclusive);
  CHECK(rept.failure_reason.find("backend unavailable") != std::string::npos);

  // shape-consistent but cocycle-inconsistent coefficient maps:
  // d(e_ij(r)) = e_ij((i-j)^2 r) kills every e_kk(1) yet cannot come from
  // any derivation
  auto square_gap = MatrixDerivation::black_box(
      Z(), Ambient::m_inf, [](Index i, Index j, const RingElement& r) {
        const long long gap = static_cast<long long>(i > j ? i - j : j - i);
        return unit(i, j, integers()->from_integer(Int(gap) * Int(gap)) * r);
      });
  auto repc = decompose(square_gap, opt);
  CHECK(repc.status == Status::refuted);
  CHECK((repc.failure_reason == "cocycle_identity" ||
         repc.failure_reason == "unit_leibniz"));

  // coefficient maps that agree at 1 but depend on the pair elsewhere
  // (left vs right multiplication by a non-central element)
  RingPtr M = mat2_over_zmod(3);
  RingElement g = M->from_text("[[0,1],[0,0]]");
  auto sided = MatrixDerivation::black_box(
      M, Ambient::m_inf, [M, g](Index i, Index j, const RingElement& r) {
        if (i == j) return FiniteMatrix(M);
        return i < j ? unit(i, j, g * r) : unit(i, j, r * g);
      });
  auto reps = decompose(sided, opt);
  CHECK(reps.status == Status::refuted);

  // stray support outside the probed unit
  auto stray = MatrixDerivation::black_box(
      Z(), Ambient::m_inf, [](Index i, Index j, const RingElement& r) {
        FiniteMatrix out(integers());
        if (i == 2 && j == 3) out.add_entry(0, 7, r);
        return out;
      });
  auto repst = decompose(stray, opt);
  CHECK(repst.status == Status::refuted);
}

TEST_CASE("decompose: base-index normalization and tiny windows") {
  DecomposeOptions opt{Window(6)};
  opt.i0 = 3;
  auto rep = decompose(inner_diag_n(Z()), opt);
  REQUIRE(rep.status == Status::decomposed);
  for (const auto& [i, c] : rep.correction)
    CHECK(c == zi(static_cast<long long>(i) - 3));  // c(i0) = 0

  CHECK(decompose(MatrixDerivation::inner(shift_operator(Z()), Ambient::m_rcf),
                  DecomposeOptions{Window(1)})
            .status == Status::decomposed);
  CHECK_THROWS_AS(decompose(inner_diag_n(Z()), [] {
                    DecomposeOptions o{Window(4)};
                    o.i0 = 4;
                    return o;
                  }()),
                  UsageError);
}

TEST_CASE("decompose: probe budget exhaustion is inconclusive") {
  DecomposeOptions opt{Window(6)};
  opt.probe_budget = 10;
  auto rep = decompose(
      MatrixDerivation::inner(shift_operator(Z()), Ambient::m_inf), opt);
  CHECK(rep.status == Status::inconclusive);
  CHECK(rep.failure_reason.find("budget") != std::string::npos);
}

TEST_CASE("decompose: column-only inner over the full ring is inconclusive") {
  auto rep = decompose(MatrixDerivation::inner(ones_row_operator(Z(), 0)),
                       DecomposeOptions{Window(4)});
  CHECK(rep.status == Status::inconclusive);
}

TEST_CASE("round-trip property on a small random corpus") {
  for (const char* spec : {"Z/6", "M2(Z/3)"}) {
    RingPtr ring = ring_from_spec(spec);
    for (std::uint64_t k = 0; k < 6; ++k) {
      SplitMix64 rng(derive_seed(k, spec));
      SampleStream s(ring, derive_seed(k, "elems"));
      FiniteMatrix fin(ring);
      for (int e = 0; e < 6; ++e)
        fin.set_entry(rng.below(5), rng.below(5), s.next());
      RcfOperator a = to_operator(fin);
      if (rng.below(2)) a = add(a, shift_operator(ring));
      auto d = MatrixDerivation::inner(a, Ambient::m_inf);
      DecomposeOptions opt{Window(5)};
      opt.seed = k;
      opt.trials = 2;
      auto rep = decompose(d, opt);
      CAPTURE(spec);
      CAPTURE(k);
      CHECK(rep.status == Status::decomposed);
    }
  }
}

TEST_CASE("validator stays silent on constructed derivations, every seed") {
  // in particular the antisymmetry check never fires for honest inputs
  RingPtr M = mat2_over_zmod(3);
  SampleStream s(M, 57);
  auto d = MatrixDerivation::sum(
      MatrixDerivation::inner(
          add(add(to_operator(unit(0, 3, s.next())), shift_operator(M)),
              diag_operator(M, [M](Index i) { return M->from_integer(Int(i)); })),
          Ambient::m_inf),
      MatrixDerivation::lift(inner_ring_derivation(s.next()), Ambient::m_inf));
  for (std::uint64_t seed = 0; seed < 12; ++seed)
    CHECK(validate_derivation(d, Window(5), seed, 4).empty());
}

TEST_CASE("window report JSON shape") {
  json j = window_report_json(window_of(shift_operator(Z()), Window(3)), 3);
  CHECK(j["bound"] == 3);
  REQUIRE(j["entries"].size() == 2);
  CHECK(j["entries"][0] == json::array({1, 0, "1"}));
  CHECK(j["entries"][1] == json::array({2, 1, "1"}));
}

TEST_CASE("report JSON carries the contract fields") {
  auto rep = decompose(inner_diag_n(Z()), DecomposeOptions{Window(4)});
  json j = rep.to_json();
  CHECK(j["status"] == "decomposed");
  CHECK(j["window"] == 4);
  CHECK(j["ring"] == "Z");
  CHECK(j["v_entries"].is_array());
  CHECK(j["correction"].size() == 4);
  CHECK(j["checks"].is_array());
  CHECK(j.dump() == rep.to_json().dump());  // deterministic rendering
}
