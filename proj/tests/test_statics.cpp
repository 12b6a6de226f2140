#include "doctest.h"

#include "statics.hpp"

using namespace qc;

namespace {

LocationTable abc_table() {
  LocationTable t;
  t.codes = {{0, "A"}, {1, "B"}, {2, "M"}, {3, "C"}};
  t.fallback = "C";
  return t;
}

LocSetPtr sA() { return ls_sng(Location("A")); }
LocSetPtr sB() { return ls_sng(Location("B")); }
LocSetPtr sAB() { return ls_of(std::vector<Location>{"A", "B"}); }

// repr(L): L's code ascribed at the location type {L}.
LTermPtr repr_loc(const Location& l, const LocationTable& t) {
  return le_ascribe(le_lit(*t.code_of(l)), lt_loc(ls_sng(l)));
}

}  // namespace

TEST_CASE("kinding of choreography types") {
  CHECK(kind_of({}, ct_at(lt_int(), sA())) == Kind::Star);
  CHECK(kind_of({}, ct_set(ls_union(sA(), sB()))) == Kind::StarSet);
  CHECK_FALSE(kind_of({}, ct_var("a")).has_value());
  CHECK(kind_of({{"a", Kind::StarLoc}}, ct_set(ls_sng(LocExpr::var("a")))) == Kind::StarSet);
  CHECK(kind_of({}, ct_loc(LocExpr::concrete("A"))) == Kind::StarLoc);
  CHECK(kind_of({}, ct_forall("a", Kind::StarLoc,
                              ct_at(lt_int(), ls_sng(LocExpr::var("a"))))) == Kind::Star);
  CHECK_FALSE(kind_of({}, ct_at(lt_int(), ls_var("r"))).has_value());
  CHECK(kind_of({}, ct_mu("x", ct_sum(ct_at(lt_int(), sA()), ct_var("x")))) == Kind::Star);
}

TEST_CASE("context restriction by namespace") {
  auto table = abc_table();
  ChorLocalCtx sigma;
  CHECK(sigma_project(sigma, sA()).empty());
  sigma.push_back({sAB(), "x", lt_int()});
  auto at_a = sigma_project(sigma, sA());
  REQUIRE(at_a.size() == 1);
  CHECK(at_a[0].first == "x");
  sigma.clear();
  sigma.push_back({sB(), "x", lt_int()});
  CHECK(sigma_project(sigma, sA()).empty());
}

TEST_CASE("typing basic forms") {
  auto table = abc_table();
  auto t = type_of({}, {}, {}, c_done(sA(), le_lit(5)), table);
  REQUIRE(t.has_value());
  CHECK(ct_equal(*t, ct_at(lt_int(), sA())));

  // A.(2+3) ~> B : int @ {A,B}
  auto send = c_send(c_done(sA(), le_add(le_lit(2), le_lit(3))),
                     LocExpr::concrete("A"), sB());
  auto ts = type_of({}, {}, {}, send, table);
  REQUIRE(ts.has_value());
  CHECK(ct_equal(*ts, ct_at(lt_int(), sAB())));

  // Only a holder of the value may send it.
  std::string diag;
  auto bad = c_send(c_done(sA(), le_lit(1)), LocExpr::concrete("B"), sB());
  CHECK_FALSE(type_of({}, {}, {}, bad, table, &diag).has_value());
  CHECK(diag.find("T-Send") != std::string::npos);
}

TEST_CASE("local let requires access") {
  auto table = abc_table();
  auto ok = c_let_local(sA(), "x", lt_int(), c_done(sAB(), le_lit(1)),
                        c_done(sA(), le_var("x")));
  REQUIRE(type_of({}, {}, {}, ok, table).has_value());

  auto bad = c_let_local(sAB(), "x", lt_int(), c_done(sA(), le_lit(1)),
                         c_done(sA(), le_var("x")));
  std::string diag;
  CHECK_FALSE(type_of({}, {}, {}, bad, table, &diag).has_value());
  CHECK(diag.find("T-LetLocal") != std::string::npos);
}

TEST_CASE("type-let accepts the resolved-at-B program") {
  auto table = abc_table();
  // let {A,B}.a := {A,B}.repr(A) in let B.x := (a.(1+1) ~> B) in B.x : int @ B
  auto alpha = ls_sng(LocExpr::var("a"));
  auto body =
      c_let_local(sB(), "x", lt_int(),
                  c_send(c_done(alpha, le_add(le_lit(1), le_lit(1))),
                         LocExpr::var("a"), sB()),
                  c_done(sB(), le_var("x")));
  auto prog = c_let_type(sAB(), "a", Kind::StarLoc,
                         c_done(sAB(), repr_loc("A", table)), body);
  auto t = type_of({}, {}, {}, prog, table);
  REQUIRE(t.has_value());
  CHECK(ct_equal(*t, ct_at(lt_int(), sB())));
}

TEST_CASE("type-let rejects an escaping variable") {
  auto table = abc_table();
  // let A.a := A.repr(A) in a.(1+1) has type int @ a, which escapes.
  auto alpha = ls_sng(LocExpr::var("a"));
  auto prog = c_let_type(sA(), "a", Kind::StarLoc,
                         c_done(sA(), repr_loc("A", table)),
                         c_done(alpha, le_add(le_lit(1), le_lit(1))));
  std::string diag;
  CHECK_FALSE(type_of({}, {}, {}, prog, table, &diag).has_value());
  CHECK(diag.find("escapes") != std::string::npos);
}

TEST_CASE("type-let rejects binders outside the resolution bound") {
  auto table = abc_table();
  // rho1 = {A,B} but rho2 = {M,B,C}: the selected worker might not bind a.
  auto rho1 = sAB();
  auto rho2 = ls_of(std::vector<Location>{"M", "B", "C"});
  auto rho3 = ls_of(std::vector<Location>{"M", "A", "B", "C"});
  auto rep = le_ascribe(le_lit(0), lt_loc(rho1));
  auto prog = c_let_type(rho2, "a", Kind::StarLoc, c_done(rho3, rep),
                         c_done(rho3, le_lit(1)));
  std::string diag;
  CHECK_FALSE(type_of({}, {}, {}, prog, table, &diag).has_value());
  CHECK(diag.find("T-LetLoc") != std::string::npos);
}

TEST_CASE("if requires the deciders to know the condition") {
  auto table = abc_table();
  auto cond = c_done(sA(), le_true());
  auto ok = c_if(sA(), cond, c_done(sA(), le_lit(1)), c_done(sA(), le_lit(2)));
  REQUIRE(type_of({}, {}, {}, ok, table).has_value());
  auto bad = c_if(sAB(), cond, c_done(sA(), le_lit(1)), c_done(sA(), le_lit(2)));
  std::string diag;
  CHECK_FALSE(type_of({}, {}, {}, bad, table, &diag).has_value());
  CHECK(diag.find("T-If") != std::string::npos);
}

TEST_CASE("functions, polymorphism, sums and recursion") {
  auto table = abc_table();
  auto intA = ct_at(lt_int(), sA());
  auto f = c_fun("F", "X", ct_arrow(intA, intA), c_var("X"));
  auto tf = type_of({}, {}, {}, f, table);
  REQUIRE(tf.has_value());
  auto app = c_app(f, c_done(sA(), le_lit(1)));
  REQUIRE(type_of({}, {}, {}, app, table).has_value());

  auto poly = c_tyabs("a", Kind::StarLoc,
                      c_done(ls_sng(LocExpr::var("a")), le_lit(9)));
  auto tp = type_of({}, {}, {}, poly, table);
  REQUIRE(tp.has_value());
  auto inst = c_tyapp(poly, ct_loc(LocExpr::concrete("B")));
  auto ti = type_of({}, {}, {}, inst, table);
  REQUIRE(ti.has_value());
  CHECK(ct_equal(*ti, ct_at(lt_int(), sB())));

  auto sum = ct_sum(intA, ct_at(lt_bool(), sA()));
  auto inj = c_inl(sum, c_done(sA(), le_lit(1)));
  auto cs = c_case(inj, "X", c_done(sA(), le_lit(0)), "Y", c_done(sA(), le_lit(1)));
  auto tc = type_of({}, {}, {}, cs, table);
  REQUIRE(tc.has_value());
  CHECK(ct_equal(*tc, intA));

  auto mu = ct_mu("r", ct_sum(intA, ct_var("r")));
  auto folded = c_fold(mu, c_inl(ct_sum(intA, mu), c_done(sA(), le_lit(3))));
  auto tm = type_of({}, {}, {}, folded, table);
  REQUIRE(tm.has_value());
  auto tu = type_of({}, {}, {}, c_unfold(folded), table);
  REQUIRE(tu.has_value());
  CHECK(ct_equal(*tu, ct_sum(intA, mu)));
}

TEST_CASE("context well-formedness and weakening") {
  auto table = abc_table();
  CHECK(ctx_wf({}, {}, {}));
  CHECK_FALSE(ctx_wf({}, {{"X", ct_var("a")}}, {}));
  CHECK(ctx_wf({}, {}, {{sA(), "x", lt_int()}}));

  auto send = c_send(c_done(sA(), le_add(le_lit(2), le_lit(3))),
                     LocExpr::concrete("A"), sB());
  auto base = type_of({}, {}, {}, send, table);
  auto widened = type_of({{"z", Kind::Star}}, {{"Q", ct_at(lt_int(), sB())}},
                         {{sB(), "w", lt_bool()}}, send, table);
  REQUIRE(base.has_value());
  REQUIRE(widened.has_value());
  CHECK(ct_equal(*base, *widened));
}
