#include "doctest.h"

#include "project.hpp"
#include "statics.hpp"

using namespace qc;

namespace {

LocationTable abc_table() {
  LocationTable t;
  t.codes = {{0, "A"}, {1, "B"}, {2, "C"}, {3, "M"}};
  t.fallback = "C";
  return t;
}

LocSetPtr sA() { return ls_sng(Location("A")); }
LocSetPtr sB() { return ls_sng(Location("B")); }

// A.(2+3) ~> B
ChorPtr simple_send() {
  return c_send(c_done(sA(), le_add(le_lit(2), le_lit(3))), LocExpr::concrete("A"), sB());
}

// if A.e then (sync A[left] ~> {B}; B.1) else (sync A[right] ~> {B}; B.2)
ChorPtr if_sync() {
  auto then_c = c_sync(LocExpr::concrete("A"), true, sB(), c_done(sB(), le_lit(1)));
  auto else_c = c_sync(LocExpr::concrete("A"), false, sB(), c_done(sB(), le_lit(2)));
  auto cond = c_done(sA(), le_eq(le_lit(1), le_lit(1)));
  return c_if(sA(), cond, then_c, else_c);
}

}  // namespace

TEST_CASE("merging one-sided external choices") {
  auto l1 = n_allow(LocExpr::concrete("A"), n_ret(le_lit(1)), nullptr);
  auto r2 = n_allow(LocExpr::concrete("A"), nullptr, n_ret(le_lit(2)));
  auto m = merge(l1, r2);
  REQUIRE(m.has_value());
  CHECK(net_equal(*m, n_allow(LocExpr::concrete("A"), n_ret(le_lit(1)), n_ret(le_lit(2)))));

  // shared branches merge recursively
  auto again = merge(l1, n_allow(LocExpr::concrete("A"), n_ret(le_lit(1)), nullptr));
  REQUIRE(again.has_value());
  CHECK(net_equal(*again, l1));

  // mismatched payloads have no common behavior
  CHECK_FALSE(merge(n_ret(le_lit(1)), n_ret(le_lit(2))).has_value());
  CHECK_FALSE(merge(n_unit(), n_ret(le_lit(1))).has_value());
}

TEST_CASE("merge is idempotent on assorted programs") {
  std::vector<NetPtr> progs = {
      n_unit(),
      n_ret(le_add(le_lit(2), le_lit(3))),
      n_seq(n_ret(le_lit(1)), n_recv(LocExpr::concrete("A"))),
      n_fun("F", "X", n_app(n_var("F"), n_var("X"))),
      n_allow(LocExpr::concrete("A"), n_ret(le_lit(1)), nullptr),
      n_choose(true, sB(), n_unit()),
      n_am_i_in(ls_var("r"), n_ret(le_lit(1)), n_unit()),
  };
  for (const auto& p : progs) {
    auto m = merge(p, p);
    REQUIRE(m.has_value());
    CHECK(net_equal(*m, p));
  }
}

TEST_CASE("collapsing sequence") {
  CHECK(net_equal(seq_collapse(n_unit(), n_ret(le_lit(5))), n_ret(le_lit(5))));
  auto busy = n_ret(le_add(le_lit(2), le_lit(3)));
  auto s = seq_collapse(busy, n_recv(LocExpr::concrete("A")));
  CHECK(net_equal(s, n_seq(busy, n_recv(LocExpr::concrete("A")))));
}

TEST_CASE("projecting a point-to-point send") {
  auto c = simple_send();
  auto at_a = project(c, "A");
  REQUIRE(at_a.has_value());
  CHECK(net_equal(*at_a, n_send(n_ret(le_add(le_lit(2), le_lit(3))), sB())));
  auto at_b = project(c, "B");
  REQUIRE(at_b.has_value());
  CHECK(net_equal(*at_b, n_recv(LocExpr::concrete("A"))));
  auto at_c = project(c, "C");
  REQUIRE(at_c.has_value());
  CHECK(net_equal(*at_c, n_unit()));
}

TEST_CASE("uninvolved locations collapse a local let") {
  auto c = c_let_local(sA(), "x", lt_int(), c_done(sA(), le_lit(7)),
                       c_done(sB(), le_add(le_lit(2), le_lit(3))));
  auto at_b = project(c, "B");
  REQUIRE(at_b.has_value());
  CHECK(net_equal(*at_b, n_ret(le_add(le_lit(2), le_lit(3)))));
}

TEST_CASE("branch merging across an if") {
  auto c = if_sync();
  auto at_b = project(c, "B");
  REQUIRE(at_b.has_value());
  CHECK(net_equal(*at_b,
                  n_allow(LocExpr::concrete("A"), n_ret(le_lit(1)), n_ret(le_lit(2)))));
  auto at_a = project(c, "A");
  REQUIRE(at_a.has_value());
  REQUIRE((*at_a)->k == Net::K::Ite);
  CHECK((*at_a)->b->k == Net::K::Choose);
  CHECK((*at_a)->c->k == Net::K::Choose);
}

TEST_CASE("unmergeable branches fail with a path") {
  auto cond = c_done(sA(), le_true());
  auto c = c_if(sA(), cond, c_done(sB(), le_lit(1)), c_done(sB(), le_lit(2)));
  ProjectionFailure f;
  CHECK_FALSE(project(c, "B", &f).has_value());
  CHECK(f.reason == ProjectionFailure::Reason::MergeUndefined);
  CHECK(projection_failure_to_string(f).find("merge-undefined") == 0);
}

TEST_CASE("a bound local name may not leak to outsiders") {
  auto c = c_let_local(sA(), "x", lt_int(), c_done(sA(), le_lit(7)),
                       c_done(sB(), le_var("x")));
  ProjectionFailure f;
  CHECK_FALSE(project(c, "B", &f).has_value());
  CHECK(f.reason == ProjectionFailure::Reason::NamespaceVariableUnresolved);
}

TEST_CASE("a bound type variable may not leak to outsiders") {
  auto rep = le_ascribe(le_lit(0), lt_loc(sA()));
  auto c = c_let_type(sA(), "a", Kind::StarLoc, c_done(sA(), rep),
                      c_done(sB(), le_lit(1)));
  // B is outside the binder but its body does not mention a: fine.
  REQUIRE(project(c, "B").has_value());
  auto leak = c_let_type(sA(), "a", Kind::StarLoc, c_done(sA(), rep),
                         c_send(c_done(sA(), le_lit(1)), LocExpr::concrete("A"),
                                ls_sng(LocExpr::var("a"))));
  ProjectionFailure f;
  CHECK_FALSE(project(leak, "B", &f).has_value());
  CHECK(f.reason == ProjectionFailure::Reason::FreeTypevarInBody);
}

TEST_CASE("binders of a type-let condition on the resolved value") {
  auto rep = le_ascribe(le_lit(0), lt_loc(ls_of(std::vector<Location>{"A", "B"})));
  auto rho = ls_of(std::vector<Location>{"A", "B"});
  auto c = c_let_type(rho, "a", Kind::StarLoc, c_done(rho, rep),
                      c_done(ls_sng(LocExpr::var("a")), le_lit(9)));
  auto at_a = project(c, "A");
  REQUIRE(at_a.has_value());
  REQUIRE((*at_a)->k == Net::K::LetType);
  auto body = (*at_a)->b;
  REQUIRE(body->k == Net::K::AmIIn);
  // if a resolves to A, run the computation; otherwise stay idle
  CHECK(net_equal(body->a, n_ret(le_lit(9))));
  CHECK(net_equal(body->b, n_unit()));
}

TEST_CASE("values project to values everywhere") {
  auto vals = {
      c_done(sA(), le_lit(5)),
      c_pair(c_done(sA(), le_lit(1)), c_done(sB(), le_lit(2))),
      c_fun("F", "X", ct_at(lt_int(), sA()), c_var("X")),
      c_inl(ct_sum(ct_at(lt_int(), sA()), ct_at(lt_int(), sA())), c_done(sA(), le_lit(1))),
  };
  for (const auto& v : vals)
    for (const Location& l : {"A", "B", "C"}) {
      auto p = project(v, l);
      REQUIRE(p.has_value());
      CHECK(net_is_value(*p));
    }
}

TEST_CASE("system projection covers bystanders") {
  auto sys = project_system(simple_send(), {"A", "B", "C"});
  REQUIRE(sys.has_value());
  CHECK(sys->size() == 3);
  CHECK(net_equal(sys->at("C"), n_unit()));
  CHECK_FALSE(project_system(simple_send(), {}).has_value());
}

TEST_CASE("order relation basics") {
  auto r5 = n_ret(le_lit(5));
  CHECK(leq(r5, r5));
  CHECK(leq(r5, n_seq(n_unit(), r5)));
  CHECK_FALSE(leq(n_seq(n_unit(), r5), r5));
  auto one = n_allow(LocExpr::concrete("A"), n_ret(le_lit(1)), nullptr);
  auto both = n_allow(LocExpr::concrete("A"), n_ret(le_lit(1)), n_ret(le_lit(2)));
  CHECK(leq(one, both));
  CHECK_FALSE(leq(both, one));
  CHECK_FALSE(leq(r5, n_ret(le_lit(6))));
  CHECK(leq_system({{"A", one}}, {{"A", both}}));
  CHECK_FALSE(leq_system({{"A", one}}, {{"B", both}}));
}

TEST_CASE("merge bounds its arguments from above") {
  auto l1 = n_allow(LocExpr::concrete("A"), n_ret(le_lit(1)), nullptr);
  auto r2 = n_allow(LocExpr::concrete("A"), nullptr, n_ret(le_lit(2)));
  auto m = merge(l1, r2);
  REQUIRE(m.has_value());
  CHECK(leq(l1, *m));
  CHECK(leq(r2, *m));
}

TEST_CASE("projected send runs to delivery") {
  auto table = abc_table();
  auto sys = project_system(simple_send(), {"A", "B"});
  REQUIRE(sys.has_value());
  auto g = explore(*sys, table, 10);
  REQUIRE(g.all_values.size() == 1);
  CHECK(g.deadlocked.empty());
  CHECK(g.frontier.empty());
  auto term = g.states[g.all_values[0]];
  CHECK(net_equal(term.at("A"), n_ret(le_lit(5))));
  CHECK(net_equal(term.at("B"), n_ret(le_lit(5))));
  auto sim = simulate(*sys, table, 10, NetScheduler::Leftmost);
  CHECK(sim.status == SimReport::Status::AllValues);
  CHECK(sim.trace.size() == 2);
}

TEST_CASE("process polymorphism projects to identity-aware programs") {
  // tyfun a :: loc => a.5
  auto poly = c_tyabs("a", Kind::StarLoc, c_done(ls_sng(LocExpr::var("a")), le_lit(5)));
  auto at_a = project(poly, "A");
  REQUIRE(at_a.has_value());
  REQUIRE((*at_a)->k == Net::K::TyAbs);
  auto body = (*at_a)->a;
  REQUIRE(body->k == Net::K::AmIIn);
  CHECK(net_equal(body->a, n_ret(le_lit(5))));
  CHECK(net_equal(body->b, n_unit()));

  // instantiating at B and running: only B computes
  auto table = abc_table();
  auto inst = c_tyapp(poly, ct_loc(LocExpr::concrete("B")));
  auto sys = project_system(inst, {"A", "B"});
  REQUIRE(sys.has_value());
  auto sim = simulate(*sys, table, 20, NetScheduler::Leftmost);
  REQUIRE(sim.status == SimReport::Status::AllValues);
  CHECK(net_equal(sim.final.at("B"), n_ret(le_lit(5))));
  CHECK(net_equal(sim.final.at("A"), n_unit()));
}
