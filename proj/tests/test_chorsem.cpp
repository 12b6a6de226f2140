#include "doctest.h"

#include "chorsem.hpp"
#include "statics.hpp"

using namespace qc;

namespace {

LocationTable mabc_table() {
  LocationTable t;
  t.codes = {{0, "A"}, {1, "B"}, {2, "C"}, {3, "M"}, {4, "L"}};
  t.fallback = "C";
  return t;
}

LocSetPtr sA() { return ls_sng(Location("A")); }
LocSetPtr sB() { return ls_sng(Location("B")); }
LocSetPtr sC() { return ls_sng(Location("C")); }
LocSetPtr sM() { return ls_sng(Location("M")); }
LocSetPtr sL() { return ls_sng(Location("L")); }
LocSetPtr sAlpha() { return ls_sng(LocExpr::var("a")); }

// let {M,A,B,C}.a := M.(if 1 < 2 then "A" else "B") ~> {A,B,C}
// in let C.r := (a.(2+3) ~> C) in C.r
ChorPtr balancer() {
  auto pick = le_ascribe(le_if(le_lt(le_lit(1), le_lit(2)), le_lit(0), le_lit(1)),
                         lt_loc(ls_of(std::vector<Location>{"A", "B"})));
  auto announce = c_send(c_done(sM(), pick), LocExpr::concrete("M"),
                         ls_of(std::vector<Location>{"A", "B", "C"}));
  auto work = c_send(c_done(sAlpha(), le_add(le_lit(2), le_lit(3))),
                     LocExpr::var("a"), sC());
  auto body = c_let_local(sC(), "r", lt_int(), work, c_done(sC(), le_var("r")));
  auto everyone = ls_of(std::vector<Location>{"M", "A", "B", "C"});
  return c_let_type(everyone, "a", Kind::StarLoc, announce, body);
}

// let a.x := a.2 in let L.x := L.3 in let a.y := (L.x ~> a) in a.(x + y)
ChorPtr capture_example() {
  auto body = c_done(sAlpha(), le_add(le_var("x"), le_var("y")));
  auto send = c_send(c_done(sL(), le_var("x")), LocExpr::concrete("L"), sAlpha());
  auto let3 = c_let_local(sAlpha(), "y", lt_int(), send, body);
  auto let2 = c_let_local(sL(), "x", lt_int(), c_done(sL(), le_lit(3)), let3);
  return c_let_local(sAlpha(), "x", lt_int(), c_done(sAlpha(), le_lit(2)), let2);
}

}  // namespace

TEST_CASE("a collecting send is a single step to the union") {
  auto table = mabc_table();
  auto c = c_send(c_done(sA(), le_lit(3)), LocExpr::concrete("A"),
                  ls_of(std::vector<Location>{"B", "C"}));
  auto steps = enabled_steps(c, table);
  REQUIRE(steps.size() == 1);
  REQUIRE(steps[0].next->k == Chor::K::Done);
  auto g = ground_set(steps[0].next->rho);
  REQUIRE(g.has_value());
  CHECK(*g == std::set<Location>{"A", "B", "C"});
  CHECK(le_equal(steps[0].next->e, le_lit(3)));
  CHECK(steps[0].r->k == Redex::K::Send);
}

TEST_CASE("sends only fire once the target set and sender are concrete") {
  auto table = mabc_table();
  auto symbolic = c_send(c_done(sA(), le_lit(3)), LocExpr::concrete("A"),
                         ls_var("r"));
  CHECK(enabled_steps(symbolic, table).empty());
  auto var_sender = c_send(c_done(sAlpha(), le_lit(3)), LocExpr::var("a"), sB());
  CHECK(enabled_steps(var_sender, table).empty());
}

TEST_CASE("dynamic worker selection runs to the right place") {
  auto table = mabc_table();
  auto prog = balancer();

  auto t = type_of({}, {}, {}, prog, table);
  REQUIRE(t.has_value());
  CHECK(ct_equal(*t, ct_at(lt_int(), sC())));

  // First the manager resolves its pick, then announces it to everyone.
  auto run1 = run_chor(prog, table, 3, ChorStrategy::Leftmost);
  REQUIRE(run1.trace.size() == 3);
  auto after_announce = run1.final;
  REQUIRE(after_announce->k == Chor::K::LetType);
  REQUIRE(after_announce->a->k == Chor::K::Done);
  auto g = ground_set(after_announce->a->rho);
  REQUIRE(g.has_value());
  CHECK(*g == std::set<Location>{"M", "A", "B", "C"});

  // Reifying the representation rewrites the body to run at A.
  auto steps = enabled_steps(after_announce, table);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].r->k == Redex::K::LetTy);
  auto resolved = steps[0].next;
  auto work = c_send(c_done(sA(), le_add(le_lit(2), le_lit(3))),
                     LocExpr::concrete("A"), sC());
  CHECK(c_equal(resolved,
                c_let_local(sC(), "r", lt_int(), work, c_done(sC(), le_var("r")))));

  auto run = run_chor(prog, table, 100, ChorStrategy::Leftmost);
  CHECK(run.status == ChorRun::Status::Value);
  CHECK(c_equal(run.final, c_done(sC(), le_lit(5))));
}

TEST_CASE("scheduling strategy does not change the answer") {
  auto table = mabc_table();
  auto prog = balancer();
  auto expect = c_done(sC(), le_lit(5));
  for (uint32_t seed = 0; seed < 8; ++seed) {
    auto run = run_chor(prog, table, 200, ChorStrategy::Random, seed);
    CHECK(run.status == ChorRun::Status::Value);
    CHECK(c_equal(run.final, expect));
  }
}

TEST_CASE("the step label and successor agree via step_with") {
  auto table = mabc_table();
  auto prog = balancer();
  ChorPtr cur = prog;
  auto run = run_chor(prog, table, 100, ChorStrategy::Leftmost);
  for (const auto& s : run.trace) {
    auto next = step_with(cur, s.r, table);
    REQUIRE(next.has_value());
    CHECK(c_equal(*next, s.next));
    cur = s.next;
  }
}

TEST_CASE("types are preserved along a run") {
  auto table = mabc_table();
  auto prog = balancer();
  auto t0 = type_of({}, {}, {}, prog, table);
  REQUIRE(t0.has_value());
  auto run = run_chor(prog, table, 100, ChorStrategy::Leftmost);
  REQUIRE(run.status == ChorRun::Status::Value);
  for (const auto& s : run.trace) {
    std::string diag;
    auto t = type_of({}, {}, {}, s.next, table, &diag);
    REQUIRE_MESSAGE(t.has_value(), diag);
    CHECK(ct_equal(*t, *t0));
  }
}

TEST_CASE("uninvolved branches may run ahead of the condition") {
  auto table = mabc_table();
  auto cond = c_done(sA(), le_eq(le_lit(1), le_lit(2)));
  auto branch = c_done(sB(), le_add(le_lit(2), le_lit(3)));
  auto c = c_if(sA(), cond, branch, branch);
  auto steps = enabled_steps(c, table);
  auto advanced = c_if(sA(), cond, c_done(sB(), le_lit(5)), c_done(sB(), le_lit(5)));
  bool found = false;
  for (const auto& s : steps) found |= c_equal(s.next, advanced);
  CHECK(found);
}

TEST_CASE("branches may not run ahead of a condition that involves them") {
  auto table = mabc_table();
  // if A.(let A.x := (B.5 ~> A) in A.(x < 4)) then B.(2+3) else B.(2+3):
  // B's send in the condition must come before B's local work in the branches.
  auto cond = c_let_local(sA(), "x", lt_int(),
                          c_send(c_done(sB(), le_lit(5)), LocExpr::concrete("B"), sA()),
                          c_done(sA(), le_lt(le_var("x"), le_lit(4))));
  auto branch = c_done(sB(), le_add(le_lit(2), le_lit(3)));
  auto c = c_if(sA(), cond, branch, branch);
  auto steps = enabled_steps(c, table);
  REQUIRE_FALSE(steps.empty());
  for (const auto& s : steps) {
    REQUIRE(s.next->k == Chor::K::If);
    CHECK(c_equal(s.next->b, branch));
    CHECK(c_equal(s.next->c, branch));
  }
  auto run = run_chor(c, table, 100, ChorStrategy::Leftmost);
  CHECK(run.status == ChorRun::Status::Value);
  CHECK(c_equal(run.final, c_done(sB(), le_lit(5))));
}

TEST_CASE("independent locations may reorder across a let") {
  auto table = mabc_table();
  auto inner = c_let_local(sB(), "y", lt_int(), c_done(sB(), le_add(le_lit(2), le_lit(2))),
                           c_done(sA(), le_add(le_var("x"), le_lit(0))));
  auto c = c_let_local(sA(), "x", lt_int(), c_done(sA(), le_add(le_lit(1), le_lit(1))),
                       inner);
  auto steps = enabled_steps(c, table);
  bool in_order = false, early = false;
  for (const auto& s : steps) {
    if (!c_equal(s.next->a, c->a)) in_order = true;      // A computes 1+1
    else if (!c_equal(s.next->b, c->b)) early = true;    // B computes 2+2 first
  }
  CHECK(in_order);
  CHECK(early);
}

TEST_CASE("a location's own operations stay in order") {
  auto table = mabc_table();
  auto c = c_let_local(sA(), "x", lt_int(), c_done(sA(), le_add(le_lit(1), le_lit(1))),
                       c_done(sA(), le_add(le_var("x"), le_lit(1))));
  auto steps = enabled_steps(c, table);
  REQUIRE(steps.size() == 1);
  CHECK(c_equal(steps[0].next->b, c->b));
}

TEST_CASE("selection discharge and its ordering guard") {
  auto table = mabc_table();
  auto blocked = c_sync(LocExpr::concrete("A"), true, sB(),
                        c_done(sB(), le_add(le_lit(2), le_lit(2))));
  auto steps = enabled_steps(blocked, table);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].r->k == Redex::K::Send);
  CHECK(steps[0].r->msg_is_label);
  CHECK(c_equal(steps[0].next, blocked->a));

  auto free_body = c_sync(LocExpr::concrete("A"), false, sB(),
                          c_done(sC(), le_add(le_lit(2), le_lit(2))));
  auto steps2 = enabled_steps(free_body, table);
  CHECK(steps2.size() == 2);
}

TEST_CASE("type-let reifies location sets and local types") {
  auto table = mabc_table();
  auto sAB = ls_of(std::vector<Location>{"A", "B"});
  auto repset = le_ascribe(le_cons(le_lit(0), le_cons(le_lit(1), le_nil())),
                           lt_set(sAB));
  auto cset = c_let_type(sAB, "r", Kind::StarSet, c_done(sAB, repset),
                         c_done(ls_var("r"), le_lit(7)));
  auto rset = run_chor(cset, table, 10, ChorStrategy::Leftmost);
  REQUIRE(rset.status == ChorRun::Status::Value);
  REQUIRE(rset.final->k == Chor::K::Done);
  auto g = ground_set(rset.final->rho);
  REQUIRE(g.has_value());
  CHECK(*g == std::set<Location>{"A", "B"});

  auto cty = c_let_type(sA(), "t", Kind::StarLocal, c_done(sA(), le_repr_int()),
                        c_let_local(sA(), "x", lt_var("t"), c_done(sA(), le_lit(1)),
                                    c_done(sA(), le_var("x"))));
  auto rty = run_chor(cty, table, 10, ChorStrategy::Leftmost);
  REQUIRE(rty.status == ChorRun::Status::Value);
  CHECK(c_equal(rty.final, c_done(sA(), le_lit(1))));
}

TEST_CASE("binder renaming keeps namespaces apart at runtime") {
  auto table = mabc_table();
  // Resolving a := L collapses the a and L namespaces; the let binders must
  // keep their two x's apart so the final sum is 2 + 3, not 3 + 3.
  auto c = csubst_type(capture_example(), "a", ct_loc(LocExpr::concrete("L")),
                       Kind::StarLoc);
  auto run = run_chor(c, table, 50, ChorStrategy::Leftmost);
  REQUIRE(run.status == ChorRun::Status::Value);
  CHECK(c_equal(run.final, c_done(sL(), le_lit(5))));
}

TEST_CASE("values and stuck terms do not step") {
  auto table = mabc_table();
  CHECK(enabled_steps(c_done(sA(), le_lit(5)), table).empty());
  CHECK(enabled_steps(c_fun("F", "X", ct_at(lt_int(), sA()), c_var("X")), table).empty());
  auto stuck = run_chor(c_done(sA(), le_var("x")), table, 10, ChorStrategy::Leftmost);
  CHECK(stuck.status == ChorRun::Status::Stuck);
}

TEST_CASE("beta-family steps") {
  auto table = mabc_table();
  auto intA = ct_at(lt_int(), sA());
  auto id = c_fun("F", "X", ct_arrow(intA, intA), c_var("X"));
  auto app = c_app(id, c_done(sA(), le_lit(4)));
  auto run = run_chor(app, table, 10, ChorStrategy::Leftmost);
  REQUIRE(run.status == ChorRun::Status::Value);
  CHECK(c_equal(run.final, c_done(sA(), le_lit(4))));

  auto poly = c_tyabs("a", Kind::StarLoc, c_done(sAlpha(), le_lit(9)));
  auto inst = c_tyapp(poly, ct_loc(LocExpr::concrete("B")));
  auto ri = run_chor(inst, table, 10, ChorStrategy::Leftmost);
  REQUIRE(ri.status == ChorRun::Status::Value);
  CHECK(c_equal(ri.final, c_done(sB(), le_lit(9))));

  auto pr = c_fst(c_pair(c_done(sA(), le_lit(1)), c_done(sB(), le_lit(2))));
  auto rp = run_chor(pr, table, 10, ChorStrategy::Leftmost);
  REQUIRE(rp.status == ChorRun::Status::Value);
  CHECK(c_equal(rp.final, c_done(sA(), le_lit(1))));

  auto sum = ct_sum(intA, intA);
  auto cs = c_case(c_inr(sum, c_done(sA(), le_lit(2))), "X", c_var("X"), "Y",
                   c_done(sA(), le_lit(8)));
  auto rc = run_chor(cs, table, 10, ChorStrategy::Leftmost);
  REQUIRE(rc.status == ChorRun::Status::Value);
  CHECK(c_equal(rc.final, c_done(sA(), le_lit(8))));

  auto mu = ct_mu("r", ct_sum(intA, ct_var("r")));
  auto folded = c_fold(mu, c_inl(ct_sum(intA, mu), c_done(sA(), le_lit(3))));
  auto ru = run_chor(c_unfold(folded), table, 10, ChorStrategy::Leftmost);
  REQUIRE(ru.status == ChorRun::Status::Value);
  CHECK(c_equal(ru.final, c_inl(ct_sum(intA, mu), c_done(sA(), le_lit(3)))));
}

TEST_CASE("pair components at different locations run independently") {
  auto table = mabc_table();
  auto c = c_pair(c_done(sA(), le_add(le_lit(1), le_lit(1))),
                  c_done(sB(), le_add(le_lit(2), le_lit(2))));
  auto steps = enabled_steps(c, table);
  CHECK(steps.size() == 2);
  auto run = run_chor(c, table, 10, ChorStrategy::Random, 3);
  REQUIRE(run.status == ChorRun::Status::Value);
  CHECK(c_equal(run.final, c_pair(c_done(sA(), le_lit(2)), c_done(sB(), le_lit(4)))));
}
