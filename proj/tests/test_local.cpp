#include "doctest.h"

#include <random>

#include "local.hpp"

using namespace qc;

namespace {

LocationTable abc_table() {
  LocationTable t;
  t.codes = {{0, "A"}, {1, "B"}};
  t.fallback = "C";
  return t;
}

// Rule-directed generator of well-typed closed terms of type int or bool.
struct LGen {
  std::mt19937 rng;
  explicit LGen(uint32_t seed) : rng(seed) {}
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  LTermPtr gen_int(int depth) {
    if (depth <= 0) return le_lit(pick(10));
    switch (pick(5)) {
      case 0: return le_lit(pick(10));
      case 1: return le_add(gen_int(depth - 1), gen_int(depth - 1));
      case 2: return le_if(gen_bool(depth - 1), gen_int(depth - 1), gen_int(depth - 1));
      case 3: {
        // Apply a non-recursive int -> int function.
        auto body = le_add(le_var("x"), gen_int(depth - 1));
        return le_app(le_fun("f", "x", lt_int(), body), gen_int(depth - 1));
      }
      default: {
        auto body = le_var("x");
        auto poly = le_tyabs("a", le_fun("f", "x", lt_var("a"), body));
        return le_app(le_tyapp(poly, lt_int()), gen_int(depth - 1));
      }
    }
  }

  LTermPtr gen_bool(int depth) {
    if (depth <= 0) return pick(2) ? le_true() : le_false();
    switch (pick(4)) {
      case 0: return pick(2) ? le_true() : le_false();
      case 1: return le_eq(gen_int(depth - 1), gen_int(depth - 1));
      case 2: return le_lt(gen_int(depth - 1), gen_int(depth - 1));
      default: return le_if(gen_bool(depth - 1), gen_bool(depth - 1), gen_bool(depth - 1));
    }
  }
};

}  // namespace

TEST_CASE("value predicate") {
  CHECK(is_lvalue(le_lit(5)));
  CHECK_FALSE(is_lvalue(le_add(le_lit(2), le_lit(3))));
  CHECK(is_lvalue(le_cons(le_lit(1), le_nil())));
  CHECK_FALSE(is_lvalue(le_cons(le_add(le_lit(1), le_lit(1)), le_nil())));
  CHECK(is_lvalue(le_repr_arrow(le_repr_int(), le_repr_bool())));
}

TEST_CASE("small steps") {
  auto s = lstep(le_add(le_lit(2), le_lit(3)));
  REQUIRE(s.has_value());
  CHECK(le_equal(*s, le_lit(5)));

  // if true then <A-code> else <B-code>
  auto i = lstep(le_if(le_true(), le_lit(0), le_lit(1)));
  REQUIRE(i.has_value());
  CHECK(le_equal(*i, le_lit(0)));

  // tasks(<A>) < tasks(<B>) with tasks returning constants 1 and 2.
  auto tasks = le_fun("tasks", "x", lt_int(),
                      le_if(le_eq(le_var("x"), le_lit(0)), le_lit(1), le_lit(2)));
  auto cmp = le_lt(le_app(tasks, le_lit(0)), le_app(tasks, le_lit(1)));
  auto v = leval(cmp, 100);
  REQUIRE(v.has_value());
  CHECK((*v)->k == LocalTerm::K::True);
}

TEST_CASE("recursive functions unroll") {
  // sum(n) = if n = 0 then 0 else n + sum(n + -1)
  auto body = le_if(le_eq(le_var("n"), le_lit(0)), le_lit(0),
                    le_add(le_var("n"), le_app(le_var("sum"), le_add(le_var("n"), le_lit(-1)))));
  auto sum = le_fun("sum", "n", lt_int(), body);
  auto v = leval(le_app(sum, le_lit(4)), 1000);
  REQUIRE(v.has_value());
  CHECK((*v)->lit == 10);

  auto table = abc_table();
  CHECK(lcheck({}, {}, sum, lt_arrow(lt_int(), lt_int()), table));
}

TEST_CASE("typing literals at location types") {
  auto table = abc_table();
  auto locAB = lt_loc(ls_of(std::vector<Location>{"A", "B"}));
  CHECK(lcheck({}, {}, le_lit(0), locAB, table));
  CHECK(lcheck({}, {}, le_if(le_true(), le_lit(0), le_lit(1)), locAB, table));
  // Code 2 falls back to C, which is not in {A,B}.
  CHECK_FALSE(lcheck({}, {}, le_lit(2), locAB, table));
  CHECK(lcheck({}, {}, le_lit(2), lt_loc(ls_sng(Location("C"))), table));

  auto setAB = lt_set(ls_of(std::vector<Location>{"A", "B"}));
  CHECK(lcheck({}, {}, le_cons(le_lit(0), le_cons(le_lit(1), le_nil())), setAB, table));
  CHECK_FALSE(lcheck({}, {}, le_cons(le_lit(2), le_nil()), setAB, table));
}

TEST_CASE("kinding") {
  CHECK(lkind({}, lt_arrow(lt_int(), lt_bool())));
  CHECK_FALSE(lkind({}, lt_var("a")));
  CHECK(lkind({{"a", Kind::StarLocal}}, lt_var("a")));
  CHECK_FALSE(lkind({}, lt_loc(ls_sng(LocExpr::var("a")))));
  CHECK(lkind({{"a", Kind::StarLoc}}, lt_loc(ls_sng(LocExpr::var("a")))));
  CHECK(lkind({{"a", Kind::StarSet}}, lt_set(ls_var("a"))));
  CHECK_FALSE(lkind({{"a", Kind::StarLoc}}, lt_set(ls_var("a"))));
  CHECK(lkind({}, lt_forall("a", lt_arrow(lt_var("a"), lt_var("a")))));
}

TEST_CASE("reification") {
  auto table = abc_table();
  CHECK(*reify_loc(le_lit(0), table) == "A");
  CHECK(*reify_loc(le_lit(7), table) == "C");
  auto s = reify_locset(le_cons(le_lit(0), le_cons(le_lit(1), le_nil())), table);
  REQUIRE(s.has_value());
  CHECK(*s == std::set<Location>{"A", "B"});
  // Duplicate codes collapse.
  auto d = reify_locset(le_cons(le_lit(0), le_cons(le_lit(0), le_nil())), table);
  CHECK(*d == std::set<Location>{"A"});
  auto ty = reify_tyrep(le_repr_arrow(le_repr_int(), le_repr_bool()));
  REQUIRE(ty.has_value());
  CHECK(lt_equal(*ty, lt_arrow(lt_int(), lt_bool())));
  CHECK(*reify_bool(le_true()) == true);
  // Every location with a code round-trips.
  for (const auto& [code, loc] : table.codes) {
    auto back = table.code_of(loc);
    REQUIRE(back.has_value());
    CHECK(table.resolve(*back) == loc);
  }
}

TEST_CASE("substitution is capture avoiding") {
  auto e = lsubst_term(le_add(le_var("x"), le_lit(1)), "x", le_lit(4));
  CHECK(le_equal(e, le_add(le_lit(4), le_lit(1))));

  // (fun f(y:int) = x)[x := y] must rename the binder y.
  auto f = le_fun("f", "y", lt_int(), le_var("x"));
  auto r = lsubst_term(f, "x", le_var("y"));
  CHECK(r->var2 != "y");
  CHECK(le_fv(r) == std::set<std::string>{"y"});

  // (tyfun a => (x : a))[b := a] renames before substituting.
  auto ta = le_tyabs("a", le_ascribe(le_var("x"), lt_var("b")));
  auto rt = lsubst_type_in_term(ta, "b", lt_var("a"));
  CHECK(rt->var != "a");
  CHECK(le_ftv(rt) == std::set<std::string>{"a"});

  auto t = lsubst_type(lt_forall("a", lt_arrow(lt_var("a"), lt_var("b"))), "b",
                       lt_var("a"));
  CHECK(lt_ftv(t) == std::set<std::string>{"a"});
}

TEST_CASE("location-variable substitution into annotations") {
  auto t = lt_loc(ls_union(ls_sng(LocExpr::var("a")), ls_sng(Location("B"))));
  auto t2 = lt_subst_locvar(t, "a", LocExpr::concrete("A"));
  CHECK(nec_in(Location("A"), t2->rho));
  auto s = lt_set(ls_var("r"));
  auto s2 = lt_subst_setvar(s, "r", ls_of(std::vector<Location>{"A", "B"}));
  CHECK(*ground_set(s2->rho) == std::set<Location>{"A", "B"});
}

// Determinism, value stuckness, progress, and preservation over generated
// well-typed terms.
TEST_CASE("stepping properties on generated terms") {
  auto table = abc_table();
  LGen g(20260823);
  int checked = 0;
  for (int i = 0; i < 10000; ++i) {
    LTermPtr e = (i % 2) ? g.gen_int(3) : g.gen_bool(3);
    auto t = linfer({}, {}, e, table);
    REQUIRE(t.has_value());
    LTermPtr cur = e;
    for (int steps = 0; steps < 200; ++steps) {
      auto next = lstep(cur);
      if (is_lvalue(cur)) {
        CHECK_FALSE(next.has_value());
        break;
      }
      // Progress: a well-typed non-value steps.
      REQUIRE(next.has_value());
      // Determinism: stepping the same term again gives the same result.
      CHECK(le_equal(*lstep(cur), *next));
      // Preservation.
      CHECK(lcheck({}, {}, *next, *t, table));
      cur = *next;
      ++checked;
    }
  }
  CHECK(checked > 10000);
}
