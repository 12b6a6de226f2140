#include "doctest.h"

#include "gen.hpp"
#include "parser.hpp"
#include "statics.hpp"

using namespace qc;

namespace {

const std::vector<Location> ABC = {"A", "B", "C"};

LocationTable abc_table() {
  LocationTable t;
  t.codes = {{0, "A"}, {1, "B"}, {2, "C"}};
  t.fallback = "C";
  return t;
}

void roundtrip(const ChorPtr& c, const std::vector<Location>& known) {
  auto text = print_chor(c);
  std::vector<Diagnostic> ds;
  auto back = parse_chor(text, known, abc_table(), &ds);
  for (const auto& d : ds) MESSAGE(diagnostic_to_string(d));
  REQUIRE(back.has_value());
  CHECK(c_equal(*back, c));
  if (!c_equal(*back, c)) MESSAGE(text);
}

}  // namespace

TEST_CASE("a point-to-point send parses with an inferred sender") {
  auto c = parse_chor("A.(2+3) ~> B", ABC, abc_table());
  REQUIRE(c.has_value());
  auto want = c_send(c_done(ls_sng(Location("A")), le_add(le_lit(2), le_lit(3))),
                     LocExpr::concrete("A"), ls_sng(Location("B")));
  CHECK(c_equal(*c, want));
}

TEST_CASE("a type-let at the location sort parses") {
  auto c = parse_chor(
      "let {A,B}.alpha :: loc := {A,B}.(repr(A)) in {A}.(1)", ABC, abc_table());
  REQUIRE(c.has_value());
  CHECK((*c)->k == Chor::K::LetType);
  CHECK((*c)->kind == Kind::StarLoc);
  // repr(A) is an ascribed code
  CHECK((*c)->a->e->k == LocalTerm::K::Ascribe);
  CHECK(le_equal((*c)->a->e->a, le_lit(0)));
}

TEST_CASE("an unbalanced let reports a spanned diagnostic") {
  std::vector<Diagnostic> ds;
  auto c = parse_chor("let {A}.x : int := A.(1)", ABC, abc_table(), &ds);
  CHECK_FALSE(c.has_value());
  REQUIRE_FALSE(ds.empty());
  CHECK(ds[0].rule == "let");
  CHECK(ds[0].span.line == 1);
  CHECK(ds[0].span.col > 1);
}

TEST_CASE("surface forms cover the whole language") {
  auto table = abc_table();
  std::vector<std::string> progs = {
      "{A,B}.(1 + 2)",
      "(A.(5) ~>[A] {B,C})",
      "sync A[left] ~> {B}; B.(1)",
      "if A.(1 = 1) @ {A} then (sync A[left] ~> {B}; B.(1)) "
      "else (sync A[right] ~> {B}; B.(2))",
      "let {A}.x : int := A.(7) in A.(x + 1)",
      "let {A}.a :: loc := A.(repr(A)) in {A}.(9)",
      "let {A,B}.s :: locset := {A,B}.(reprset{A,B}) in A.(0)",
      "let {A}.t :: ty := A.(reprty(int -> bool)) in A.(0)",
      "fun F(X : int @ {A}) = X",
      "(fun F(X : int @ {A}) = X) A.(4)",
      "tyfun a :: loc => {a}.(3)",
      "(tyfun a :: loc => {a}.(3))[loc[B]]",
      "(A.(1), B.(true))",
      "fst((A.(1), B.(2)))",
      "case inl[int @ {A} + bool @ {B}](A.(1)) of inl X => X | inr Y => A.(0)",
      "r.(1 + 1)",
  };
  for (const auto& s : progs) {
    std::vector<Diagnostic> ds;
    auto c = parse_chor(s, ABC, table, &ds);
    for (const auto& d : ds) MESSAGE(s << " | " << diagnostic_to_string(d));
    REQUIRE(c.has_value());
    roundtrip(*c, ABC);
  }
}

TEST_CASE("types round-trip") {
  std::vector<std::string> types = {
      "int @ {A}",
      "(int -> bool) @ {A,B}",
      "int @ {A} -> bool @ {B}",
      "forall a :: loc . int @ {a}",
      "int @ {A} * bool @ {B}",
      "int @ {A} + bool @ {B}",
      "mu X . (int @ {A} + X)",
      "loc{A} @ {A,B}",
      "locset({A} \\/ r) @ {A}",
  };
  for (const auto& s : types) {
    std::vector<Diagnostic> ds;
    auto t = parse_ctype(s, ABC, &ds);
    for (const auto& d : ds) MESSAGE(s << " | " << diagnostic_to_string(d));
    REQUIRE(t.has_value());
    auto back = parse_ctype(print_ctype(*t), ABC);
    REQUIRE(back.has_value());
    CHECK(ct_equal(*back, *t));
  }
}

TEST_CASE("generated programs survive the printer and parser") {
  for (uint64_t seed = 100; seed < 220; ++seed) {
    GenConfig cfg;
    cfg.seed = seed;
    cfg.max_depth = 3;
    cfg.universe = 3;
    auto g = gen_well_typed(cfg);
    roundtrip(g.c, gen_universe(cfg));
    auto tb = parse_ctype(print_ctype(g.type), gen_universe(cfg));
    REQUIRE(tb.has_value());
    CHECK(ct_equal(*tb, g.type));
  }
}

TEST_CASE("source files parse, validate, and round-trip") {
  std::string text =
      "// a pipeline\n"
      "locations { A; B; C }\n"
      "codes { 0 -> A; 1 -> B; default C }\n"
      "def pay := A.(2+3) ~> B\n"
      "main : int @ {A,B} := pay\n";
  std::vector<Diagnostic> ds;
  auto f = parse_source(text, &ds);
  for (const auto& d : ds) MESSAGE(diagnostic_to_string(d));
  REQUIRE(f.has_value());
  CHECK(f->locations == std::vector<Location>{"A", "B", "C"});
  CHECK(f->table.resolve(0) == "A");
  CHECK(f->table.fallback == "C");
  auto m = link_main(*f);
  CHECK(m->k == Chor::K::Send);
  auto t = type_of({}, {}, {}, m, f->table);
  REQUIRE(t.has_value());
  CHECK(ct_equal(*t, f->main_type));

  auto f2 = parse_source(print_source(*f));
  REQUIRE(f2.has_value());
  CHECK(c_equal(f2->main, f->main));
  CHECK(c_equal(f2->defs[0].second, f->defs[0].second));
  CHECK(ct_equal(f2->main_type, f->main_type));
}

TEST_CASE("header validation catches mistakes") {
  std::vector<Diagnostic> ds;
  CHECK_FALSE(parse_source("locations { A }\n"
                           "codes { 0 -> A; 0 -> A; default A }\n"
                           "main : int @ {A} := A.(1)\n",
                           &ds)
                  .has_value());
  REQUIRE_FALSE(ds.empty());
  CHECK(ds[0].message.find("duplicate") != std::string::npos);

  ds.clear();
  CHECK_FALSE(parse_source("locations { A }\n"
                           "codes { 0 -> A; default A }\n"
                           "main : int @ {A} := B.(1)\n",
                           &ds)
                  .has_value());
  REQUIRE_FALSE(ds.empty());
  CHECK(ds[0].message.find("not declared") != std::string::npos);
}

TEST_CASE("reprset reifies to the named set") {
  auto c = parse_chor("{A,B}.(reprset{A,B})", ABC, abc_table());
  REQUIRE(c.has_value());
  auto v = (*c)->e;
  REQUIRE(v->k == LocalTerm::K::Ascribe);
  auto got = reify_locset(v, abc_table());
  REQUIRE(got.has_value());
  CHECK(*got == std::set<Location>({"A", "B"}));
}
