#include "doctest.h"

#include "chorsem.hpp"
#include "conformance.hpp"
#include "gen.hpp"
#include "json.hpp"
#include "statics.hpp"

using namespace qc;

namespace {

GenConfig small_cfg(uint64_t seed) {
  GenConfig cfg;
  cfg.seed = seed;
  cfg.max_depth = 3;
  cfg.universe = 3;
  cfg.local_depth = 2;
  return cfg;
}

// A.(2+3) ~> B over {A,B}
ChorPtr simple_send() {
  return c_send(c_done(ls_sng(Location("A")), le_add(le_lit(2), le_lit(3))),
                LocExpr::concrete("A"), ls_sng(Location("B")));
}

ChorPtr if_sync() {
  auto sB = ls_sng(Location("B"));
  auto then_c = c_sync(LocExpr::concrete("A"), true, sB, c_done(sB, le_lit(1)));
  auto else_c = c_sync(LocExpr::concrete("A"), false, sB, c_done(sB, le_lit(2)));
  auto cond = c_done(ls_sng(Location("A")), le_eq(le_lit(1), le_lit(1)));
  return c_if(ls_sng(Location("A")), cond, then_c, else_c);
}

// a self-application that never finishes
LTermPtr local_loop() {
  auto f = le_fun("f", "x", lt_int(), le_app(le_var("f"), le_var("x")));
  return le_app(f, le_lit(0));
}

}  // namespace

TEST_CASE("every generated choreography re-checks at its reported type") {
  bool saw_send = false, saw_let = false, saw_if = false, saw_multi = false;
  for (uint64_t seed = 0; seed < 200; ++seed) {
    auto cfg = small_cfg(seed);
    auto g = gen_well_typed(cfg);
    auto table = gen_table(cfg);
    auto t = type_of({}, {}, {}, g.c, table);
    REQUIRE(t.has_value());
    CHECK(ct_equal(*t, g.type));
    auto s = c_to_string(g.c);
    saw_send = saw_send || s.find("~>") != std::string::npos ||
               g.c->k == Chor::K::Send;
    saw_let = saw_let || s.find("let") != std::string::npos;
    saw_if = saw_if || s.find("sync") != std::string::npos;
    if (g.c->k == Chor::K::Done) {
      auto gs = ground_set(g.c->rho);
      saw_multi = saw_multi || (gs && gs->size() > 1);
    }
  }
  CHECK(saw_send);
  CHECK(saw_let);
  CHECK(saw_if);
  CHECK(saw_multi);
}

TEST_CASE("generated local terms are well-typed and step deterministically") {
  std::mt19937_64 rng(7);
  LocationTable table;
  for (int i = 0; i < 500; ++i) {
    auto e = gen_local_any(rng, 3);
    auto t = linfer({}, {}, e, table);
    REQUIRE(t.has_value());
    auto cur = e;
    for (int s = 0; s < 100; ++s) {
      auto n1 = lstep(cur);
      auto n2 = lstep(cur);
      REQUIRE(n1.has_value() == n2.has_value());
      if (!n1) break;
      CHECK(le_equal(*n1, *n2));
      cur = *n1;
    }
  }
}

TEST_CASE("preservation and progress hold on a small seeded batch") {
  for (uint64_t seed = 0; seed < 40; ++seed) {
    auto cfg = small_cfg(seed);
    auto g = gen_well_typed(cfg);
    auto table = gen_table(cfg);
    auto p = check_preservation(g.c, g.type, table, 4, seed);
    CHECK(p.ok());
    CHECK(p.cases > 0);
    auto q = check_progress(g.c, g.type, table, 4, seed);
    CHECK(q.ok());
    if (!p.ok()) MESSAGE(report_summary(p));
    if (!q.ok()) MESSAGE(report_summary(q));
  }
}

TEST_CASE("preservation catches a type-changing mutant") {
  // claim the wrong type and the check must flag every state
  LocationTable table;
  table.codes = {{0, "A"}, {1, "B"}};
  table.fallback = "B";
  auto c = simple_send();
  auto r = check_preservation(c, ct_at(lt_bool(), ls_sng(Location("A"))), table, 2);
  CHECK_FALSE(r.ok());
}

TEST_CASE("completeness: projections keep pace with the choreography") {
  LocationTable table;
  table.codes = {{0, "A"}, {1, "B"}};
  table.fallback = "B";
  SUBCASE("zero steps is witnessed by the projection itself") {
    auto r = check_completeness(simple_send(), {"A", "B"}, table, 0);
    CHECK(r.ok());
    CHECK(r.cases == 1);
  }
  SUBCASE("the full run of a send") {
    auto r = check_completeness(simple_send(), {"A", "B"}, table, 4);
    CHECK(r.ok());
    if (!r.ok()) MESSAGE(report_summary(r));
  }
  SUBCASE("selection keeps the branches aligned") {
    auto r = check_completeness(if_sync(), {"A", "B"}, table, 4);
    CHECK(r.ok());
    if (!r.ok()) MESSAGE(report_summary(r));
  }
}

TEST_CASE("soundness: system executions rejoin the choreography") {
  LocationTable table;
  table.codes = {{0, "A"}, {1, "B"}};
  table.fallback = "B";
  auto r = check_soundness(simple_send(), {"A", "B"}, table, 4);
  CHECK(r.ok());
  CHECK(r.cases > 0);
  if (!r.ok()) MESSAGE(report_summary(r));
  auto r2 = check_soundness(if_sync(), {"A", "B"}, table, 4);
  CHECK(r2.ok());
}

TEST_CASE("nonterminating local work is excluded by the fuel scan") {
  LocationTable table;
  table.codes = {{0, "A"}, {1, "B"}};
  table.fallback = "B";
  auto loop = c_let_local(ls_sng(Location("A")), "x", lt_int(),
                          c_done(ls_sng(Location("A")), local_loop()),
                          c_done(ls_of(std::vector<Location>{"A", "B"}),
                                 le_add(le_lit(1), le_lit(1))));
  auto r = check_soundness(loop, {"A", "B"}, table, 3, 100);
  CHECK(r.ok());
  CHECK(r.cases == 0);  // skipped, not verified
}

TEST_CASE("confluence over a projected send") {
  LocationTable table;
  table.codes = {{0, "A"}, {1, "B"}};
  table.fallback = "B";
  auto pi = project_system(simple_send(), {"A", "B"});
  REQUIRE(pi.has_value());
  auto r = check_confluence(*pi, table, 5);
  CHECK(r.ok());
  CHECK(r.cases > 0);
}

TEST_CASE("deadlock freedom holds for projections and fails for corruptions") {
  LocationTable table;
  table.codes = {{0, "A"}, {1, "B"}};
  table.fallback = "B";
  auto r = check_deadlock_freedom(if_sync(), {"A", "B"}, table, 20);
  CHECK(r.ok());
  // drop the sync branch at B that the decider will take: no receiver remains
  auto pi = project_system(if_sync(), {"A", "B"});
  REQUIRE(pi.has_value());
  auto allow = pi->at("B");
  REQUIRE(allow->k == Net::K::Allow);
  System bad = *pi;
  bad["B"] = n_allow(allow->loc, nullptr, allow->b);
  auto g = explore(bad, table, 20);
  CHECK_FALSE(g.deadlocked.empty());
}

TEST_CASE("reports serialize and merge") {
  LocationTable table;
  table.codes = {{0, "A"}, {1, "B"}};
  table.fallback = "B";
  auto r = check_deadlock_freedom(simple_send(), {"A", "B"}, table, 10);
  auto j = nlohmann::json::parse(report_to_json(r));
  CHECK(j["theorem"] == "deadlock-freedom");
  CHECK(j["ok"] == true);
  auto m = merge_reports("deadlock-freedom", {r, r});
  CHECK(m.cases == 2 * r.cases);
  CHECK(report_summary(m).find("deadlock-freedom:") == 0);
}
