#include "doctest.h"

#include "network.hpp"

using namespace qc;

namespace {

LocationTable ab_table() {
  LocationTable t;
  t.codes = {{0, "A"}, {1, "B"}, {2, "C"}};
  t.fallback = "C";
  return t;
}

LocSetPtr sB() { return ls_sng(Location("B")); }

}  // namespace

TEST_CASE("network values") {
  CHECK(net_is_value(n_unit()));
  CHECK(net_is_value(n_ret(le_lit(5))));
  CHECK_FALSE(net_is_value(n_ret(le_add(le_lit(2), le_lit(3)))));
  CHECK(net_is_value(n_pair(n_unit(), n_ret(le_lit(1)))));
  CHECK_FALSE(net_is_value(n_send(n_ret(le_lit(5)), sB())));
  CHECK_FALSE(net_is_value(n_recv(LocExpr::concrete("A"))));
}

TEST_CASE("local steps inside ret") {
  auto table = ab_table();
  auto steps = net_steps("A", n_ret(le_add(le_lit(2), le_lit(3))), table);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].label.k == NetLabel::K::Iota);
  CHECK(net_equal(steps[0].next, n_ret(le_lit(5))));
}

TEST_CASE("sequencing collapses a finished head") {
  auto table = ab_table();
  auto e = n_seq(n_ret(le_lit(1)), n_ret(le_lit(2)));
  auto steps = net_steps("A", e, table);
  REQUIRE(steps.size() == 1);
  CHECK(net_equal(steps[0].next, n_ret(le_lit(2))));
}

TEST_CASE("send of an evaluated subject emits the message and keeps the value") {
  auto table = ab_table();
  auto e = n_send(n_ret(le_lit(5)), sB());
  auto steps = net_steps("A", e, table);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].label.k == NetLabel::K::Send);
  CHECK_FALSE(steps[0].label.m.is_label);
  CHECK(le_equal(steps[0].label.m.v, le_lit(5)));
  CHECK(net_equal(steps[0].next, n_ret(le_lit(5))));
}

TEST_CASE("membership branching is by the executing location") {
  auto table = ab_table();
  auto rho = ls_of(std::vector<Location>{"A", "B"});
  auto e = n_am_i_in(rho, n_ret(le_lit(1)), n_ret(le_lit(2)));
  auto at_a = net_steps("A", e, table);
  REQUIRE(at_a.size() == 1);
  CHECK(net_equal(at_a[0].next, n_ret(le_lit(1))));
  auto at_c = net_steps("C", e, table);
  REQUIRE(at_c.size() == 1);
  CHECK(net_equal(at_c[0].next, n_ret(le_lit(2))));
  // a set variable may or may not contain C, so neither branch is safe
  auto sym = n_am_i_in(ls_var("r"), n_ret(le_lit(1)), n_ret(le_lit(2)));
  CHECK(net_steps("C", sym, table).empty());
}

TEST_CASE("external choice offers one receive per present branch") {
  auto table = ab_table();
  auto e = n_allow(LocExpr::concrete("A"), n_ret(le_lit(1)), n_ret(le_lit(2)));
  auto steps = net_steps("B", e, table);
  REQUIRE(steps.size() == 2);
  CHECK(steps[0].label.k == NetLabel::K::Recv);
  CHECK(steps[1].label.k == NetLabel::K::Recv);
  auto one = n_allow(LocExpr::concrete("A"), nullptr, n_ret(le_lit(2)));
  CHECK(net_steps("B", one, table).size() == 1);
}

TEST_CASE("beta steps are synchronized") {
  auto table = ab_table();
  auto id = n_fun("F", "X", n_var("X"));
  auto steps = net_steps("A", n_app(id, n_unit()), table);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].label.k == NetLabel::K::IotaSync);
  CHECK(net_equal(steps[0].next, n_unit()));
}

TEST_CASE("receives match sender and message shape") {
  auto table = ab_table();
  Msg five{false, true, le_lit(5)};
  auto ways = net_receive("B", n_recv(LocExpr::concrete("A")), "A", five, table);
  REQUIRE(ways.size() == 1);
  CHECK(net_equal(ways[0], n_ret(le_lit(5))));
  CHECK(net_receive("B", n_recv(LocExpr::concrete("C")), "A", five, table).empty());
  // through an evaluation context
  auto e = n_let_local("x", n_recv(LocExpr::concrete("A")), n_ret(le_var("x")));
  auto deep = net_receive("B", e, "A", five, table);
  REQUIRE(deep.size() == 1);
  CHECK(net_equal(deep[0], n_let_local("x", n_ret(le_lit(5)), n_ret(le_var("x")))));
  // selection labels only land on allow-choice
  Msg left{true, true, nullptr};
  CHECK(net_receive("B", n_recv(LocExpr::concrete("A")), "A", left, table).empty());
}

TEST_CASE("type-let reifies and substitutes") {
  auto table = ab_table();
  auto rep = le_ascribe(le_lit(1), lt_loc(sB()));
  auto e = n_let_type("a", Kind::StarLoc, n_ret(rep),
                      n_send(n_ret(le_lit(9)), ls_sng(LocExpr::var("a"))));
  auto steps = net_steps("A", e, table);
  REQUIRE(steps.size() == 1);
  CHECK(net_equal(steps[0].next, n_send(n_ret(le_lit(9)), sB())));
}

TEST_CASE("internal system steps change one location at a time") {
  auto table = ab_table();
  System pi{{"A", n_ret(le_add(le_lit(2), le_lit(3)))},
            {"B", n_ret(le_add(le_lit(2), le_lit(3)))}};
  auto steps = system_steps(pi, table);
  REQUIRE(steps.size() == 2);
  for (const auto& s : steps) {
    CHECK(s.label.k == SystemLabel::K::Iota);
    int changed = 0;
    for (const auto& [loc, prog] : s.next)
      if (!net_equal(prog, pi.at(loc))) ++changed;
    CHECK(changed == 1);
  }
}

TEST_CASE("communication delivers the sender's value to every recipient") {
  auto table = ab_table();
  System pi{{"A", n_send(n_ret(le_lit(5)), sB())},
            {"B", n_recv(LocExpr::concrete("A"))}};
  auto steps = system_steps(pi, table);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].label.k == SystemLabel::K::Comm);
  CHECK(net_equal(steps[0].next.at("A"), n_ret(le_lit(5))));
  CHECK(net_equal(steps[0].next.at("B"), n_ret(le_lit(5))));
}

TEST_CASE("a sender listed among its own recipients does not wait on itself") {
  auto table = ab_table();
  System pi{{"A", n_send(n_ret(le_lit(5)), ls_union(ls_sng(Location("A")), sB()))},
            {"B", n_recv(LocExpr::concrete("A"))}};
  auto steps = system_steps(pi, table);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].label.k == SystemLabel::K::Comm);
  CHECK(net_equal(steps[0].next.at("A"), n_ret(le_lit(5))));
  CHECK(net_equal(steps[0].next.at("B"), n_ret(le_lit(5))));
}

TEST_CASE("synchronized steps need every location ready") {
  auto table = ab_table();
  auto beta = n_app(n_fun("F", "X", n_var("X")), n_unit());
  System ready{{"A", beta}, {"B", beta}};
  auto steps = system_steps(ready, table);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].label.k == SystemLabel::K::IotaSync);
  CHECK(net_equal(steps[0].next.at("A"), n_unit()));
  CHECK(net_equal(steps[0].next.at("B"), n_unit()));

  System lagging{{"A", beta}, {"B", n_ret(le_add(le_lit(1), le_lit(1)))}};
  for (const auto& s : system_steps(lagging, table))
    CHECK(s.label.k != SystemLabel::K::IotaSync);
}

TEST_CASE("terminal classification") {
  auto table = ab_table();
  CHECK(is_terminal_values({{"A", n_ret(le_lit(5))}, {"B", n_unit()}}));
  CHECK_FALSE(is_terminal_values({{"A", n_ret(le_lit(5))},
                                  {"B", n_recv(LocExpr::concrete("A"))}}));
  System dead{{"A", n_recv(LocExpr::concrete("B"))},
              {"B", n_recv(LocExpr::concrete("A"))}};
  auto g = explore(dead, table, 5);
  CHECK(g.states.size() == 1);
  REQUIRE(g.deadlocked.size() == 1);
  CHECK(g.all_values.empty());
  auto sim = simulate(dead, table, 10, NetScheduler::Leftmost);
  CHECK(sim.status == SimReport::Status::Deadlocked);
}

TEST_CASE("choice propagation through the system layer") {
  auto table = ab_table();
  System pi{{"A", n_choose(true, sB(), n_ret(le_lit(0)))},
            {"B", n_allow(LocExpr::concrete("A"), n_ret(le_lit(1)), n_ret(le_lit(2)))}};
  auto steps = system_steps(pi, table);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].label.k == SystemLabel::K::Comm);
  CHECK(steps[0].label.m.is_label);
  CHECK(net_equal(steps[0].next.at("B"), n_ret(le_lit(1))));
}
