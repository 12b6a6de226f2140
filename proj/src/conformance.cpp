#include "conformance.hpp"

#include <map>
#include <queue>

#include "chorsem.hpp"
#include "gen.hpp"
#include "json.hpp"
#include "statics.hpp"

namespace qc {

namespace {

struct ChorReach {
  std::vector<ChorPtr> states;
  std::vector<int> depth;
};

ChorReach chor_reach(const ChorPtr& c, const LocationTable& table, int depth) {
  ChorReach r;
  std::map<std::string, size_t> seen;
  std::queue<size_t> work;
  r.states.push_back(c);
  r.depth.push_back(0);
  seen[c_to_string(c)] = 0;
  work.push(0);
  while (!work.empty()) {
    size_t i = work.front();
    work.pop();
    if (r.depth[i] >= depth) continue;
    for (const auto& s : enabled_steps(r.states[i], table)) {
      auto key = c_to_string(s.next);
      if (seen.count(key)) continue;
      seen[key] = r.states.size();
      work.push(r.states.size());
      r.states.push_back(s.next);
      r.depth.push_back(r.depth[i] + 1);
    }
  }
  return r;
}

struct SysReach {
  std::vector<System> states;
  std::vector<int> depth;
};

SysReach sys_reach(const System& pi, const LocationTable& table, int depth) {
  SysReach r;
  std::map<std::string, size_t> seen;
  std::queue<size_t> work;
  r.states.push_back(pi);
  r.depth.push_back(0);
  seen[system_to_string(pi)] = 0;
  work.push(0);
  while (!work.empty()) {
    size_t i = work.front();
    work.pop();
    if (r.depth[i] >= depth) continue;
    for (const auto& s : system_steps(r.states[i], table)) {
      auto key = system_to_string(s.next);
      if (seen.count(key)) continue;
      seen[key] = r.states.size();
      work.push(r.states.size());
      r.states.push_back(s.next);
      r.depth.push_back(r.depth[i] + 1);
    }
  }
  return r;
}

void fail(TheoremReport& r, uint64_t seed, const std::string& program,
          const std::string& witness) {
  r.failures.push_back({seed, program, witness});
}

}  // namespace

std::string report_to_json(const TheoremReport& r) {
  nlohmann::json j;
  j["theorem"] = r.theorem;
  j["cases"] = r.cases;
  j["ok"] = r.ok();
  j["failures"] = nlohmann::json::array();
  for (const auto& f : r.failures)
    j["failures"].push_back(
        {{"seed", f.seed}, {"program", f.program}, {"witness", f.witness}});
  return j.dump();
}

std::string report_summary(const TheoremReport& r) {
  std::string s = r.theorem + ": " + std::to_string(r.cases) + " cases, " +
                  std::to_string(r.failures.size()) + " failures";
  for (const auto& f : r.failures)
    s += "\n  seed " + std::to_string(f.seed) + ": " + f.witness;
  return s;
}

TheoremReport merge_reports(const std::string& theorem,
                            const std::vector<TheoremReport>& rs) {
  TheoremReport out;
  out.theorem = theorem;
  for (const auto& r : rs) {
    out.cases += r.cases;
    out.failures.insert(out.failures.end(), r.failures.begin(), r.failures.end());
  }
  return out;
}

TheoremReport check_preservation(const ChorPtr& c, const CTypePtr& tau,
                                 const LocationTable& table, int depth,
                                 uint64_t seed) {
  TheoremReport r;
  r.theorem = "preservation";
  auto reach = chor_reach(c, table, depth);
  for (const auto& s : reach.states) {
    ++r.cases;
    std::string diag;
    auto t = type_of({}, {}, {}, s, table, &diag);
    if (!t)
      fail(r, seed, c_to_string(c), "untypeable successor " + c_to_string(s) + ": " + diag);
    else if (!ct_equal(*t, tau))
      fail(r, seed, c_to_string(c),
           "type changed to " + ct_to_string(*t) + " at " + c_to_string(s));
  }
  return r;
}

TheoremReport check_progress(const ChorPtr& c, const CTypePtr&,
                             const LocationTable& table, int depth, uint64_t seed) {
  TheoremReport r;
  r.theorem = "progress";
  auto reach = chor_reach(c, table, depth);
  for (const auto& s : reach.states) {
    ++r.cases;
    if (!is_chor_value(s) && enabled_steps(s, table).empty())
      fail(r, seed, c_to_string(c), "stuck at " + c_to_string(s));
  }
  return r;
}

TheoremReport check_completeness(const ChorPtr& c, const std::set<Location>& locs,
                                 const LocationTable& table, int n, int slack,
                                 uint64_t seed) {
  TheoremReport r;
  r.theorem = "completeness";
  int budget = slack < 0 ? 2 * n + 8 : n + slack;
  auto pi0 = project_system(c, locs);
  if (!pi0) {
    fail(r, seed, c_to_string(c), "projection undefined at the root");
    return r;
  }
  auto creach = chor_reach(c, table, n);
  auto sreach = sys_reach(*pi0, table, 2 * budget);
  for (size_t i = 0; i < creach.states.size(); ++i) {
    ++r.cases;
    auto proj = project_system(creach.states[i], locs);
    if (!proj) {
      fail(r, seed, c_to_string(c),
           "projection undefined after " + std::to_string(creach.depth[i]) +
               " steps: " + c_to_string(creach.states[i]));
      continue;
    }
    int best = -1;
    for (size_t j = 0; j < sreach.states.size(); ++j)
      if (leq_system(*proj, sreach.states[j]))
        if (best < 0 || sreach.depth[j] < best) best = sreach.depth[j];
    if (best < 0)
      fail(r, seed, c_to_string(c),
           "no system witness within " + std::to_string(2 * budget) +
               " steps for " + c_to_string(creach.states[i]));
    else if (best > budget)
      fail(r, seed, c_to_string(c),
           "search-budget-exceeded: witness at k=" + std::to_string(best) +
               " > " + std::to_string(budget));
  }
  return r;
}

TheoremReport check_soundness(const ChorPtr& c, const std::set<Location>& locs,
                              const LocationTable& table, int depth, int local_fuel,
                              uint64_t seed) {
  TheoremReport r;
  r.theorem = "soundness";
  // the termination premise: skip programs whose execution outruns the fuel
  auto probe = run_chor(c, table, local_fuel, ChorStrategy::Leftmost);
  if (probe.status == ChorRun::Status::FuelExhausted) return r;
  auto pi0 = project_system(c, locs);
  if (!pi0) {
    fail(r, seed, c_to_string(c), "projection undefined at the root");
    return r;
  }
  auto creach = chor_reach(c, table, 2 * depth + 8);
  std::vector<System> targets;
  for (const auto& s : creach.states)
    if (auto p = project_system(s, locs)) targets.push_back(*p);
  auto sreach = sys_reach(*pi0, table, depth);
  for (const auto& pi : sreach.states) {
    ++r.cases;
    auto forward = sys_reach(pi, table, 2 * depth + 8);
    bool joined = false;
    for (const auto& pip : forward.states) {
      for (const auto& t : targets)
        if (leq_system(t, pip)) {
          joined = true;
          break;
        }
      if (joined) break;
    }
    if (!joined)
      fail(r, seed, c_to_string(c),
           "no rejoining execution from " + system_to_string(pi));
  }
  return r;
}

TheoremReport check_confluence(const System& pi, const LocationTable& table,
                               int depth, uint64_t seed) {
  TheoremReport r;
  r.theorem = "confluence";
  auto reach = sys_reach(pi, table, depth);
  std::vector<std::set<std::string>> desc(reach.states.size());
  for (size_t i = 0; i < reach.states.size(); ++i) {
    auto f = sys_reach(reach.states[i], table, depth);
    for (const auto& s : f.states) desc[i].insert(system_to_string(s));
  }
  for (size_t i = 0; i < reach.states.size(); ++i)
    for (size_t j = i + 1; j < reach.states.size(); ++j) {
      ++r.cases;
      bool meet = false;
      for (const auto& k : desc[i])
        if (desc[j].count(k)) {
          meet = true;
          break;
        }
      if (!meet)
        fail(r, seed, system_to_string(pi),
             "states do not rejoin: " + system_to_string(reach.states[i]) +
                 " vs " + system_to_string(reach.states[j]));
    }
  return r;
}

TheoremReport check_deadlock_freedom(const ChorPtr& c, const std::set<Location>& locs,
                                     const LocationTable& table, int depth,
                                     uint64_t seed) {
  TheoremReport r;
  r.theorem = "deadlock-freedom";
  auto pi0 = project_system(c, locs);
  if (!pi0) {
    fail(r, seed, c_to_string(c), "projection undefined at the root");
    return r;
  }
  auto g = explore(*pi0, table, depth);
  r.cases = static_cast<int>(g.states.size());
  for (size_t id : g.deadlocked)
    fail(r, seed, c_to_string(c), "deadlocked state " + system_to_string(g.states[id]));
  return r;
}

TheoremReport run_suite(const std::string& suite, uint64_t seed, int cases) {
  std::vector<TheoremReport> parts;
  bool need_projection = suite == "completeness" || suite == "soundness" ||
                         suite == "confluence" || suite == "deadlock-freedom";
  if (!need_projection && suite != "preservation" && suite != "progress") {
    TheoremReport bad;
    bad.theorem = suite;
    bad.failures.push_back({seed, "", "unknown suite " + suite});
    return bad;
  }
  int done = 0;
  uint64_t s = seed;
  int attempts = 0;
  while (done < cases && attempts < 40 * cases + 64) {
    ++attempts;
    GenConfig cfg;
    cfg.seed = s++;
    cfg.max_depth = 3;
    cfg.universe = 3;
    auto g = gen_well_typed(cfg);
    auto table = gen_table(cfg);
    auto u = gen_universe(cfg);
    std::set<Location> locs(u.begin(), u.end());
    if (need_projection && !project_system(g.c, locs)) continue;
    if (suite == "preservation") {
      parts.push_back(check_preservation(g.c, g.type, table, 6, cfg.seed));
    } else if (suite == "progress") {
      parts.push_back(check_progress(g.c, g.type, table, 6, cfg.seed));
    } else if (suite == "completeness") {
      parts.push_back(check_completeness(g.c, locs, table, 4, -1, cfg.seed));
    } else if (suite == "soundness") {
      auto rep = check_soundness(g.c, locs, table, 6, 1000, cfg.seed);
      if (rep.cases == 0 && rep.ok()) continue;  // excluded by the fuel scan
      parts.push_back(rep);
    } else if (suite == "confluence") {
      auto pi = project_system(g.c, locs);
      parts.push_back(check_confluence(*pi, table, 5, cfg.seed));
    } else {
      parts.push_back(check_deadlock_freedom(g.c, locs, table, 40, cfg.seed));
    }
    ++done;
  }
  return merge_reports(suite, parts);
}

}  // namespace qc
