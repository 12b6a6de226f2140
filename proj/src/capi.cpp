#include "qc/qc.h"

#include <cstdlib>
#include <cstring>
#include <sstream>

#include "chorsem.hpp"
#include "conformance.hpp"
#include "json.hpp"
#include "parser.hpp"
#include "statics.hpp"

using namespace qc;

struct qc_program {
  SourceFile file;
  ChorPtr linked;
};

namespace {

char* dup_str(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put(char** slot, const std::string& s) {
  if (slot) *slot = dup_str(s);
}

nlohmann::json footprint_json(const Footprint& f) {
  nlohmann::json out = nlohmann::json::array();
  switch (f.k) {
    case Footprint::K::Empty: break;
    case Footprint::K::Universe:
      out.push_back("*");
      break;
    case Footprint::K::Set:
      for (const auto& l : named_locs_set(f.set)) out.push_back(l);
      break;
  }
  return out;
}

std::string msg_text(const Msg& m) {
  if (m.is_label) return m.left ? "left" : "right";
  return print_local(m.v);
}

std::string chor_trace_jsonl(const std::vector<ChorStep>& trace) {
  std::ostringstream os;
  for (size_t i = 0; i < trace.size(); ++i) {
    nlohmann::json j;
    j["step_index"] = i;
    j["label"] = {{"kind", redex_to_string(trace[i].r)}};
    j["changed_locations"] = footprint_json(rloc(trace[i].r));
    os << j.dump() << "\n";
  }
  return os.str();
}

std::string system_trace_jsonl(const std::vector<SystemStep>& trace) {
  std::ostringstream os;
  for (size_t i = 0; i < trace.size(); ++i) {
    const auto& l = trace[i].label;
    nlohmann::json lab;
    nlohmann::json changed = nlohmann::json::array();
    switch (l.k) {
      case SystemLabel::K::Iota:
        lab["kind"] = "iota";
        changed.push_back(l.loc);
        break;
      case SystemLabel::K::IotaSync:
        lab["kind"] = "iota-sync";
        for (const auto& [loc, _] : trace[i].next) changed.push_back(loc);
        break;
      case SystemLabel::K::Comm: {
        lab["kind"] = "comm";
        lab["sender"] = l.loc;
        lab["message"] = msg_text(l.m);
        nlohmann::json rcpt = nlohmann::json::array();
        if (auto g = ground_set(l.rho))
          for (const auto& r : *g) rcpt.push_back(r);
        lab["recipients"] = rcpt;
        changed.push_back(l.loc);
        for (const auto& r : rcpt) changed.push_back(r);
        break;
      }
    }
    nlohmann::json j;
    j["step_index"] = i;
    j["label"] = lab;
    j["changed_locations"] = changed;
    os << j.dump() << "\n";
  }
  return os.str();
}

std::string system_text(const System& pi) {
  std::ostringstream os;
  for (const auto& [l, e] : pi) os << l << " |> " << net_to_string(e) << "\n";
  return os.str();
}

}  // namespace

extern "C" {

void qc_string_free(char* s) { std::free(s); }

qc_status qc_parse(const char* text, qc_program** out, char** diagnostics) {
  if (!text || !out) return QC_ERR_BADARG;
  *out = nullptr;
  std::vector<Diagnostic> ds;
  auto f = parse_source(text, &ds);
  if (!f) {
    std::ostringstream os;
    for (const auto& d : ds) os << diagnostic_to_string(d) << "\n";
    put(diagnostics, os.str());
    return QC_ERR_PARSE;
  }
  auto p = new qc_program{*f, link_main(*f)};
  *out = p;
  if (diagnostics) *diagnostics = dup_str("");
  return QC_OK;
}

void qc_program_free(qc_program* p) { delete p; }

qc_status qc_check(qc_program* p, char** out) {
  if (!p) return QC_ERR_BADARG;
  std::string diag;
  auto t = type_of({}, {}, {}, p->linked, p->file.table, &diag);
  if (!t) {
    put(out, diag);
    return QC_ERR_TYPE;
  }
  if (!ct_equal(*t, p->file.main_type)) {
    put(out, "declared type " + print_ctype(p->file.main_type) +
                 " differs from the inferred type " + print_ctype(*t));
    return QC_ERR_TYPE;
  }
  put(out, print_ctype(*t));
  return QC_OK;
}

qc_status qc_run(qc_program* p, int fuel, int strategy, uint32_t seed,
                 char** result, char** trace_jsonl) {
  if (!p || fuel < 0) return QC_ERR_BADARG;
  auto strat = strategy == 1 ? ChorStrategy::Random : ChorStrategy::Leftmost;
  auto r = run_chor(p->linked, p->file.table, fuel, strat, seed);
  put(result, print_chor(r.final));
  put(trace_jsonl, chor_trace_jsonl(r.trace));
  switch (r.status) {
    case ChorRun::Status::Value: return QC_OK;
    case ChorRun::Status::Stuck: return QC_ERR_STUCK;
    case ChorRun::Status::FuelExhausted: return QC_ERR_FUEL;
  }
  return QC_ERR_BADARG;
}

qc_status qc_project(qc_program* p, const char* loc, char** out) {
  if (!p) return QC_ERR_BADARG;
  std::ostringstream os;
  if (loc) {
    ProjectionFailure fail;
    auto e = project(p->linked, loc, &fail);
    if (!e) {
      put(out, projection_failure_to_string(fail));
      return QC_ERR_PROJECTION;
    }
    os << loc << " |> " << net_to_string(*e) << "\n";
  } else {
    std::set<Location> locs(p->file.locations.begin(), p->file.locations.end());
    std::vector<std::pair<Location, ProjectionFailure>> fails;
    auto sys = project_system(p->linked, locs, &fails);
    if (!sys) {
      std::ostringstream fs;
      for (const auto& [l, f] : fails)
        fs << l << ": " << projection_failure_to_string(f) << "\n";
      put(out, fs.str());
      return QC_ERR_PROJECTION;
    }
    os << system_text(*sys);
  }
  put(out, os.str());
  return QC_OK;
}

qc_status qc_simulate(qc_program* p, int fuel, int scheduler, uint32_t seed,
                      char** final_state, char** trace_jsonl) {
  if (!p || fuel < 0) return QC_ERR_BADARG;
  std::set<Location> locs(p->file.locations.begin(), p->file.locations.end());
  auto sys = project_system(p->linked, locs);
  if (!sys) {
    put(final_state, "projection undefined");
    return QC_ERR_PROJECTION;
  }
  auto sched = scheduler == 1 ? NetScheduler::Seeded : NetScheduler::Leftmost;
  auto r = simulate(*sys, p->file.table, fuel, sched, seed);
  put(final_state, system_text(r.final));
  put(trace_jsonl, system_trace_jsonl(r.trace));
  switch (r.status) {
    case SimReport::Status::AllValues: return QC_OK;
    case SimReport::Status::Deadlocked: return QC_ERR_STUCK;
    case SimReport::Status::FuelExhausted: return QC_ERR_FUEL;
  }
  return QC_ERR_BADARG;
}

qc_status qc_explore(qc_program* p, int depth, char** graph_json) {
  if (!p || depth < 0) return QC_ERR_BADARG;
  std::set<Location> locs(p->file.locations.begin(), p->file.locations.end());
  auto sys = project_system(p->linked, locs);
  if (!sys) {
    put(graph_json, "{}");
    return QC_ERR_PROJECTION;
  }
  auto g = explore(*sys, p->file.table, depth);
  nlohmann::json j;
  j["states"] = nlohmann::json::array();
  auto tag_of = [&](size_t id) -> nlohmann::json {
    for (size_t v : g.all_values)
      if (v == id) return "all-values";
    for (size_t v : g.deadlocked)
      if (v == id) return "deadlocked";
    for (size_t v : g.frontier)
      if (v == id) return "frontier";
    return nullptr;
  };
  for (size_t i = 0; i < g.states.size(); ++i) {
    nlohmann::json st;
    st["id"] = i;
    st["terminal"] = tag_of(i);
    nlohmann::json progs;
    for (const auto& [l, e] : g.states[i]) progs[l] = net_to_string(e);
    st["locations"] = progs;
    j["states"].push_back(st);
  }
  j["edges"] = nlohmann::json::array();
  for (size_t i = 0; i < g.edges.size(); ++i)
    for (const auto& [label, to] : g.edges[i])
      j["edges"].push_back(
          {{"from", i}, {"label", system_label_to_string(label)}, {"to", to}});
  put(graph_json, j.dump());
  return QC_OK;
}

qc_status qc_conformance(const char* suite, uint64_t seed, int cases,
                         char** report_json, char** summary) {
  if (!suite || cases < 0) return QC_ERR_BADARG;
  auto r = run_suite(suite, seed, cases);
  put(report_json, report_to_json(r));
  put(summary, report_summary(r));
  return r.ok() ? QC_OK : QC_ERR_CONFORMANCE;
}

}  // extern "C"
