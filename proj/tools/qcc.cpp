#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "qc/qc.h"

namespace {

// exit codes: 0 ok, 1 diagnostics, 2 projection failure, 3 conformance failure
constexpr int kExitOk = 0;
constexpr int kExitDiagnostics = 1;
constexpr int kExitProjection = 2;
constexpr int kExitConformance = 3;

struct Str {
  char* p = nullptr;
  ~Str() { qc_string_free(p); }
  std::string get() const { return p ? p : ""; }
};

struct Prog {
  qc_program* p = nullptr;
  ~Prog() { qc_program_free(p); }
};

uint64_t default_seed() {
  if (const char* env = std::getenv("QC_SEED")) return std::strtoull(env, nullptr, 10);
  return 0;
}

int load(const std::string& path, Prog& prog) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot open " << path << "\n";
    return kExitDiagnostics;
  }
  std::ostringstream os;
  os << in.rdbuf();
  Str diag;
  auto st = qc_parse(os.str().c_str(), &prog.p, &diag.p);
  if (st != QC_OK) {
    std::cerr << diag.get();
    return kExitDiagnostics;
  }
  return kExitOk;
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    return false;
  }
  out << content;
  return true;
}

int map_status(qc_status st) {
  switch (st) {
    case QC_OK: return kExitOk;
    case QC_ERR_PROJECTION: return kExitProjection;
    case QC_ERR_CONFORMANCE: return kExitConformance;
    default: return kExitDiagnostics;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"choreography checker, runner, projector, and test harness"};
  app.require_subcommand(1);

  std::string file, loc, trace_path, graph_path, suite = "preservation",
                    strategy = "leftmost";
  int fuel = 10000, depth = 10, cases = 100;
  uint64_t seed = default_seed();
  bool all_locs = false;

  auto* c_check = app.add_subcommand("check", "type-check a source file");
  c_check->add_option("file", file)->required();

  auto* c_run = app.add_subcommand("run", "execute the choreographic semantics");
  c_run->add_option("file", file)->required();
  c_run->add_option("--strategy", strategy)->check(CLI::IsMember({"leftmost", "random"}));
  c_run->add_option("--fuel", fuel);
  c_run->add_option("--seed", seed);
  c_run->add_option("--trace", trace_path);

  auto* c_project = app.add_subcommand("project", "endpoint projection");
  c_project->add_option("file", file)->required();
  c_project->add_option("--loc", loc);
  c_project->add_flag("--all", all_locs);

  auto* c_sim = app.add_subcommand("simulate", "run the projected system");
  c_sim->add_option("file", file)->required();
  c_sim->add_option("--seed", seed);
  c_sim->add_option("--fuel", fuel);
  c_sim->add_option("--trace", trace_path);

  auto* c_explore = app.add_subcommand("explore", "bounded system state space");
  c_explore->add_option("file", file)->required();
  c_explore->add_option("--depth", depth);
  c_explore->add_option("--graph", graph_path);

  auto* c_conf = app.add_subcommand("conformance", "metatheory suites");
  c_conf->add_option("--suite", suite);
  c_conf->add_option("--seed", seed);
  c_conf->add_option("--cases", cases);

  CLI11_PARSE(app, argc, argv);

  if (c_conf->parsed()) {
    Str report, summary;
    auto st = qc_conformance(suite.c_str(), seed, cases, &report.p, &summary.p);
    std::cout << summary.get() << "\n";
    return map_status(st);
  }

  Prog prog;
  if (int rc = load(file, prog); rc != kExitOk) return rc;

  if (c_check->parsed()) {
    Str out;
    auto st = qc_check(prog.p, &out.p);
    if (st != QC_OK) {
      std::cerr << out.get() << "\n";
      return kExitDiagnostics;
    }
    std::cout << out.get() << "\n";
    return kExitOk;
  }

  if (c_run->parsed()) {
    Str result, trace;
    auto st = qc_run(prog.p, fuel, strategy == "random" ? 1 : 0,
                     static_cast<uint32_t>(seed), &result.p, &trace.p);
    if (!trace_path.empty() && !write_file(trace_path, trace.get()))
      return kExitDiagnostics;
    std::cout << result.get() << "\n";
    if (st == QC_ERR_STUCK) std::cerr << "stuck\n";
    if (st == QC_ERR_FUEL) std::cerr << "fuel exhausted\n";
    return map_status(st);
  }

  if (c_project->parsed()) {
    Str out;
    auto st = qc_project(prog.p, all_locs || loc.empty() ? nullptr : loc.c_str(),
                         &out.p);
    if (st != QC_OK) {
      std::cerr << out.get() << "\n";
      return map_status(st);
    }
    std::cout << out.get();
    return kExitOk;
  }

  if (c_sim->parsed()) {
    Str final_state, trace;
    auto st = qc_simulate(prog.p, fuel, 1, static_cast<uint32_t>(seed),
                          &final_state.p, &trace.p);
    if (!trace_path.empty() && !write_file(trace_path, trace.get()))
      return kExitDiagnostics;
    std::cout << final_state.get();
    if (st == QC_ERR_STUCK) std::cerr << "deadlocked\n";
    if (st == QC_ERR_FUEL) std::cerr << "fuel exhausted\n";
    return map_status(st);
  }

  if (c_explore->parsed()) {
    Str graph;
    auto st = qc_explore(prog.p, depth, &graph.p);
    if (st != QC_OK) return map_status(st);
    if (!graph_path.empty()) {
      if (!write_file(graph_path, graph.get())) return kExitDiagnostics;
    } else {
      std::cout << graph.get() << "\n";
    }
    return kExitOk;
  }

  return kExitDiagnostics;
}
