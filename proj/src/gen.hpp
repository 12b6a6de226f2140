#pragma once

#include <random>

#include "chor.hpp"

namespace qc {

// Knobs for random well-typed program generation.
struct GenConfig {
  uint64_t seed = 0;
  int max_depth = 3;       // choreography AST depth
  int universe = 3;        // number of named locations, >= 1
  bool recursion = false;  // allow self-application through fun bindings
  int local_depth = 2;     // embedded local expression depth
};

// The location table matching a config's universe: codes 0..n-1 name A, B, ...
LocationTable gen_table(const GenConfig& cfg);
std::vector<Location> gen_universe(const GenConfig& cfg);

struct GeneratedChor {
  ChorPtr c;
  CTypePtr type;
};

// Rule-directed generation: picks a typing rule and synthesizes its premises,
// so every emitted term re-checks. Throws std::runtime_error after bounded
// retries if no candidate survives the re-check.
GeneratedChor gen_well_typed(const GenConfig& cfg);

// Well-typed local terms: at a requested int/bool/list-of-int type, or at a
// random one.
LTermPtr gen_local(std::mt19937_64& rng, const LTypePtr& want, int depth);
LTermPtr gen_local_any(std::mt19937_64& rng, int depth);

}  // namespace qc
