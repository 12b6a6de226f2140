#pragma once

#include "network.hpp"

namespace qc {

// Idempotent partial merge: homomorphic on matching constructors, unions
// one-sided allow-choice branches. Absent result = unmergeable.
std::optional<NetPtr> merge(const NetPtr& a, const NetPtr& b);

// E1 then E2, dropping E1 when it is already a value.
NetPtr seq_collapse(const NetPtr& a, const NetPtr& b);

struct ProjectionFailure {
  enum class Reason { MergeUndefined, FreeTypevarInBody, NamespaceVariableUnresolved };
  Reason reason = Reason::MergeUndefined;
  std::vector<std::string> path;  // constructor names from the root down
};
std::string projection_failure_to_string(const ProjectionFailure& f);

// Endpoint projection of C to location L. Partial: merge may be undefined and
// a location outside a binder's namespace may not reference the bound name.
std::optional<NetPtr> project(const ChorPtr& c, const Location& l,
                              ProjectionFailure* fail = nullptr);

std::optional<System> project_system(const ChorPtr& c, const std::set<Location>& locs,
                                     std::vector<std::pair<Location, ProjectionFailure>>* fails = nullptr);

// The structural order on network programs: compatible closure plus one-sided
// allow-choice weakening and absorption of already-evaluated sequence heads.
bool leq(const NetPtr& a, const NetPtr& b);
bool leq_system(const System& a, const System& b);

}  // namespace qc
