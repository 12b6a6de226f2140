#pragma once

#include "network.hpp"
#include "project.hpp"

namespace qc {

struct TheoremFailure {
  uint64_t seed = 0;
  std::string program;
  std::string witness;
};

struct TheoremReport {
  std::string theorem;  // preservation, progress, completeness, soundness,
                        // confluence, deadlock-freedom
  int cases = 0;
  std::vector<TheoremFailure> failures;
  bool ok() const { return failures.empty(); }
};

std::string report_to_json(const TheoremReport& r);
std::string report_summary(const TheoremReport& r);
TheoremReport merge_reports(const std::string& theorem,
                            const std::vector<TheoremReport>& rs);

// Every choreography reachable within `depth` steps still has type tau.
TheoremReport check_preservation(const ChorPtr& c, const CTypePtr& tau,
                                 const LocationTable& table, int depth,
                                 uint64_t seed = 0);

// Every reachable choreography is a value or can step.
TheoremReport check_progress(const ChorPtr& c, const CTypePtr& tau,
                             const LocationTable& table, int depth,
                             uint64_t seed = 0);

// For each choreographic successor C' within n steps, some system execution
// of the projection reaches a state the projection of C' is below. slack < 0
// means the default budget of 2n + 8 total system steps.
TheoremReport check_completeness(const ChorPtr& c, const std::set<Location>& locs,
                                 const LocationTable& table, int n, int slack = -1,
                                 uint64_t seed = 0);

// For each system state reachable within `depth`, some further execution and
// some choreographic successor line up again. Programs whose choreographic
// run exceeds local_fuel steps are skipped (the termination premise).
TheoremReport check_soundness(const ChorPtr& c, const std::set<Location>& locs,
                              const LocationTable& table, int depth,
                              int local_fuel = 1000, uint64_t seed = 0);

// All pairs of states reachable within `depth` have a common descendant.
TheoremReport check_confluence(const System& pi, const LocationTable& table,
                               int depth, uint64_t seed = 0);

// No reachable state within `depth` is stuck short of all-values.
TheoremReport check_deadlock_freedom(const ChorPtr& c, const std::set<Location>& locs,
                                     const LocationTable& table, int depth,
                                     uint64_t seed = 0);

// Generator-driven batch: runs `cases` checks of the named suite
// (preservation, progress, completeness, soundness, confluence,
// deadlock-freedom) over seeds seed, seed+1, ... Unknown suite names yield an
// empty report with one failure.
TheoremReport run_suite(const std::string& suite, uint64_t seed, int cases);

}  // namespace qc
