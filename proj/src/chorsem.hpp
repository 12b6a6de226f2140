#pragma once

#include <vector>

#include "chor.hpp"

namespace qc {

// Step labels. Fun/Arg/PairL/PairR wrap the label of a step taken inside the
// corresponding evaluation-context frame.
struct Redex;
using RedexPtr = std::shared_ptr<const Redex>;

struct Redex {
  enum class K {
    Done, Fun, Arg, App, TApp, UnfoldFold,
    PairL, PairR, FstPair, SndPair, CaseInl, CaseInr,
    LetV, LetTy, Send, IfTrue, IfFalse
  };
  K k;
  LocSetPtr rho;             // Done / LetV / LetTy / Send target / IfTrue / IfFalse
  LTermPtr e1, e2;           // Done before/after
  LTermPtr v;                // LetV / Send value message
  bool msg_is_label = false; // Send carries a selection label instead of a value
  bool msg_left = true;
  CTypePtr t;                // LetTy reified type
  LocExpr loc;               // Send sender
  RedexPtr inner;            // Fun / Arg / PairL / PairR
};

bool redex_equal(const RedexPtr& a, const RedexPtr& b);
std::string redex_to_string(const RedexPtr& r);

// Locations a step touches / a choreography involves. The universe footprint
// stands for "all declared locations".
Footprint rloc(const RedexPtr& r);
Footprint cloc(const ChorPtr& c);

struct ChorStep {
  RedexPtr r;
  ChorPtr next;
};

// All one-step successors with their labels, including the out-of-order
// steps licensed by location disjointness.
std::vector<ChorStep> enabled_steps(const ChorPtr& c, const LocationTable& table);

// The successor for one specific label, if that label is enabled.
std::optional<ChorPtr> step_with(const ChorPtr& c, const RedexPtr& r,
                                 const LocationTable& table);

enum class ChorStrategy { Leftmost, Random };

struct ChorRun {
  enum class Status { Value, Stuck, FuelExhausted };
  Status status;
  ChorPtr final;
  std::vector<ChorStep> trace;
};

ChorRun run_chor(const ChorPtr& c, const LocationTable& table, int fuel,
                 ChorStrategy strategy, uint32_t seed = 0);

}  // namespace qc
