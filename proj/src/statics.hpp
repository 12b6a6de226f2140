#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chor.hpp"

namespace qc {

// Choreographic typing context Delta: X -> tau.
using ChorTyCtx = std::vector<std::pair<std::string, CTypePtr>>;

// Local ascription context Sigma: rho.x : t_e.
struct LocalBinding {
  LocSetPtr rho;
  std::string x;
  LTypePtr t;
};
using ChorLocalCtx = std::vector<LocalBinding>;

std::optional<Kind> kind_of(const KindCtx& gamma, const CTypePtr& t);

// Restriction of Sigma to the variables a computation at rho can use:
// keep rho'.x : t when rho is contained in rho'.
LocalTyCtxFlat sigma_project(const ChorLocalCtx& sigma, const LocSetPtr& rho);

// Syntax-directed type synthesis. On failure, if diag is non-null it receives
// a message naming the rule and the failing premise.
std::optional<CTypePtr> type_of(const KindCtx& gamma, const ChorTyCtx& delta,
                                const ChorLocalCtx& sigma, const ChorPtr& c,
                                const LocationTable& table,
                                std::string* diag = nullptr);

bool ctx_wf(const KindCtx& gamma, const ChorTyCtx& delta, const ChorLocalCtx& sigma);

}  // namespace qc
