#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kinds.hpp"
#include "local.hpp"
#include "locsets.hpp"

namespace qc {

struct ChorType;
using CTypePtr = std::shared_ptr<const ChorType>;

// Choreography types: program types (*), plus embedded locations (*_l),
// location sets (*_s), and local types (*_e) so type application and type-let
// can carry any sort.
struct ChorType {
  enum class K { Var, At, Arrow, Forall, Prod, Sum, Mu, Loc, Set, Local };
  K k;
  std::string var;   // Var name / Forall binder / Mu binder
  Kind kind = Kind::Star;  // Forall binder kind
  LTypePtr local;    // At payload / Local
  LocSetPtr rho;     // At annotation / Set
  LocExpr loc;       // Loc
  CTypePtr a, b;     // Arrow/Prod/Sum sides; Forall/Mu body in a
};

CTypePtr ct_var(std::string a);
CTypePtr ct_at(LTypePtr t, LocSetPtr rho);
CTypePtr ct_arrow(CTypePtr a, CTypePtr b);
CTypePtr ct_forall(std::string a, Kind k, CTypePtr body);
CTypePtr ct_prod(CTypePtr a, CTypePtr b);
CTypePtr ct_sum(CTypePtr a, CTypePtr b);
CTypePtr ct_mu(std::string a, CTypePtr body);
CTypePtr ct_loc(LocExpr l);
CTypePtr ct_set(LocSetPtr rho);
CTypePtr ct_local(LTypePtr t);

// Structural equality up to alpha for forall/mu; location-set components are
// compared extensionally (mutual subset), the coarsest check the type system
// needs where sends produce unions.
bool ct_equal(const CTypePtr& a, const CTypePtr& b);
std::string ct_to_string(const CTypePtr& t);
std::set<std::string> ct_ftv(const CTypePtr& t);
std::set<Location> ct_named_locs(const CTypePtr& t);

struct Chor;
using ChorPtr = std::shared_ptr<const Chor>;

struct Chor {
  enum class K {
    Var, Done, Fun, App, TyAbs, TyApp,
    Fold, Unfold, Pair, Fst, Snd, Inl, Inr, Case,
    Send, Sync, If, LetLocal, LetType
  };
  K k;
  std::string var;   // Var X / Fun F / TyAbs+LetType binder / Case X / LetLocal x
  std::string var2;  // Fun X / Case Y
  CTypePtr type;     // Fun annotation / TyApp argument / Fold mu / Inl+Inr sum
  Kind kind = Kind::Star;  // TyAbs / LetType binder kind
  LocSetPtr rho;     // Done / Send target / Sync / If / LetLocal / LetType
  LocExpr loc;       // Send sender / Sync chooser
  bool dir_left = true;  // Sync selection label
  LTermPtr e;        // Done payload
  LTypePtr lty;      // LetLocal annotation
  ChorPtr a, b, c;   // subterms
};

ChorPtr c_var(std::string x);
ChorPtr c_done(LocSetPtr rho, LTermPtr e);
ChorPtr c_fun(std::string f, std::string x, CTypePtr t, ChorPtr body);
ChorPtr c_app(ChorPtr f, ChorPtr a);
ChorPtr c_tyabs(std::string a, Kind k, ChorPtr body);
ChorPtr c_tyapp(ChorPtr f, CTypePtr t);
ChorPtr c_fold(CTypePtr mu, ChorPtr body);
ChorPtr c_unfold(ChorPtr body);
ChorPtr c_pair(ChorPtr a, ChorPtr b);
ChorPtr c_fst(ChorPtr a);
ChorPtr c_snd(ChorPtr a);
ChorPtr c_inl(CTypePtr sum, ChorPtr a);
ChorPtr c_inr(CTypePtr sum, ChorPtr a);
ChorPtr c_case(ChorPtr scrut, std::string x, ChorPtr l, std::string y, ChorPtr r);
ChorPtr c_send(ChorPtr subj, LocExpr from, LocSetPtr to);
ChorPtr c_sync(LocExpr from, bool left, LocSetPtr to, ChorPtr body);
ChorPtr c_if(LocSetPtr rho, ChorPtr cond, ChorPtr then_c, ChorPtr else_c);
ChorPtr c_let_local(LocSetPtr rho, std::string x, LTypePtr t, ChorPtr c1, ChorPtr c2);
ChorPtr c_let_type(LocSetPtr rho, std::string a, Kind k, ChorPtr c1, ChorPtr c2);

bool c_equal(const ChorPtr& a, const ChorPtr& b);
std::string c_to_string(const ChorPtr& c);

bool is_chor_value(const ChorPtr& c);

// Concrete locations named anywhere in the choreography or its types.
std::set<Location> c_named_locs(const ChorPtr& c);

// Free choreography variables (X, F).
std::set<std::string> c_fcv(const ChorPtr& c);
// Free type variables (all sorts).
std::set<std::string> c_ftv(const ChorPtr& c);

// Local variables free in C whose namespace may overlap sigma minus the part
// necessarily inside rho_excl (pass nullptr to exclude nothing).
std::set<std::string> fv_diff(const ChorPtr& c, const LocSetPtr& sigma,
                              const LocSetPtr& rho_excl);
inline std::set<std::string> fv_rho(const ChorPtr& c, const LocSetPtr& rho) {
  return fv_diff(c, rho, nullptr);
}

// Capture-avoiding substitution of a choreography for a choreography variable.
ChorPtr subst_chor(const ChorPtr& c, const std::string& x, const ChorPtr& v);

// Namespace-aware local-variable substitution: replaces free x at namespaces
// contained in rho. Absent when some occurrence's namespace overlaps rho
// without being contained in it (a whole namespace must be substituted at
// once).
std::optional<ChorPtr> subst_local(const ChorPtr& c, const LocSetPtr& rho,
                                   const std::string& x, const LTermPtr& e);

// Type substitution C[a := t] / tau[a := t] where t's sort matches kind k.
// Location and location-set substitution renames local-let binders per the
// four-case rule so distinct namespaces never collapse.
CTypePtr ctype_subst(const CTypePtr& tau, const std::string& a, const CTypePtr& t, Kind k);
ChorPtr csubst_type(const ChorPtr& c, const std::string& a, const CTypePtr& t, Kind k);

}  // namespace qc
