#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kinds.hpp"
#include "locsets.hpp"

namespace qc {

struct LocalType;
using LTypePtr = std::shared_ptr<const LocalType>;

struct LocalType {
  enum class K { Var, Loc, Set, Int, Bool, List, TyRep, Arrow, Forall };
  K k;
  std::string var;          // Var name / Forall binder
  LocSetPtr rho;            // Loc / Set annotation
  LTypePtr a, b;            // List elem (a), Arrow (a,b), Forall body (a)
};

LTypePtr lt_var(std::string a);
LTypePtr lt_loc(LocSetPtr rho);
LTypePtr lt_set(LocSetPtr rho);
LTypePtr lt_int();
LTypePtr lt_bool();
LTypePtr lt_list(LTypePtr t);
LTypePtr lt_tyrep();
LTypePtr lt_arrow(LTypePtr a, LTypePtr b);
LTypePtr lt_forall(std::string a, LTypePtr body);

bool lt_equal(const LTypePtr& a, const LTypePtr& b);  // up to alpha on Forall
std::string lt_to_string(const LTypePtr& t);
std::set<std::string> lt_ftv(const LTypePtr& t);

struct LocalTerm;
using LTermPtr = std::shared_ptr<const LocalTerm>;

struct LocalTerm {
  enum class K {
    Var, Fun, App, TyAbs, TyApp,
    Lit, Add, Eq, Lt, True, False, If,
    Nil, Cons, ListCase,
    ReprInt, ReprBool, ReprArrow,
    Ascribe
  };
  K k;
  std::string var;            // Var / Fun f / TyAbs binder / ListCase head var
  std::string var2;           // Fun x / ListCase tail var
  LTypePtr type;              // Fun param annotation, TyApp arg, Ascribe type
  long long lit = 0;          // Lit
  LTermPtr a, b, c;           // subterms
};

LTermPtr le_var(std::string x);
LTermPtr le_fun(std::string f, std::string x, LTypePtr t, LTermPtr body);
LTermPtr le_app(LTermPtr f, LTermPtr a);
LTermPtr le_tyabs(std::string a, LTermPtr body);
LTermPtr le_tyapp(LTermPtr e, LTypePtr t);
LTermPtr le_lit(long long n);
LTermPtr le_add(LTermPtr a, LTermPtr b);
LTermPtr le_eq(LTermPtr a, LTermPtr b);
LTermPtr le_lt(LTermPtr a, LTermPtr b);
LTermPtr le_true();
LTermPtr le_false();
LTermPtr le_if(LTermPtr c, LTermPtr t, LTermPtr f);
LTermPtr le_nil();
LTermPtr le_cons(LTermPtr h, LTermPtr t);
LTermPtr le_listcase(LTermPtr s, LTermPtr nil_case, std::string x, std::string y, LTermPtr cons_case);
LTermPtr le_repr_int();
LTermPtr le_repr_bool();
LTermPtr le_repr_arrow(LTermPtr a, LTermPtr b);
LTermPtr le_ascribe(LTermPtr e, LTypePtr t);

bool le_equal(const LTermPtr& a, const LTermPtr& b);
std::string le_to_string(const LTermPtr& e);

// Integer codes for locations; total via a default location.
struct LocationTable {
  std::map<long long, Location> codes;
  Location fallback = "?";

  const Location& resolve(long long n) const {
    auto it = codes.find(n);
    return it == codes.end() ? fallback : it->second;
  }
  // Some code resolving to l, if one exists.
  std::optional<long long> code_of(const Location& l) const;
};

// ---- Value predicate and small-step semantics ----

bool is_lvalue(const LTermPtr& e);
// Deterministic CBV left-to-right step; absent iff value or stuck.
std::optional<LTermPtr> lstep(const LTermPtr& e);
// Run to a value within fuel; absent if stuck or fuel exhausted.
std::optional<LTermPtr> leval(const LTermPtr& e, int fuel);

// ---- Typing ----

using LocalTyCtxFlat = std::vector<std::pair<std::string, LTypePtr>>;

bool lkind(const KindCtx& gamma, const LTypePtr& t);
bool lcheck(const KindCtx& gamma, const LocalTyCtxFlat& sigma, const LTermPtr& e,
            const LTypePtr& t, const LocationTable& table);
std::optional<LTypePtr> linfer(const KindCtx& gamma, const LocalTyCtxFlat& sigma,
                               const LTermPtr& e, const LocationTable& table);

// ---- Reification ----

std::optional<bool> reify_bool(const LTermPtr& v);
std::optional<Location> reify_loc(const LTermPtr& v, const LocationTable& table);
std::optional<std::set<Location>> reify_locset(const LTermPtr& v, const LocationTable& table);
std::optional<LTypePtr> reify_tyrep(const LTermPtr& v);

// ---- Substitution and free variables ----

std::set<std::string> le_fv(const LTermPtr& e);
std::set<std::string> le_ftv(const LTermPtr& e);

LTermPtr lsubst_term(const LTermPtr& e, const std::string& x, const LTermPtr& v);
LTypePtr lsubst_type(const LTypePtr& t, const std::string& a, const LTypePtr& s);
LTermPtr lsubst_type_in_term(const LTermPtr& e, const std::string& a, const LTypePtr& s);
// Location(-set) variable substitution into the annotations of local types/terms.
LTypePtr lt_subst_locvar(const LTypePtr& t, const std::string& a, const LocExpr& l);
LTypePtr lt_subst_setvar(const LTypePtr& t, const std::string& a, const LocSetPtr& s);
LTermPtr le_subst_locvar(const LTermPtr& e, const std::string& a, const LocExpr& l);
LTermPtr le_subst_setvar(const LTermPtr& e, const std::string& a, const LocSetPtr& s);

}  // namespace qc
