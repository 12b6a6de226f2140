#include "local.hpp"

#include <atomic>
#include <sstream>

namespace qc {

std::string fresh_name(const std::string& base) {
  static std::atomic<uint64_t> counter{0};
  // Strip an existing %n suffix so renamed names stay short.
  auto cut = base.find('%');
  return base.substr(0, cut) + "%" + std::to_string(++counter);
}

// ---- constructors ----

namespace {
LTypePtr mk_t(LocalType t) { return std::make_shared<LocalType>(std::move(t)); }
LTermPtr mk_e(LocalTerm e) { return std::make_shared<LocalTerm>(std::move(e)); }
using TK = LocalType::K;
using EK = LocalTerm::K;
}  // namespace

LTypePtr lt_var(std::string a) { return mk_t({TK::Var, std::move(a), nullptr, nullptr, nullptr}); }
LTypePtr lt_loc(LocSetPtr rho) { return mk_t({TK::Loc, "", std::move(rho), nullptr, nullptr}); }
LTypePtr lt_set(LocSetPtr rho) { return mk_t({TK::Set, "", std::move(rho), nullptr, nullptr}); }
LTypePtr lt_int() { static LTypePtr t = mk_t({TK::Int, "", nullptr, nullptr, nullptr}); return t; }
LTypePtr lt_bool() { static LTypePtr t = mk_t({TK::Bool, "", nullptr, nullptr, nullptr}); return t; }
LTypePtr lt_list(LTypePtr t) { return mk_t({TK::List, "", nullptr, std::move(t), nullptr}); }
LTypePtr lt_tyrep() { static LTypePtr t = mk_t({TK::TyRep, "", nullptr, nullptr, nullptr}); return t; }
LTypePtr lt_arrow(LTypePtr a, LTypePtr b) { return mk_t({TK::Arrow, "", nullptr, std::move(a), std::move(b)}); }
LTypePtr lt_forall(std::string a, LTypePtr body) { return mk_t({TK::Forall, std::move(a), nullptr, std::move(body), nullptr}); }

LTermPtr le_var(std::string x) { LocalTerm e{}; e.k = EK::Var; e.var = std::move(x); return mk_e(std::move(e)); }
LTermPtr le_fun(std::string f, std::string x, LTypePtr t, LTermPtr body) {
  LocalTerm e{}; e.k = EK::Fun; e.var = std::move(f); e.var2 = std::move(x);
  e.type = std::move(t); e.a = std::move(body); return mk_e(std::move(e));
}
LTermPtr le_app(LTermPtr f, LTermPtr a) { LocalTerm e{}; e.k = EK::App; e.a = std::move(f); e.b = std::move(a); return mk_e(std::move(e)); }
LTermPtr le_tyabs(std::string a, LTermPtr body) { LocalTerm e{}; e.k = EK::TyAbs; e.var = std::move(a); e.a = std::move(body); return mk_e(std::move(e)); }
LTermPtr le_tyapp(LTermPtr b, LTypePtr t) { LocalTerm e{}; e.k = EK::TyApp; e.a = std::move(b); e.type = std::move(t); return mk_e(std::move(e)); }
LTermPtr le_lit(long long n) { LocalTerm e{}; e.k = EK::Lit; e.lit = n; return mk_e(std::move(e)); }
LTermPtr le_add(LTermPtr a, LTermPtr b) { LocalTerm e{}; e.k = EK::Add; e.a = std::move(a); e.b = std::move(b); return mk_e(std::move(e)); }
LTermPtr le_eq(LTermPtr a, LTermPtr b) { LocalTerm e{}; e.k = EK::Eq; e.a = std::move(a); e.b = std::move(b); return mk_e(std::move(e)); }
LTermPtr le_lt(LTermPtr a, LTermPtr b) { LocalTerm e{}; e.k = EK::Lt; e.a = std::move(a); e.b = std::move(b); return mk_e(std::move(e)); }
LTermPtr le_true() { LocalTerm e{}; e.k = EK::True; return mk_e(std::move(e)); }
LTermPtr le_false() { LocalTerm e{}; e.k = EK::False; return mk_e(std::move(e)); }
LTermPtr le_if(LTermPtr c, LTermPtr t, LTermPtr f) {
  LocalTerm e{}; e.k = EK::If; e.a = std::move(c); e.b = std::move(t); e.c = std::move(f); return mk_e(std::move(e));
}
LTermPtr le_nil() { LocalTerm e{}; e.k = EK::Nil; return mk_e(std::move(e)); }
LTermPtr le_cons(LTermPtr h, LTermPtr t) { LocalTerm e{}; e.k = EK::Cons; e.a = std::move(h); e.b = std::move(t); return mk_e(std::move(e)); }
LTermPtr le_listcase(LTermPtr s, LTermPtr nc, std::string x, std::string y, LTermPtr cc) {
  LocalTerm e{}; e.k = EK::ListCase; e.a = std::move(s); e.b = std::move(nc);
  e.var = std::move(x); e.var2 = std::move(y); e.c = std::move(cc); return mk_e(std::move(e));
}
LTermPtr le_repr_int() { LocalTerm e{}; e.k = EK::ReprInt; return mk_e(std::move(e)); }
LTermPtr le_repr_bool() { LocalTerm e{}; e.k = EK::ReprBool; return mk_e(std::move(e)); }
LTermPtr le_repr_arrow(LTermPtr a, LTermPtr b) { LocalTerm e{}; e.k = EK::ReprArrow; e.a = std::move(a); e.b = std::move(b); return mk_e(std::move(e)); }
LTermPtr le_ascribe(LTermPtr x, LTypePtr t) { LocalTerm e{}; e.k = EK::Ascribe; e.a = std::move(x); e.type = std::move(t); return mk_e(std::move(e)); }

// ---- equality / printing ----

bool lt_equal(const LTypePtr& a, const LTypePtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b || a->k != b->k) return false;
  switch (a->k) {
    case TK::Var: return a->var == b->var;
    case TK::Loc:
    case TK::Set: return ls_equal(a->rho, b->rho);
    case TK::Int: case TK::Bool: case TK::TyRep: return true;
    case TK::List: return lt_equal(a->a, b->a);
    case TK::Arrow: return lt_equal(a->a, b->a) && lt_equal(a->b, b->b);
    case TK::Forall: {
      if (a->var == b->var) return lt_equal(a->a, b->a);
      auto fresh = lt_var(fresh_name(a->var));
      return lt_equal(lsubst_type(a->a, a->var, fresh),
                      lsubst_type(b->a, b->var, fresh));
    }
  }
  return false;
}

std::string lt_to_string(const LTypePtr& t) {
  switch (t->k) {
    case TK::Var: return t->var;
    case TK::Loc: return "loc" + ls_to_string(t->rho);
    case TK::Set: return "locset" + ls_to_string(t->rho);
    case TK::Int: return "int";
    case TK::Bool: return "bool";
    case TK::List: return "list (" + lt_to_string(t->a) + ")";
    case TK::TyRep: return "tyrep";
    case TK::Arrow: return "(" + lt_to_string(t->a) + " -> " + lt_to_string(t->b) + ")";
    case TK::Forall: return "(forall " + t->var + ". " + lt_to_string(t->a) + ")";
  }
  return "?";
}

std::set<std::string> lt_ftv(const LTypePtr& t) {
  std::set<std::string> out;
  switch (t->k) {
    case TK::Var: out.insert(t->var); break;
    case TK::Loc:
    case TK::Set: out = fv_set(t->rho); break;
    case TK::Int: case TK::Bool: case TK::TyRep: break;
    case TK::List: out = lt_ftv(t->a); break;
    case TK::Arrow: {
      out = lt_ftv(t->a);
      auto r = lt_ftv(t->b);
      out.insert(r.begin(), r.end());
      break;
    }
    case TK::Forall:
      out = lt_ftv(t->a);
      out.erase(t->var);
      break;
  }
  return out;
}

bool le_equal(const LTermPtr& a, const LTermPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b || a->k != b->k) return false;
  if (a->var != b->var || a->var2 != b->var2 || a->lit != b->lit) return false;
  if ((a->type != nullptr) != (b->type != nullptr)) return false;
  if (a->type && !lt_equal(a->type, b->type)) return false;
  for (auto sel : {&LocalTerm::a, &LocalTerm::b, &LocalTerm::c}) {
    const auto& x = (*a).*sel;
    const auto& y = (*b).*sel;
    if ((x != nullptr) != (y != nullptr)) return false;
    if (x && !le_equal(x, y)) return false;
  }
  return true;
}

std::string le_to_string(const LTermPtr& e) {
  std::ostringstream os;
  switch (e->k) {
    case EK::Var: os << e->var; break;
    case EK::Fun:
      os << "(fun " << e->var << "(" << e->var2 << " : " << lt_to_string(e->type)
         << ") = " << le_to_string(e->a) << ")";
      break;
    case EK::App: os << "(" << le_to_string(e->a) << " " << le_to_string(e->b) << ")"; break;
    case EK::TyAbs: os << "(tyfun " << e->var << " => " << le_to_string(e->a) << ")"; break;
    case EK::TyApp: os << "(tyapp " << le_to_string(e->a) << " [" << lt_to_string(e->type) << "])"; break;
    case EK::Lit: os << e->lit; break;
    case EK::Add: os << "(" << le_to_string(e->a) << " + " << le_to_string(e->b) << ")"; break;
    case EK::Eq: os << "(" << le_to_string(e->a) << " = " << le_to_string(e->b) << ")"; break;
    case EK::Lt: os << "(" << le_to_string(e->a) << " < " << le_to_string(e->b) << ")"; break;
    case EK::True: os << "true"; break;
    case EK::False: os << "false"; break;
    case EK::If:
      os << "(if " << le_to_string(e->a) << " then " << le_to_string(e->b)
         << " else " << le_to_string(e->c) << ")";
      break;
    case EK::Nil: os << "nil"; break;
    case EK::Cons: os << "cons(" << le_to_string(e->a) << ", " << le_to_string(e->b) << ")"; break;
    case EK::ListCase:
      os << "(listcase " << le_to_string(e->a) << " of nil => " << le_to_string(e->b)
         << " | cons(" << e->var << ", " << e->var2 << ") => " << le_to_string(e->c) << ")";
      break;
    case EK::ReprInt: os << "reprty(int)"; break;
    case EK::ReprBool: os << "reprty(bool)"; break;
    case EK::ReprArrow:
      os << "(" << le_to_string(e->a) << " ~arrow~ " << le_to_string(e->b) << ")";
      break;
    case EK::Ascribe:
      os << "(" << le_to_string(e->a) << " : " << lt_to_string(e->type) << ")";
      break;
  }
  return os.str();
}

std::optional<long long> LocationTable::code_of(const Location& l) const {
  for (const auto& [n, loc] : codes)
    if (loc == l) return n;
  return std::nullopt;
}

// ---- values and stepping ----

bool is_lvalue(const LTermPtr& e) {
  switch (e->k) {
    case EK::Lit: case EK::True: case EK::False: case EK::Nil:
    case EK::Fun: case EK::TyAbs:
    case EK::ReprInt: case EK::ReprBool:
      return true;
    case EK::Cons:
    case EK::ReprArrow:
      return is_lvalue(e->a) && is_lvalue(e->b);
    case EK::Ascribe:
      // Ascribed values stay values so informative types (location codes,
      // code lists) survive evaluation.
      return is_lvalue(e->a);
    default:
      return false;
  }
}

namespace {

// Look through ascriptions when eliminating a value.
const LTermPtr& lstrip(const LTermPtr& e) {
  const LTermPtr* cur = &e;
  while ((*cur)->k == EK::Ascribe) cur = &(*cur)->a;
  return *cur;
}

}  // namespace

namespace {

// Step the leftmost of (a, b); rebuilds with the given constructor.
template <typename Rebuild2>
std::optional<LTermPtr> step2(const LTermPtr& a, const LTermPtr& b, Rebuild2 rb) {
  if (auto a2 = lstep(a)) return rb(*a2, b);
  if (is_lvalue(a))
    if (auto b2 = lstep(b)) return rb(a, *b2);
  return std::nullopt;
}

}  // namespace

std::optional<LTermPtr> lstep(const LTermPtr& e) {
  switch (e->k) {
    case EK::App: {
      if (auto s = step2(e->a, e->b, le_app)) return s;
      const auto& f = lstrip(e->a);
      if (is_lvalue(f) && is_lvalue(e->b) && f->k == EK::Fun) {
        auto unrolled = lsubst_term(f->a, f->var, f);
        return lsubst_term(unrolled, f->var2, e->b);
      }
      return std::nullopt;
    }
    case EK::TyApp: {
      if (auto a2 = lstep(e->a)) return le_tyapp(*a2, e->type);
      const auto& f = lstrip(e->a);
      if (f->k == EK::TyAbs) return lsubst_type_in_term(f->a, f->var, e->type);
      return std::nullopt;
    }
    case EK::Add:
    case EK::Eq:
    case EK::Lt: {
      auto rb = [&](LTermPtr x, LTermPtr y) {
        return e->k == EK::Add ? le_add(x, y) : e->k == EK::Eq ? le_eq(x, y) : le_lt(x, y);
      };
      if (auto s = step2(e->a, e->b, rb)) return s;
      const auto& x = lstrip(e->a);
      const auto& y = lstrip(e->b);
      if (x->k == EK::Lit && y->k == EK::Lit) {
        if (e->k == EK::Add) return le_lit(x->lit + y->lit);
        bool r = e->k == EK::Eq ? x->lit == y->lit : x->lit < y->lit;
        return r ? le_true() : le_false();
      }
      return std::nullopt;
    }
    case EK::If: {
      if (auto c2 = lstep(e->a)) return le_if(*c2, e->b, e->c);
      const auto& cond = lstrip(e->a);
      if (cond->k == EK::True) return e->b;
      if (cond->k == EK::False) return e->c;
      return std::nullopt;
    }
    case EK::Cons:
      return step2(e->a, e->b, le_cons);
    case EK::ListCase: {
      if (auto s2 = lstep(e->a))
        return le_listcase(*s2, e->b, e->var, e->var2, e->c);
      const auto& s = lstrip(e->a);
      if (s->k == EK::Nil) return e->b;
      if (s->k == EK::Cons && is_lvalue(s)) {
        auto r = lsubst_term(e->c, e->var, s->a);
        return lsubst_term(r, e->var2, s->b);
      }
      return std::nullopt;
    }
    case EK::ReprArrow:
      return step2(e->a, e->b, le_repr_arrow);
    case EK::Ascribe: {
      if (auto a2 = lstep(e->a)) return le_ascribe(*a2, e->type);
      return std::nullopt;
    }
    default:
      return std::nullopt;  // values and stuck variables
  }
}

std::optional<LTermPtr> leval(const LTermPtr& e, int fuel) {
  LTermPtr cur = e;
  for (int i = 0; i <= fuel; ++i) {
    if (is_lvalue(cur)) return cur;
    auto next = lstep(cur);
    if (!next) return std::nullopt;
    cur = *next;
  }
  return std::nullopt;
}

// ---- kinding and typing ----

namespace {

bool set_wf(const KindCtx& gamma, const LocSetPtr& rho) {
  switch (rho->k) {
    case LocSet::K::Var: {
      auto it = gamma.find(rho->var);
      return it != gamma.end() && it->second == Kind::StarSet;
    }
    case LocSet::K::Sng: {
      if (!rho->elem.is_var) return true;
      auto it = gamma.find(rho->elem.name);
      return it != gamma.end() && it->second == Kind::StarLoc;
    }
    case LocSet::K::Union:
      return set_wf(gamma, rho->lhs) && set_wf(gamma, rho->rhs);
  }
  return false;
}

}  // namespace

bool lkind(const KindCtx& gamma, const LTypePtr& t) {
  switch (t->k) {
    case TK::Var: {
      auto it = gamma.find(t->var);
      return it != gamma.end() && it->second == Kind::StarLocal;
    }
    case TK::Loc:
    case TK::Set:
      return set_wf(gamma, t->rho);
    case TK::Int: case TK::Bool: case TK::TyRep:
      return true;
    case TK::List:
      return lkind(gamma, t->a);
    case TK::Arrow:
      return lkind(gamma, t->a) && lkind(gamma, t->b);
    case TK::Forall: {
      KindCtx g2 = gamma;
      g2[t->var] = Kind::StarLocal;
      return lkind(g2, t->a);
    }
  }
  return false;
}

namespace {

std::optional<LTypePtr> ctx_lookup(const LocalTyCtxFlat& sigma, const std::string& x) {
  for (auto it = sigma.rbegin(); it != sigma.rend(); ++it)
    if (it->first == x) return it->second;
  return std::nullopt;
}

}  // namespace

bool lcheck(const KindCtx& gamma, const LocalTyCtxFlat& sigma, const LTermPtr& e,
            const LTypePtr& t, const LocationTable& table) {
  if (!lkind(gamma, t)) return false;
  switch (e->k) {
    case EK::Var: {
      auto found = ctx_lookup(sigma, e->var);
      return found && lt_equal(*found, t);
    }
    case EK::Lit:
      if (t->k == TK::Int) return true;
      // n : loc_rho when n's code resolves to a location necessarily in rho.
      if (t->k == TK::Loc) return nec_in(table.resolve(e->lit), t->rho);
      return false;
    case EK::True:
    case EK::False:
      return t->k == TK::Bool;
    case EK::Add:
      return t->k == TK::Int && lcheck(gamma, sigma, e->a, lt_int(), table) &&
             lcheck(gamma, sigma, e->b, lt_int(), table);
    case EK::Eq:
    case EK::Lt:
      return t->k == TK::Bool && lcheck(gamma, sigma, e->a, lt_int(), table) &&
             lcheck(gamma, sigma, e->b, lt_int(), table);
    case EK::If:
      return lcheck(gamma, sigma, e->a, lt_bool(), table) &&
             lcheck(gamma, sigma, e->b, t, table) &&
             lcheck(gamma, sigma, e->c, t, table);
    case EK::Nil:
      return t->k == TK::List || t->k == TK::Set;
    case EK::Cons:
      if (t->k == TK::List)
        return lcheck(gamma, sigma, e->a, t->a, table) && lcheck(gamma, sigma, e->b, t, table);
      if (t->k == TK::Set)
        // Location-set representations are lists of location codes.
        return lcheck(gamma, sigma, e->a, lt_loc(t->rho), table) &&
               lcheck(gamma, sigma, e->b, t, table);
      return false;
    case EK::Fun: {
      if (t->k != TK::Arrow || !lt_equal(t->a, e->type)) return false;
      LocalTyCtxFlat s2 = sigma;
      s2.emplace_back(e->var, t);
      s2.emplace_back(e->var2, t->a);
      return lcheck(gamma, s2, e->a, t->b, table);
    }
    case EK::App: {
      auto tf = linfer(gamma, sigma, e->a, table);
      if (!tf || (*tf)->k != TK::Arrow) return false;
      return lcheck(gamma, sigma, e->b, (*tf)->a, table) && lt_equal((*tf)->b, t);
    }
    case EK::TyAbs: {
      if (t->k != TK::Forall) return false;
      KindCtx g2 = gamma;
      g2[e->var] = Kind::StarLocal;
      return lcheck(g2, sigma, e->a, lsubst_type(t->a, t->var, lt_var(e->var)), table);
    }
    case EK::TyApp: {
      auto ti = linfer(gamma, sigma, e, table);
      return ti && lt_equal(*ti, t);
    }
    case EK::ListCase: {
      auto ts = linfer(gamma, sigma, e->a, table);
      if (!ts || (*ts)->k != TK::List) return false;
      if (!lcheck(gamma, sigma, e->b, t, table)) return false;
      LocalTyCtxFlat s2 = sigma;
      s2.emplace_back(e->var, (*ts)->a);
      s2.emplace_back(e->var2, *ts);
      return lcheck(gamma, s2, e->c, t, table);
    }
    case EK::ReprInt:
    case EK::ReprBool:
      return t->k == TK::TyRep;
    case EK::ReprArrow:
      return t->k == TK::TyRep && lcheck(gamma, sigma, e->a, lt_tyrep(), table) &&
             lcheck(gamma, sigma, e->b, lt_tyrep(), table);
    case EK::Ascribe:
      return lt_equal(e->type, t) && lcheck(gamma, sigma, e->a, e->type, table);
  }
  return false;
}

std::optional<LTypePtr> linfer(const KindCtx& gamma, const LocalTyCtxFlat& sigma,
                               const LTermPtr& e, const LocationTable& table) {
  switch (e->k) {
    case EK::Var: return ctx_lookup(sigma, e->var);
    case EK::Lit: return lt_int();
    case EK::True: case EK::False: return lt_bool();
    case EK::Add:
      if (lcheck(gamma, sigma, e->a, lt_int(), table) &&
          lcheck(gamma, sigma, e->b, lt_int(), table))
        return lt_int();
      return std::nullopt;
    case EK::Eq: case EK::Lt:
      if (lcheck(gamma, sigma, e->a, lt_int(), table) &&
          lcheck(gamma, sigma, e->b, lt_int(), table))
        return lt_bool();
      return std::nullopt;
    case EK::If: {
      if (!lcheck(gamma, sigma, e->a, lt_bool(), table)) return std::nullopt;
      auto t1 = linfer(gamma, sigma, e->b, table);
      if (t1 && lcheck(gamma, sigma, e->c, *t1, table)) return t1;
      auto t2 = linfer(gamma, sigma, e->c, table);
      if (t2 && lcheck(gamma, sigma, e->b, *t2, table)) return t2;
      return std::nullopt;
    }
    case EK::Cons: {
      auto th = linfer(gamma, sigma, e->a, table);
      if (!th) return std::nullopt;
      auto tl = lt_list(*th);
      if (lcheck(gamma, sigma, e->b, tl, table)) return tl;
      return std::nullopt;
    }
    case EK::Fun: {
      // Non-recursive uses only; recursive functions need an ascription.
      if (!lkind(gamma, e->type)) return std::nullopt;
      LocalTyCtxFlat s2 = sigma;
      s2.emplace_back(e->var2, e->type);
      auto tb = linfer(gamma, s2, e->a, table);
      if (!tb) return std::nullopt;
      auto ty = lt_arrow(e->type, *tb);
      // Re-check so a recursive reference to the function name is rejected
      // rather than mistyped.
      if (!lcheck(gamma, sigma, e, ty, table)) return std::nullopt;
      return ty;
    }
    case EK::App: {
      auto tf = linfer(gamma, sigma, e->a, table);
      if (!tf || (*tf)->k != TK::Arrow) return std::nullopt;
      if (!lcheck(gamma, sigma, e->b, (*tf)->a, table)) return std::nullopt;
      return (*tf)->b;
    }
    case EK::TyAbs: {
      KindCtx g2 = gamma;
      g2[e->var] = Kind::StarLocal;
      auto tb = linfer(g2, sigma, e->a, table);
      if (!tb) return std::nullopt;
      return lt_forall(e->var, *tb);
    }
    case EK::TyApp: {
      auto tf = linfer(gamma, sigma, e->a, table);
      if (!tf || (*tf)->k != TK::Forall) return std::nullopt;
      if (!lkind(gamma, e->type)) return std::nullopt;
      return lsubst_type((*tf)->a, (*tf)->var, e->type);
    }
    case EK::Nil: return std::nullopt;  // ambiguous without an ascription
    case EK::ListCase: {
      auto ts = linfer(gamma, sigma, e->a, table);
      if (!ts || (*ts)->k != TK::List) return std::nullopt;
      auto tn = linfer(gamma, sigma, e->b, table);
      if (!tn) return std::nullopt;
      LocalTyCtxFlat s2 = sigma;
      s2.emplace_back(e->var, (*ts)->a);
      s2.emplace_back(e->var2, *ts);
      if (!lcheck(gamma, s2, e->c, *tn, table)) return std::nullopt;
      return tn;
    }
    case EK::ReprInt: case EK::ReprBool: return lt_tyrep();
    case EK::ReprArrow:
      if (lcheck(gamma, sigma, e->a, lt_tyrep(), table) &&
          lcheck(gamma, sigma, e->b, lt_tyrep(), table))
        return lt_tyrep();
      return std::nullopt;
    case EK::Ascribe:
      if (lcheck(gamma, sigma, e->a, e->type, table)) return e->type;
      return std::nullopt;
  }
  return std::nullopt;
}

// ---- reification ----

std::optional<bool> reify_bool(const LTermPtr& v0) {
  const auto& v = lstrip(v0);
  if (v->k == EK::True) return true;
  if (v->k == EK::False) return false;
  return std::nullopt;
}

std::optional<Location> reify_loc(const LTermPtr& v0, const LocationTable& table) {
  const auto& v = lstrip(v0);
  if (v->k == EK::Lit) return table.resolve(v->lit);
  return std::nullopt;
}

std::optional<std::set<Location>> reify_locset(const LTermPtr& v, const LocationTable& table) {
  std::set<Location> out;
  LTermPtr cur = lstrip(v);
  while (cur->k == EK::Cons) {
    auto head = lstrip(cur->a);
    if (head->k != EK::Lit) return std::nullopt;
    out.insert(table.resolve(head->lit));
    cur = lstrip(cur->b);
  }
  if (cur->k != EK::Nil) return std::nullopt;
  return out;
}

std::optional<LTypePtr> reify_tyrep(const LTermPtr& v0) {
  const auto& v = lstrip(v0);
  switch (v->k) {
    case EK::ReprInt: return lt_int();
    case EK::ReprBool: return lt_bool();
    case EK::ReprArrow: {
      auto a = reify_tyrep(v->a);
      auto b = reify_tyrep(v->b);
      if (!a || !b) return std::nullopt;
      return lt_arrow(*a, *b);
    }
    default: return std::nullopt;
  }
}

// ---- free variables and substitution ----

std::set<std::string> le_fv(const LTermPtr& e) {
  std::set<std::string> out;
  switch (e->k) {
    case EK::Var: out.insert(e->var); return out;
    case EK::Fun:
      out = le_fv(e->a);
      out.erase(e->var);
      out.erase(e->var2);
      return out;
    case EK::ListCase: {
      out = le_fv(e->a);
      auto n = le_fv(e->b);
      out.insert(n.begin(), n.end());
      auto c = le_fv(e->c);
      c.erase(e->var);
      c.erase(e->var2);
      out.insert(c.begin(), c.end());
      return out;
    }
    default:
      for (auto sel : {&LocalTerm::a, &LocalTerm::b, &LocalTerm::c})
        if (const auto& s = (*e).*sel) {
          auto f = le_fv(s);
          out.insert(f.begin(), f.end());
        }
      return out;
  }
}

std::set<std::string> le_ftv(const LTermPtr& e) {
  std::set<std::string> out;
  if (e->type) out = lt_ftv(e->type);
  for (auto sel : {&LocalTerm::a, &LocalTerm::b, &LocalTerm::c})
    if (const auto& s = (*e).*sel) {
      auto f = le_ftv(s);
      out.insert(f.begin(), f.end());
    }
  if (e->k == EK::TyAbs) out.erase(e->var);
  return out;
}

LTermPtr lsubst_term(const LTermPtr& e, const std::string& x, const LTermPtr& v) {
  switch (e->k) {
    case EK::Var: return e->var == x ? v : e;
    case EK::Fun: {
      if (e->var == x || e->var2 == x) return e;
      std::string f = e->var, p = e->var2;
      LTermPtr body = e->a;
      auto fvv = le_fv(v);
      if (fvv.count(f)) {
        std::string nf = fresh_name(f);
        body = lsubst_term(body, f, le_var(nf));
        f = nf;
      }
      if (fvv.count(p)) {
        std::string np = fresh_name(p);
        body = lsubst_term(body, p, le_var(np));
        p = np;
      }
      return le_fun(f, p, e->type, lsubst_term(body, x, v));
    }
    case EK::ListCase: {
      auto s = lsubst_term(e->a, x, v);
      auto nc = lsubst_term(e->b, x, v);
      if (e->var == x || e->var2 == x) return le_listcase(s, nc, e->var, e->var2, e->c);
      std::string h = e->var, tl = e->var2;
      LTermPtr cc = e->c;
      auto fvv = le_fv(v);
      if (fvv.count(h)) {
        std::string nh = fresh_name(h);
        cc = lsubst_term(cc, h, le_var(nh));
        h = nh;
      }
      if (fvv.count(tl)) {
        std::string nt = fresh_name(tl);
        cc = lsubst_term(cc, tl, le_var(nt));
        tl = nt;
      }
      return le_listcase(s, nc, h, tl, lsubst_term(cc, x, v));
    }
    default: {
      LocalTerm out = *e;
      if (out.a) out.a = lsubst_term(out.a, x, v);
      if (out.b) out.b = lsubst_term(out.b, x, v);
      if (out.c) out.c = lsubst_term(out.c, x, v);
      return mk_e(std::move(out));
    }
  }
}

LTypePtr lsubst_type(const LTypePtr& t, const std::string& a, const LTypePtr& s) {
  switch (t->k) {
    case TK::Var: return t->var == a ? s : t;
    case TK::Loc: case TK::Set: case TK::Int: case TK::Bool: case TK::TyRep:
      return t;
    case TK::List: return lt_list(lsubst_type(t->a, a, s));
    case TK::Arrow:
      return lt_arrow(lsubst_type(t->a, a, s), lsubst_type(t->b, a, s));
    case TK::Forall: {
      if (t->var == a) return t;
      std::string b = t->var;
      LTypePtr body = t->a;
      if (lt_ftv(s).count(b)) {
        std::string nb = fresh_name(b);
        body = lsubst_type(body, b, lt_var(nb));
        b = nb;
      }
      return lt_forall(b, lsubst_type(body, a, s));
    }
  }
  return t;
}

LTermPtr lsubst_type_in_term(const LTermPtr& e, const std::string& a, const LTypePtr& s) {
  if (e->k == EK::TyAbs) {
    if (e->var == a) return e;
    std::string b = e->var;
    LTermPtr body = e->a;
    if (lt_ftv(s).count(b)) {
      std::string nb = fresh_name(b);
      body = lsubst_type_in_term(body, b, lt_var(nb));
      b = nb;
    }
    return le_tyabs(b, lsubst_type_in_term(body, a, s));
  }
  LocalTerm out = *e;
  if (out.type) out.type = lsubst_type(out.type, a, s);
  if (out.a) out.a = lsubst_type_in_term(out.a, a, s);
  if (out.b) out.b = lsubst_type_in_term(out.b, a, s);
  if (out.c) out.c = lsubst_type_in_term(out.c, a, s);
  return mk_e(std::move(out));
}

namespace {

template <typename SetFn>
LTypePtr map_sets_type(const LTypePtr& t, const std::string& binder_skip, SetFn fn) {
  switch (t->k) {
    case TK::Loc: return lt_loc(fn(t->rho));
    case TK::Set: return lt_set(fn(t->rho));
    case TK::Var: case TK::Int: case TK::Bool: case TK::TyRep: return t;
    case TK::List: return lt_list(map_sets_type(t->a, binder_skip, fn));
    case TK::Arrow:
      return lt_arrow(map_sets_type(t->a, binder_skip, fn),
                      map_sets_type(t->b, binder_skip, fn));
    case TK::Forall:
      if (t->var == binder_skip) return t;
      return lt_forall(t->var, map_sets_type(t->a, binder_skip, fn));
  }
  return t;
}

template <typename SetFn>
LTermPtr map_sets_term(const LTermPtr& e, SetFn fn) {
  LocalTerm out = *e;
  if (out.type) out.type = map_sets_type(out.type, "", fn);
  if (out.a) out.a = map_sets_term(out.a, fn);
  if (out.b) out.b = map_sets_term(out.b, fn);
  if (out.c) out.c = map_sets_term(out.c, fn);
  return mk_e(std::move(out));
}

}  // namespace

LTypePtr lt_subst_locvar(const LTypePtr& t, const std::string& a, const LocExpr& l) {
  return map_sets_type(t, "", [&](const LocSetPtr& s) { return ls_subst_locvar(s, a, l); });
}
LTypePtr lt_subst_setvar(const LTypePtr& t, const std::string& a, const LocSetPtr& s) {
  return map_sets_type(t, "", [&](const LocSetPtr& r) { return ls_subst_setvar(r, a, s); });
}
LTermPtr le_subst_locvar(const LTermPtr& e, const std::string& a, const LocExpr& l) {
  return map_sets_term(e, [&](const LocSetPtr& s) { return ls_subst_locvar(s, a, l); });
}
LTermPtr le_subst_setvar(const LTermPtr& e, const std::string& a, const LocSetPtr& r) {
  return map_sets_term(e, [&](const LocSetPtr& s) { return ls_subst_setvar(s, a, r); });
}

}  // namespace qc
