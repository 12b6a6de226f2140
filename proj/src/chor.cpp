#include "chor.hpp"

#include <sstream>

namespace qc {

namespace {
CTypePtr mk_ct(ChorType t) { return std::make_shared<ChorType>(std::move(t)); }
ChorPtr mk_c(Chor c) { return std::make_shared<Chor>(std::move(c)); }
using CK = Chor::K;
using TK = ChorType::K;
}  // namespace

CTypePtr ct_var(std::string a) { ChorType t{}; t.k = TK::Var; t.var = std::move(a); return mk_ct(std::move(t)); }
CTypePtr ct_at(LTypePtr lt, LocSetPtr rho) { ChorType t{}; t.k = TK::At; t.local = std::move(lt); t.rho = std::move(rho); return mk_ct(std::move(t)); }
CTypePtr ct_arrow(CTypePtr a, CTypePtr b) { ChorType t{}; t.k = TK::Arrow; t.a = std::move(a); t.b = std::move(b); return mk_ct(std::move(t)); }
CTypePtr ct_forall(std::string a, Kind k, CTypePtr body) {
  ChorType t{}; t.k = TK::Forall; t.var = std::move(a); t.kind = k; t.a = std::move(body); return mk_ct(std::move(t));
}
CTypePtr ct_prod(CTypePtr a, CTypePtr b) { ChorType t{}; t.k = TK::Prod; t.a = std::move(a); t.b = std::move(b); return mk_ct(std::move(t)); }
CTypePtr ct_sum(CTypePtr a, CTypePtr b) { ChorType t{}; t.k = TK::Sum; t.a = std::move(a); t.b = std::move(b); return mk_ct(std::move(t)); }
CTypePtr ct_mu(std::string a, CTypePtr body) { ChorType t{}; t.k = TK::Mu; t.var = std::move(a); t.a = std::move(body); return mk_ct(std::move(t)); }
CTypePtr ct_loc(LocExpr l) { ChorType t{}; t.k = TK::Loc; t.loc = std::move(l); return mk_ct(std::move(t)); }
CTypePtr ct_set(LocSetPtr rho) { ChorType t{}; t.k = TK::Set; t.rho = std::move(rho); return mk_ct(std::move(t)); }
CTypePtr ct_local(LTypePtr lt) { ChorType t{}; t.k = TK::Local; t.local = std::move(lt); return mk_ct(std::move(t)); }

bool ct_equal(const CTypePtr& a, const CTypePtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b || a->k != b->k) return false;
  switch (a->k) {
    case TK::Var: return a->var == b->var;
    case TK::At:
      return lt_equal(a->local, b->local) && subset(a->rho, b->rho) && subset(b->rho, a->rho);
    case TK::Arrow:
    case TK::Prod:
    case TK::Sum:
      return ct_equal(a->a, b->a) && ct_equal(a->b, b->b);
    case TK::Forall: {
      if (a->kind != b->kind) return false;
      if (a->var == b->var) return ct_equal(a->a, b->a);
      auto fresh = ct_var(fresh_name(a->var));
      return ct_equal(ctype_subst(a->a, a->var, fresh, a->kind),
                      ctype_subst(b->a, b->var, fresh, a->kind));
    }
    case TK::Mu: {
      if (a->var == b->var) return ct_equal(a->a, b->a);
      auto fresh = ct_var(fresh_name(a->var));
      return ct_equal(ctype_subst(a->a, a->var, fresh, Kind::Star),
                      ctype_subst(b->a, b->var, fresh, Kind::Star));
    }
    case TK::Loc: return a->loc == b->loc;
    case TK::Set: return subset(a->rho, b->rho) && subset(b->rho, a->rho);
    case TK::Local: return lt_equal(a->local, b->local);
  }
  return false;
}

std::string ct_to_string(const CTypePtr& t) {
  switch (t->k) {
    case TK::Var: return t->var;
    case TK::At: return lt_to_string(t->local) + " @ (" + ls_to_string(t->rho) + ")";
    case TK::Arrow: return "(" + ct_to_string(t->a) + " -> " + ct_to_string(t->b) + ")";
    case TK::Forall:
      return "(forall " + t->var + " :: " + kind_to_string(t->kind) + ". " + ct_to_string(t->a) + ")";
    case TK::Prod: return "(" + ct_to_string(t->a) + " * " + ct_to_string(t->b) + ")";
    case TK::Sum: return "(" + ct_to_string(t->a) + " + " + ct_to_string(t->b) + ")";
    case TK::Mu: return "(mu " + t->var + ". " + ct_to_string(t->a) + ")";
    case TK::Loc: return t->loc.name;
    case TK::Set: return ls_to_string(t->rho);
    case TK::Local: return lt_to_string(t->local);
  }
  return "?";
}

std::set<std::string> ct_ftv(const CTypePtr& t) {
  std::set<std::string> out;
  switch (t->k) {
    case TK::Var: out.insert(t->var); break;
    case TK::At: {
      out = lt_ftv(t->local);
      auto s = fv_set(t->rho);
      out.insert(s.begin(), s.end());
      break;
    }
    case TK::Arrow: case TK::Prod: case TK::Sum: {
      out = ct_ftv(t->a);
      auto r = ct_ftv(t->b);
      out.insert(r.begin(), r.end());
      break;
    }
    case TK::Forall: case TK::Mu:
      out = ct_ftv(t->a);
      out.erase(t->var);
      break;
    case TK::Loc:
      if (t->loc.is_var) out.insert(t->loc.name);
      break;
    case TK::Set: out = fv_set(t->rho); break;
    case TK::Local: out = lt_ftv(t->local); break;
  }
  return out;
}

namespace {

std::set<Location> lt_named_locs(const LTypePtr& t) {
  std::set<Location> out;
  switch (t->k) {
    case LocalType::K::Loc:
    case LocalType::K::Set:
      return named_locs_set(t->rho);
    case LocalType::K::List:
    case LocalType::K::Forall:
      return lt_named_locs(t->a);
    case LocalType::K::Arrow: {
      out = lt_named_locs(t->a);
      auto r = lt_named_locs(t->b);
      out.insert(r.begin(), r.end());
      return out;
    }
    default:
      return out;
  }
}

std::set<Location> le_named_locs(const LTermPtr& e) {
  std::set<Location> out;
  if (e->type) out = lt_named_locs(e->type);
  for (auto sel : {&LocalTerm::a, &LocalTerm::b, &LocalTerm::c})
    if (const auto& s = (*e).*sel) {
      auto r = le_named_locs(s);
      out.insert(r.begin(), r.end());
    }
  return out;
}

}  // namespace

std::set<Location> ct_named_locs(const CTypePtr& t) {
  std::set<Location> out;
  switch (t->k) {
    case TK::Var: break;
    case TK::At: {
      out = lt_named_locs(t->local);
      auto s = named_locs_set(t->rho);
      out.insert(s.begin(), s.end());
      break;
    }
    case TK::Arrow: case TK::Prod: case TK::Sum: {
      out = ct_named_locs(t->a);
      auto r = ct_named_locs(t->b);
      out.insert(r.begin(), r.end());
      break;
    }
    case TK::Forall: case TK::Mu: out = ct_named_locs(t->a); break;
    case TK::Loc:
      if (!t->loc.is_var) out.insert(t->loc.name);
      break;
    case TK::Set: out = named_locs_set(t->rho); break;
    case TK::Local: out = lt_named_locs(t->local); break;
  }
  return out;
}

ChorPtr c_var(std::string x) { Chor c{}; c.k = CK::Var; c.var = std::move(x); return mk_c(std::move(c)); }
ChorPtr c_done(LocSetPtr rho, LTermPtr e) { Chor c{}; c.k = CK::Done; c.rho = std::move(rho); c.e = std::move(e); return mk_c(std::move(c)); }
ChorPtr c_fun(std::string f, std::string x, CTypePtr t, ChorPtr body) {
  Chor c{}; c.k = CK::Fun; c.var = std::move(f); c.var2 = std::move(x);
  c.type = std::move(t); c.a = std::move(body); return mk_c(std::move(c));
}
ChorPtr c_app(ChorPtr f, ChorPtr a) { Chor c{}; c.k = CK::App; c.a = std::move(f); c.b = std::move(a); return mk_c(std::move(c)); }
ChorPtr c_tyabs(std::string a, Kind k, ChorPtr body) {
  Chor c{}; c.k = CK::TyAbs; c.var = std::move(a); c.kind = k; c.a = std::move(body); return mk_c(std::move(c));
}
ChorPtr c_tyapp(ChorPtr f, CTypePtr t) { Chor c{}; c.k = CK::TyApp; c.a = std::move(f); c.type = std::move(t); return mk_c(std::move(c)); }
ChorPtr c_fold(CTypePtr mu, ChorPtr body) { Chor c{}; c.k = CK::Fold; c.type = std::move(mu); c.a = std::move(body); return mk_c(std::move(c)); }
ChorPtr c_unfold(ChorPtr body) { Chor c{}; c.k = CK::Unfold; c.a = std::move(body); return mk_c(std::move(c)); }
ChorPtr c_pair(ChorPtr a, ChorPtr b) { Chor c{}; c.k = CK::Pair; c.a = std::move(a); c.b = std::move(b); return mk_c(std::move(c)); }
ChorPtr c_fst(ChorPtr a) { Chor c{}; c.k = CK::Fst; c.a = std::move(a); return mk_c(std::move(c)); }
ChorPtr c_snd(ChorPtr a) { Chor c{}; c.k = CK::Snd; c.a = std::move(a); return mk_c(std::move(c)); }
ChorPtr c_inl(CTypePtr sum, ChorPtr a) { Chor c{}; c.k = CK::Inl; c.type = std::move(sum); c.a = std::move(a); return mk_c(std::move(c)); }
ChorPtr c_inr(CTypePtr sum, ChorPtr a) { Chor c{}; c.k = CK::Inr; c.type = std::move(sum); c.a = std::move(a); return mk_c(std::move(c)); }
ChorPtr c_case(ChorPtr s, std::string x, ChorPtr l, std::string y, ChorPtr r) {
  Chor c{}; c.k = CK::Case; c.a = std::move(s); c.var = std::move(x); c.b = std::move(l);
  c.var2 = std::move(y); c.c = std::move(r); return mk_c(std::move(c));
}
ChorPtr c_send(ChorPtr subj, LocExpr from, LocSetPtr to) {
  Chor c{}; c.k = CK::Send; c.a = std::move(subj); c.loc = std::move(from); c.rho = std::move(to); return mk_c(std::move(c));
}
ChorPtr c_sync(LocExpr from, bool left, LocSetPtr to, ChorPtr body) {
  Chor c{}; c.k = CK::Sync; c.loc = std::move(from); c.dir_left = left;
  c.rho = std::move(to); c.a = std::move(body); return mk_c(std::move(c));
}
ChorPtr c_if(LocSetPtr rho, ChorPtr cond, ChorPtr t, ChorPtr f) {
  Chor c{}; c.k = CK::If; c.rho = std::move(rho); c.a = std::move(cond);
  c.b = std::move(t); c.c = std::move(f); return mk_c(std::move(c));
}
ChorPtr c_let_local(LocSetPtr rho, std::string x, LTypePtr t, ChorPtr c1, ChorPtr c2) {
  Chor c{}; c.k = CK::LetLocal; c.rho = std::move(rho); c.var = std::move(x);
  c.lty = std::move(t); c.a = std::move(c1); c.b = std::move(c2); return mk_c(std::move(c));
}
ChorPtr c_let_type(LocSetPtr rho, std::string a, Kind k, ChorPtr c1, ChorPtr c2) {
  Chor c{}; c.k = CK::LetType; c.rho = std::move(rho); c.var = std::move(a);
  c.kind = k; c.a = std::move(c1); c.b = std::move(c2); return mk_c(std::move(c));
}

bool c_equal(const ChorPtr& a, const ChorPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b || a->k != b->k) return false;
  if (a->var != b->var || a->var2 != b->var2 || a->kind != b->kind ||
      a->dir_left != b->dir_left || a->loc != b->loc)
    return false;
  if ((a->rho != nullptr) != (b->rho != nullptr)) return false;
  if (a->rho && !ls_equal(a->rho, b->rho)) return false;
  if ((a->type != nullptr) != (b->type != nullptr)) return false;
  if (a->type && !ct_equal(a->type, b->type)) return false;
  if ((a->lty != nullptr) != (b->lty != nullptr)) return false;
  if (a->lty && !lt_equal(a->lty, b->lty)) return false;
  if ((a->e != nullptr) != (b->e != nullptr)) return false;
  if (a->e && !le_equal(a->e, b->e)) return false;
  for (auto sel : {&Chor::a, &Chor::b, &Chor::c}) {
    const auto& x = (*a).*sel;
    const auto& y = (*b).*sel;
    if ((x != nullptr) != (y != nullptr)) return false;
    if (x && !c_equal(x, y)) return false;
  }
  return true;
}

std::string c_to_string(const ChorPtr& c) {
  std::ostringstream os;
  switch (c->k) {
    case CK::Var: os << c->var; break;
    case CK::Done: os << "(" << ls_to_string(c->rho) << ")." << le_to_string(c->e); break;
    case CK::Fun:
      os << "(fun " << c->var << "(" << c->var2 << " : " << ct_to_string(c->type)
         << ") = " << c_to_string(c->a) << ")";
      break;
    case CK::App: os << "(" << c_to_string(c->a) << " " << c_to_string(c->b) << ")"; break;
    case CK::TyAbs:
      os << "(tyfun " << c->var << " :: " << kind_to_string(c->kind) << " => "
         << c_to_string(c->a) << ")";
      break;
    case CK::TyApp: os << "(" << c_to_string(c->a) << " [" << ct_to_string(c->type) << "])"; break;
    case CK::Fold: os << "fold[" << ct_to_string(c->type) << "](" << c_to_string(c->a) << ")"; break;
    case CK::Unfold: os << "unfold(" << c_to_string(c->a) << ")"; break;
    case CK::Pair: os << "(" << c_to_string(c->a) << ", " << c_to_string(c->b) << ")"; break;
    case CK::Fst: os << "fst(" << c_to_string(c->a) << ")"; break;
    case CK::Snd: os << "snd(" << c_to_string(c->a) << ")"; break;
    case CK::Inl: os << "inl[" << ct_to_string(c->type) << "](" << c_to_string(c->a) << ")"; break;
    case CK::Inr: os << "inr[" << ct_to_string(c->type) << "](" << c_to_string(c->a) << ")"; break;
    case CK::Case:
      os << "(case " << c_to_string(c->a) << " of inl " << c->var << " => "
         << c_to_string(c->b) << " | inr " << c->var2 << " => " << c_to_string(c->c) << ")";
      break;
    case CK::Send:
      os << "(" << c_to_string(c->a) << " @" << c->loc.name << " ~> "
         << ls_to_string(c->rho) << ")";
      break;
    case CK::Sync:
      os << "(sync " << c->loc.name << "[" << (c->dir_left ? "left" : "right") << "] ~> "
         << ls_to_string(c->rho) << "; " << c_to_string(c->a) << ")";
      break;
    case CK::If:
      os << "(if " << c_to_string(c->a) << "@" << ls_to_string(c->rho) << " then "
         << c_to_string(c->b) << " else " << c_to_string(c->c) << ")";
      break;
    case CK::LetLocal:
      os << "(let (" << ls_to_string(c->rho) << ")." << c->var << " : "
         << lt_to_string(c->lty) << " := " << c_to_string(c->a) << " in "
         << c_to_string(c->b) << ")";
      break;
    case CK::LetType:
      os << "(let (" << ls_to_string(c->rho) << ")." << c->var << " :: "
         << kind_to_string(c->kind) << " := " << c_to_string(c->a) << " in "
         << c_to_string(c->b) << ")";
      break;
  }
  return os.str();
}

bool is_chor_value(const ChorPtr& c) {
  switch (c->k) {
    case CK::Done: return is_lvalue(c->e);
    case CK::Fun:
    case CK::TyAbs:
      return true;
    case CK::Pair: return is_chor_value(c->a) && is_chor_value(c->b);
    case CK::Inl:
    case CK::Inr:
    case CK::Fold:
      return is_chor_value(c->a);
    default:
      return false;
  }
}

std::set<Location> c_named_locs(const ChorPtr& c) {
  std::set<Location> out;
  auto add = [&](const std::set<Location>& s) { out.insert(s.begin(), s.end()); };
  if (c->rho) add(named_locs_set(c->rho));
  if (!c->loc.name.empty() && !c->loc.is_var &&
      (c->k == CK::Send || c->k == CK::Sync))
    out.insert(c->loc.name);
  if (c->type) add(ct_named_locs(c->type));
  if (c->lty) add(lt_named_locs(c->lty));
  if (c->e) add(le_named_locs(c->e));
  for (auto sel : {&Chor::a, &Chor::b, &Chor::c})
    if (const auto& s = (*c).*sel) add(c_named_locs(s));
  return out;
}

std::set<std::string> c_fcv(const ChorPtr& c) {
  std::set<std::string> out;
  switch (c->k) {
    case CK::Var: out.insert(c->var); return out;
    case CK::Fun:
      out = c_fcv(c->a);
      out.erase(c->var);
      out.erase(c->var2);
      return out;
    case CK::Case: {
      out = c_fcv(c->a);
      auto l = c_fcv(c->b);
      l.erase(c->var);
      out.insert(l.begin(), l.end());
      auto r = c_fcv(c->c);
      r.erase(c->var2);
      out.insert(r.begin(), r.end());
      return out;
    }
    default:
      for (auto sel : {&Chor::a, &Chor::b, &Chor::c})
        if (const auto& s = (*c).*sel) {
          auto f = c_fcv(s);
          out.insert(f.begin(), f.end());
        }
      return out;
  }
}

std::set<std::string> c_ftv(const ChorPtr& c) {
  std::set<std::string> out;
  auto add = [&](const std::set<std::string>& s) { out.insert(s.begin(), s.end()); };
  if (c->rho) add(fv_set(c->rho));
  if ((c->k == CK::Send || c->k == CK::Sync) && c->loc.is_var) out.insert(c->loc.name);
  if (c->type) add(ct_ftv(c->type));
  if (c->lty) add(lt_ftv(c->lty));
  if (c->e) add(le_ftv(c->e));
  switch (c->k) {
    case CK::TyAbs:
      add(c_ftv(c->a));
      out.erase(c->var);
      break;
    case CK::LetType: {
      add(c_ftv(c->a));
      auto body = c_ftv(c->b);
      body.erase(c->var);
      add(body);
      break;
    }
    default:
      for (auto sel : {&Chor::a, &Chor::b, &Chor::c})
        if (const auto& s = (*c).*sel) add(c_ftv(s));
      break;
  }
  return out;
}

// ---- free local occurrences ----

namespace {

struct LocalOcc {
  LocSetPtr ns;
  std::string name;
};

// shadows: per variable name, the namespaces of enclosing local-let binders.
using Shadows = std::map<std::string, std::vector<LocSetPtr>>;

bool occ_shadowed(const Shadows& sh, const LocSetPtr& ns, const std::string& x) {
  auto it = sh.find(x);
  if (it == sh.end()) return false;
  for (const auto& s : it->second)
    if (subset(ns, s)) return true;
  return false;
}

void collect_local_occs(const ChorPtr& c, Shadows& sh, std::vector<LocalOcc>& out) {
  switch (c->k) {
    case CK::Done:
      for (const auto& x : le_fv(c->e))
        if (!occ_shadowed(sh, c->rho, x)) out.push_back({c->rho, x});
      return;
    case CK::LetLocal: {
      collect_local_occs(c->a, sh, out);
      sh[c->var].push_back(c->rho);
      collect_local_occs(c->b, sh, out);
      sh[c->var].pop_back();
      return;
    }
    default:
      for (auto sel : {&Chor::a, &Chor::b, &Chor::c})
        if (const auto& s = (*c).*sel) collect_local_occs(s, sh, out);
      return;
  }
}

std::vector<LocalOcc> free_local_occs(const ChorPtr& c) {
  Shadows sh;
  std::vector<LocalOcc> out;
  collect_local_occs(c, sh, out);
  return out;
}

// Is some location possibly in both ns and sigma while not necessarily in
// rho_excl?  Witnesses are the atoms of the involved sets plus a fresh
// variable covering "any other location".
bool ns_overlaps(const LocSetPtr& ns, const LocSetPtr& sigma, const LocSetPtr& rho_excl) {
  std::set<LocExpr> atoms;
  for (const auto& s : {ns, sigma})
    for (const auto& v : fv_set(s)) atoms.insert(LocExpr::var(v));
  for (const auto& s : {ns, sigma}) {
    for (const auto& l : named_locs_set(s)) atoms.insert(LocExpr::concrete(l));
    for (const auto& v : fv_set(s)) atoms.insert(LocExpr::var(v));
  }
  atoms.insert(LocExpr::var("%fresh"));
  for (const auto& l : atoms) {
    if (!poss_in(l, ns) || !poss_in(l, sigma)) continue;
    if (rho_excl && nec_in(l, rho_excl)) continue;
    return true;
  }
  return false;
}

}  // namespace

std::set<std::string> fv_diff(const ChorPtr& c, const LocSetPtr& sigma,
                              const LocSetPtr& rho_excl) {
  std::set<std::string> out;
  for (const auto& occ : free_local_occs(c))
    if (ns_overlaps(occ.ns, sigma, rho_excl)) out.insert(occ.name);
  return out;
}

// ---- choreography-variable substitution ----

ChorPtr subst_chor(const ChorPtr& c, const std::string& x, const ChorPtr& v) {
  switch (c->k) {
    case CK::Var: return c->var == x ? v : c;
    case CK::Fun: {
      if (c->var == x || c->var2 == x) return c;
      std::string f = c->var, p = c->var2;
      ChorPtr body = c->a;
      auto fvv = c_fcv(v);
      if (fvv.count(f)) {
        std::string nf = fresh_name(f);
        body = subst_chor(body, f, c_var(nf));
        f = nf;
      }
      if (fvv.count(p)) {
        std::string np = fresh_name(p);
        body = subst_chor(body, p, c_var(np));
        p = np;
      }
      return c_fun(f, p, c->type, subst_chor(body, x, v));
    }
    case CK::Case: {
      auto s = subst_chor(c->a, x, v);
      auto fvv = c_fcv(v);
      std::string xl = c->var, xr = c->var2;
      ChorPtr lb = c->b, rb = c->c;
      if (xl != x) {
        if (fvv.count(xl)) {
          std::string n = fresh_name(xl);
          lb = subst_chor(lb, xl, c_var(n));
          xl = n;
        }
        lb = subst_chor(lb, x, v);
      }
      if (xr != x) {
        if (fvv.count(xr)) {
          std::string n = fresh_name(xr);
          rb = subst_chor(rb, xr, c_var(n));
          xr = n;
        }
        rb = subst_chor(rb, x, v);
      }
      return c_case(s, xl, lb, xr, rb);
    }
    default: {
      Chor out = *c;
      if (out.a) out.a = subst_chor(out.a, x, v);
      if (out.b) out.b = subst_chor(out.b, x, v);
      if (out.c) out.c = subst_chor(out.c, x, v);
      return mk_c(std::move(out));
    }
  }
}

// ---- namespace-aware local-variable substitution ----

namespace {

std::optional<ChorPtr> subst_local_sh(const ChorPtr& c, const LocSetPtr& rho,
                                      const std::string& x, const LTermPtr& e,
                                      std::vector<LocSetPtr>& shadows) {
  switch (c->k) {
    case CK::Done: {
      if (!le_fv(c->e).count(x)) return c;
      for (const auto& s : shadows)
        if (subset(c->rho, s)) return c;
      if (subset(c->rho, rho)) return c_done(c->rho, lsubst_term(c->e, x, e));
      if (disjoint(c->rho, rho)) return c;
      // A namespace may only be substituted whole.
      return std::nullopt;
    }
    case CK::LetLocal: {
      auto c1 = subst_local_sh(c->a, rho, x, e, shadows);
      if (!c1) return std::nullopt;
      std::optional<ChorPtr> c2;
      if (c->var == x) {
        shadows.push_back(c->rho);
        c2 = subst_local_sh(c->b, rho, x, e, shadows);
        shadows.pop_back();
      } else {
        c2 = subst_local_sh(c->b, rho, x, e, shadows);
      }
      if (!c2) return std::nullopt;
      return c_let_local(c->rho, c->var, c->lty, *c1, *c2);
    }
    default: {
      Chor out = *c;
      for (auto sel : {&Chor::a, &Chor::b, &Chor::c})
        if (out.*sel) {
          auto r = subst_local_sh(out.*sel, rho, x, e, shadows);
          if (!r) return std::nullopt;
          out.*sel = *r;
        }
      return mk_c(std::move(out));
    }
  }
}

// Binder renaming: rewrites exactly the occurrences a rho.x binder captures
// (namespace contained in rho and not shadowed). An occurrence whose namespace
// merely overlaps rho is bound by an enclosing binder and stays as is.
ChorPtr rename_local_sh(const ChorPtr& c, const LocSetPtr& rho, const std::string& x,
                        const LTermPtr& e, std::vector<LocSetPtr>& shadows) {
  switch (c->k) {
    case CK::Done: {
      if (!le_fv(c->e).count(x)) return c;
      for (const auto& s : shadows)
        if (subset(c->rho, s)) return c;
      if (subset(c->rho, rho)) return c_done(c->rho, lsubst_term(c->e, x, e));
      return c;
    }
    case CK::LetLocal: {
      auto c1 = rename_local_sh(c->a, rho, x, e, shadows);
      ChorPtr c2;
      if (c->var == x) {
        shadows.push_back(c->rho);
        c2 = rename_local_sh(c->b, rho, x, e, shadows);
        shadows.pop_back();
      } else {
        c2 = rename_local_sh(c->b, rho, x, e, shadows);
      }
      return c_let_local(c->rho, c->var, c->lty, c1, c2);
    }
    default: {
      Chor out = *c;
      for (auto sel : {&Chor::a, &Chor::b, &Chor::c})
        if (out.*sel) out.*sel = rename_local_sh(out.*sel, rho, x, e, shadows);
      return mk_c(std::move(out));
    }
  }
}

ChorPtr rename_local(const ChorPtr& c, const LocSetPtr& rho, const std::string& x,
                     const std::string& y) {
  std::vector<LocSetPtr> shadows;
  return rename_local_sh(c, rho, x, le_var(y), shadows);
}

}  // namespace

std::optional<ChorPtr> subst_local(const ChorPtr& c, const LocSetPtr& rho,
                                   const std::string& x, const LTermPtr& e) {
  std::vector<LocSetPtr> shadows;
  return subst_local_sh(c, rho, x, e, shadows);
}

// ---- type substitution ----

namespace {

// The payload views of the substituted type, per kind.
struct TypeSubst {
  std::string a;
  CTypePtr t;
  Kind k;

  LocSetPtr set(const LocSetPtr& s) const {
    if (k == Kind::StarLoc) return ls_subst_locvar(s, a, as_loc());
    if (k == Kind::StarSet) return ls_subst_setvar(s, a, as_set());
    return s;
  }
  LocExpr as_loc() const { return t->k == TK::Loc ? t->loc : LocExpr::var(t->var); }
  LocSetPtr as_set() const { return t->k == TK::Set ? t->rho : ls_var(t->var); }
  LTypePtr as_local() const { return t->k == TK::Local ? t->local : lt_var(t->var); }

  LTypePtr lty(const LTypePtr& x) const {
    switch (k) {
      case Kind::StarLoc: return lt_subst_locvar(x, a, as_loc());
      case Kind::StarSet: return lt_subst_setvar(x, a, as_set());
      case Kind::StarLocal: return lsubst_type(x, a, as_local());
      case Kind::Star: return x;
    }
    return x;
  }
  LTermPtr lterm(const LTermPtr& x) const {
    switch (k) {
      case Kind::StarLoc: return le_subst_locvar(x, a, as_loc());
      case Kind::StarSet: return le_subst_setvar(x, a, as_set());
      case Kind::StarLocal: return lsubst_type_in_term(x, a, as_local());
      case Kind::Star: return x;
    }
    return x;
  }
  LocExpr locexpr(const LocExpr& l) const {
    if (k == Kind::StarLoc && l.is_var && l.name == a) return as_loc();
    return l;
  }
};

CTypePtr ctype_subst_s(const CTypePtr& tau, const TypeSubst& s) {
  switch (tau->k) {
    case TK::Var: return tau->var == s.a ? s.t : tau;
    case TK::At: return ct_at(s.lty(tau->local), s.set(tau->rho));
    case TK::Arrow: return ct_arrow(ctype_subst_s(tau->a, s), ctype_subst_s(tau->b, s));
    case TK::Prod: return ct_prod(ctype_subst_s(tau->a, s), ctype_subst_s(tau->b, s));
    case TK::Sum: return ct_sum(ctype_subst_s(tau->a, s), ctype_subst_s(tau->b, s));
    case TK::Forall:
    case TK::Mu: {
      if (tau->var == s.a) return tau;
      std::string b = tau->var;
      CTypePtr body = tau->a;
      Kind bk = tau->k == TK::Forall ? tau->kind : Kind::Star;
      if (ct_ftv(s.t).count(b)) {
        std::string nb = fresh_name(b);
        body = ctype_subst(body, b, ct_var(nb), bk);
        b = nb;
      }
      body = ctype_subst_s(body, s);
      return tau->k == TK::Forall ? ct_forall(b, tau->kind, body) : ct_mu(b, body);
    }
    case TK::Loc:
      if (tau->loc.is_var && tau->loc.name == s.a) return s.t;
      return tau;
    case TK::Set: {
      if (tau->rho->k == LocSet::K::Var && tau->rho->var == s.a) return s.t;
      return ct_set(s.set(tau->rho));
    }
    case TK::Local: return ct_local(s.lty(tau->local));
  }
  return tau;
}

ChorPtr csubst_type_s(const ChorPtr& c, const TypeSubst& s) {
  switch (c->k) {
    case CK::Var: return c;
    case CK::Done: return c_done(s.set(c->rho), s.lterm(c->e));
    case CK::Fun:
      return c_fun(c->var, c->var2, ctype_subst_s(c->type, s), csubst_type_s(c->a, s));
    case CK::TyAbs: {
      if (c->var == s.a) return c;
      std::string b = c->var;
      ChorPtr body = c->a;
      if (ct_ftv(s.t).count(b)) {
        std::string nb = fresh_name(b);
        body = csubst_type(body, b, ct_var(nb), c->kind);
        b = nb;
      }
      return c_tyabs(b, c->kind, csubst_type_s(body, s));
    }
    case CK::TyApp:
      return c_tyapp(csubst_type_s(c->a, s), ctype_subst_s(c->type, s));
    case CK::Send:
      return c_send(csubst_type_s(c->a, s), s.locexpr(c->loc), s.set(c->rho));
    case CK::Sync:
      return c_sync(s.locexpr(c->loc), c->dir_left, s.set(c->rho), csubst_type_s(c->a, s));
    case CK::If:
      return c_if(s.set(c->rho), csubst_type_s(c->a, s), csubst_type_s(c->b, s),
                  csubst_type_s(c->c, s));
    case CK::LetLocal: {
      const auto& rho = c->rho;
      auto c1 = csubst_type_s(c->a, s);
      auto lty = s.lty(c->lty);
      if (s.k == Kind::StarLoc || s.k == Kind::StarSet) {
        // Location(-set) substitution can collapse previously-distinct
        // namespaces; rename the bound local variable per the four-case rule.
        LocSetPtr sigma = s.k == Kind::StarLoc ? ls_sng(s.as_loc()) : s.as_set();
        LocSetPtr alpha_ns = s.k == Kind::StarLoc
                                 ? ls_sng(LocExpr::var(s.a))
                                 : ls_var(s.a);
        bool alpha_in_rho = subset(alpha_ns, rho);
        if (alpha_in_rho) {
          // The binder's namespace after substitution covers sigma's image,
          // so occurrences already inside it are not captured.
          if (fv_diff(c->b, sigma, s.set(rho)).count(c->var)) {
            std::string y = fresh_name(c->var);
            auto renamed = rename_local(c->b, rho, c->var, y);
            return c_let_local(s.set(rho), y, lty, c1, csubst_type_s(renamed, s));
          }
          return c_let_local(s.set(rho), c->var, lty, c1, csubst_type_s(c->b, s));
        }
        bool sigma_meets_rho = !disjoint(sigma, rho);
        bool x_free_at_alpha = fv_rho(c->b, alpha_ns).count(c->var) > 0;
        if (sigma_meets_rho && x_free_at_alpha) {
          std::string y = fresh_name(c->var);
          auto renamed = rename_local(c->b, rho, c->var, y);
          return c_let_local(s.set(rho), y, lty, c1, csubst_type_s(renamed, s));
        }
        return c_let_local(s.set(rho), c->var, lty, c1, csubst_type_s(c->b, s));
      }
      return c_let_local(rho, c->var, lty, c1, csubst_type_s(c->b, s));
    }
    case CK::LetType: {
      auto c1 = csubst_type_s(c->a, s);
      auto rho = s.set(c->rho);
      if (c->var == s.a) return c_let_type(rho, c->var, c->kind, c1, c->b);
      std::string b = c->var;
      ChorPtr body = c->b;
      if (ct_ftv(s.t).count(b)) {
        std::string nb = fresh_name(b);
        body = csubst_type(body, b, ct_var(nb), c->kind);
        b = nb;
      }
      return c_let_type(rho, b, c->kind, c1, csubst_type_s(body, s));
    }
    case CK::Fold:
    case CK::Inl:
    case CK::Inr: {
      Chor out = *c;
      out.type = ctype_subst_s(c->type, s);
      out.a = csubst_type_s(c->a, s);
      return mk_c(std::move(out));
    }
    default: {
      Chor out = *c;
      if (out.a) out.a = csubst_type_s(out.a, s);
      if (out.b) out.b = csubst_type_s(out.b, s);
      if (out.c) out.c = csubst_type_s(out.c, s);
      return mk_c(std::move(out));
    }
  }
}

}  // namespace

CTypePtr ctype_subst(const CTypePtr& tau, const std::string& a, const CTypePtr& t, Kind k) {
  return ctype_subst_s(tau, TypeSubst{a, t, k});
}

ChorPtr csubst_type(const ChorPtr& c, const std::string& a, const CTypePtr& t, Kind k) {
  return csubst_type_s(c, TypeSubst{a, t, k});
}

}  // namespace qc
