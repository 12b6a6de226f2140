#include "locsets.hpp"

#include <cassert>
#include <sstream>

namespace qc {

LocSetPtr ls_var(std::string name) {
  auto s = std::make_shared<LocSet>();
  s->k = LocSet::K::Var;
  s->var = std::move(name);
  return s;
}

LocSetPtr ls_sng(LocExpr e) {
  auto s = std::make_shared<LocSet>();
  s->k = LocSet::K::Sng;
  s->elem = std::move(e);
  return s;
}

LocSetPtr ls_sng(const Location& l) { return ls_sng(LocExpr::concrete(l)); }

LocSetPtr ls_union(LocSetPtr a, LocSetPtr b) {
  auto s = std::make_shared<LocSet>();
  s->k = LocSet::K::Union;
  s->lhs = std::move(a);
  s->rhs = std::move(b);
  return s;
}

LocSetPtr ls_of(const std::vector<Location>& locs) {
  assert(!locs.empty());
  LocSetPtr acc = ls_sng(locs[0]);
  for (size_t i = 1; i < locs.size(); ++i) acc = ls_union(acc, ls_sng(locs[i]));
  return acc;
}

LocSetPtr ls_of(const std::set<Location>& locs) {
  return ls_of(std::vector<Location>(locs.begin(), locs.end()));
}

bool ls_equal(const LocSetPtr& a, const LocSetPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b || a->k != b->k) return false;
  switch (a->k) {
    case LocSet::K::Var: return a->var == b->var;
    case LocSet::K::Sng: return a->elem == b->elem;
    case LocSet::K::Union:
      return ls_equal(a->lhs, b->lhs) && ls_equal(a->rhs, b->rhs);
  }
  return false;
}

std::string ls_to_string(const LocSetPtr& s) {
  if (!s) return "?";
  switch (s->k) {
    case LocSet::K::Var: return s->var;
    case LocSet::K::Sng: return "{" + s->elem.name + "}";
    case LocSet::K::Union:
      return ls_to_string(s->lhs) + " \\/ " + ls_to_string(s->rhs);
  }
  return "?";
}

bool nec_in(const LocExpr& l, const LocSetPtr& rho) {
  switch (rho->k) {
    case LocSet::K::Var: return false;
    case LocSet::K::Sng: return rho->elem == l;
    case LocSet::K::Union: return nec_in(l, rho->lhs) || nec_in(l, rho->rhs);
  }
  return false;
}

bool nec_in(const Location& l, const LocSetPtr& rho) {
  return nec_in(LocExpr::concrete(l), rho);
}

bool poss_in(const LocExpr& l, const LocSetPtr& rho) {
  switch (rho->k) {
    case LocSet::K::Var: return true;
    case LocSet::K::Sng:
      // <>(l in {alpha}) for any l; <>(L in {L}); <>(alpha in {alpha}).
      return rho->elem.is_var || rho->elem == l;
    case LocSet::K::Union: return poss_in(l, rho->lhs) || poss_in(l, rho->rhs);
  }
  return false;
}

bool poss_in(const Location& l, const LocSetPtr& rho) {
  return poss_in(LocExpr::concrete(l), rho);
}

bool subset(const LocSetPtr& a, const LocSetPtr& b) {
  if (ls_equal(a, b)) return true;
  // Union-split on the left.
  if (a->k == LocSet::K::Union)
    return subset(a->lhs, b) && subset(a->rhs, b);
  // Singleton via necessary containment.
  if (a->k == LocSet::K::Sng && nec_in(a->elem, b)) return true;
  // Union on the right.
  if (b->k == LocSet::K::Union)
    return subset(a, b->lhs) || subset(a, b->rhs);
  return false;
}

namespace {

void collect_atoms(const LocSetPtr& s, std::set<LocExpr>& out) {
  switch (s->k) {
    case LocSet::K::Var: out.insert(LocExpr::var(s->var)); break;
    case LocSet::K::Sng: out.insert(s->elem); break;
    case LocSet::K::Union:
      collect_atoms(s->lhs, out);
      collect_atoms(s->rhs, out);
      break;
  }
}

}  // namespace

bool disjoint(const LocSetPtr& a, const LocSetPtr& b) {
  // Witness candidates: every atom of either side plus a fresh variable (which
  // is possibly in a set exactly when that set mentions a set variable or a
  // singleton of a location variable).
  std::set<LocExpr> atoms;
  collect_atoms(a, atoms);
  collect_atoms(b, atoms);
  atoms.insert(LocExpr::var("%fresh"));
  for (const auto& l : atoms)
    if (poss_in(l, a) && poss_in(l, b)) return false;
  return true;
}

std::optional<std::set<Location>> ground_set(const LocSetPtr& s) {
  switch (s->k) {
    case LocSet::K::Var: return std::nullopt;
    case LocSet::K::Sng:
      if (s->elem.is_var) return std::nullopt;
      return std::set<Location>{s->elem.name};
    case LocSet::K::Union: {
      auto l = ground_set(s->lhs);
      auto r = ground_set(s->rhs);
      if (!l || !r) return std::nullopt;
      l->insert(r->begin(), r->end());
      return l;
    }
  }
  return std::nullopt;
}

std::set<std::string> fv_set(const LocSetPtr& s) {
  std::set<std::string> out;
  std::set<LocExpr> atoms;
  collect_atoms(s, atoms);
  for (const auto& a : atoms)
    if (a.is_var) out.insert(a.name);
  return out;
}

std::set<Location> named_locs_set(const LocSetPtr& s) {
  std::set<Location> out;
  std::set<LocExpr> atoms;
  collect_atoms(s, atoms);
  for (const auto& a : atoms)
    if (!a.is_var) out.insert(a.name);
  return out;
}

LocSetPtr ls_subst_setvar(const LocSetPtr& s, const std::string& a, const LocSetPtr& sigma) {
  switch (s->k) {
    case LocSet::K::Var: return s->var == a ? sigma : s;
    case LocSet::K::Sng: return s;
    case LocSet::K::Union: {
      auto l = ls_subst_setvar(s->lhs, a, sigma);
      auto r = ls_subst_setvar(s->rhs, a, sigma);
      if (l == s->lhs && r == s->rhs) return s;
      return ls_union(l, r);
    }
  }
  return s;
}

LocSetPtr ls_subst_locvar(const LocSetPtr& s, const std::string& a, const LocExpr& l) {
  switch (s->k) {
    case LocSet::K::Var: return s;
    case LocSet::K::Sng:
      if (s->elem.is_var && s->elem.name == a) return ls_sng(l);
      return s;
    case LocSet::K::Union: {
      auto x = ls_subst_locvar(s->lhs, a, l);
      auto y = ls_subst_locvar(s->rhs, a, l);
      if (x == s->lhs && y == s->rhs) return s;
      return ls_union(x, y);
    }
  }
  return s;
}

Footprint Footprint::join(const Footprint& o) const {
  if (k == K::Universe || o.k == K::Universe) return universe();
  if (k == K::Empty) return o;
  if (o.k == K::Empty) return *this;
  return of(ls_union(set, o.set));
}

bool fp_disjoint(const Footprint& a, const Footprint& b) {
  if (a.k == Footprint::K::Empty || b.k == Footprint::K::Empty) return true;
  // Sets are non-empty by syntax, so the universe overlaps any set.
  if (a.k == Footprint::K::Universe || b.k == Footprint::K::Universe) return false;
  return disjoint(a.set, b.set);
}

std::string fp_to_string(const Footprint& f) {
  switch (f.k) {
    case Footprint::K::Empty: return "{}";
    case Footprint::K::Universe: return "<all>";
    case Footprint::K::Set: return ls_to_string(f.set);
  }
  return "?";
}

}  // namespace qc
