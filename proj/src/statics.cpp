#include "statics.hpp"

namespace qc {

namespace {

using CK = Chor::K;
using TK = ChorType::K;

bool set_kinded(const KindCtx& gamma, const LocSetPtr& rho) {
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
      return set_kinded(gamma, rho->lhs) && set_kinded(gamma, rho->rhs);
  }
  return false;
}

}  // namespace

std::optional<Kind> kind_of(const KindCtx& gamma, const CTypePtr& t) {
  switch (t->k) {
    case TK::Var: {
      auto it = gamma.find(t->var);
      if (it == gamma.end()) return std::nullopt;
      return it->second;
    }
    case TK::At:
      if (lkind(gamma, t->local) && set_kinded(gamma, t->rho)) return Kind::Star;
      return std::nullopt;
    case TK::Arrow:
    case TK::Prod:
    case TK::Sum: {
      if (kind_of(gamma, t->a) == Kind::Star && kind_of(gamma, t->b) == Kind::Star)
        return Kind::Star;
      return std::nullopt;
    }
    case TK::Forall: {
      KindCtx g2 = gamma;
      g2[t->var] = t->kind;
      if (kind_of(g2, t->a) == Kind::Star) return Kind::Star;
      return std::nullopt;
    }
    case TK::Mu: {
      KindCtx g2 = gamma;
      g2[t->var] = Kind::Star;
      if (kind_of(g2, t->a) == Kind::Star) return Kind::Star;
      return std::nullopt;
    }
    case TK::Loc: {
      if (!t->loc.is_var) return Kind::StarLoc;
      auto it = gamma.find(t->loc.name);
      if (it != gamma.end() && it->second == Kind::StarLoc) return Kind::StarLoc;
      return std::nullopt;
    }
    case TK::Set:
      if (set_kinded(gamma, t->rho)) return Kind::StarSet;
      return std::nullopt;
    case TK::Local:
      if (lkind(gamma, t->local)) return Kind::StarLocal;
      return std::nullopt;
  }
  return std::nullopt;
}

LocalTyCtxFlat sigma_project(const ChorLocalCtx& sigma, const LocSetPtr& rho) {
  LocalTyCtxFlat out;
  for (const auto& b : sigma)
    if (subset(rho, b.rho)) out.emplace_back(b.x, b.t);
  return out;
}

namespace {

std::optional<CTypePtr> fail(std::string* diag, const std::string& rule,
                             const std::string& premise) {
  if (diag && diag->empty()) *diag = rule + ": " + premise;
  return std::nullopt;
}

std::optional<CTypePtr> lookup_delta(const ChorTyCtx& delta, const std::string& x) {
  for (auto it = delta.rbegin(); it != delta.rend(); ++it)
    if (it->first == x) return it->second;
  return std::nullopt;
}

}  // namespace

std::optional<CTypePtr> type_of(const KindCtx& gamma, const ChorTyCtx& delta,
                                const ChorLocalCtx& sigma, const ChorPtr& c,
                                const LocationTable& table, std::string* diag) {
  switch (c->k) {
    case CK::Var: {
      auto t = lookup_delta(delta, c->var);
      if (!t) return fail(diag, "T-Var", "unbound choreography variable " + c->var);
      return t;
    }
    case CK::Done: {
      if (!set_kinded(gamma, c->rho))
        return fail(diag, "T-Done", "namespace is not a well-kinded location set");
      auto local = sigma_project(sigma, c->rho);
      auto t = linfer(gamma, local, c->e, table);
      if (!t) return fail(diag, "T-Done", "local expression does not type-check");
      return ct_at(*t, c->rho);
    }
    case CK::Fun: {
      if (kind_of(gamma, c->type) != Kind::Star)
        return fail(diag, "T-Fun", "annotation is not a well-kinded program type");
      if (c->type->k != TK::Arrow)
        return fail(diag, "T-Fun", "annotation is not a function type");
      ChorTyCtx d2 = delta;
      d2.emplace_back(c->var, c->type);
      d2.emplace_back(c->var2, c->type->a);
      auto tb = type_of(gamma, d2, sigma, c->a, table, diag);
      if (!tb) return fail(diag, "T-Fun", "body does not type-check");
      if (!ct_equal(*tb, c->type->b))
        return fail(diag, "T-Fun", "body type differs from the annotated result type");
      return c->type;
    }
    case CK::App: {
      auto tf = type_of(gamma, delta, sigma, c->a, table, diag);
      if (!tf) return std::nullopt;
      if ((*tf)->k != TK::Arrow)
        return fail(diag, "T-App", "function position does not have an arrow type");
      auto ta = type_of(gamma, delta, sigma, c->b, table, diag);
      if (!ta) return std::nullopt;
      if (!ct_equal(*ta, (*tf)->a))
        return fail(diag, "T-App", "argument type does not match the parameter type");
      return (*tf)->b;
    }
    case CK::TyAbs: {
      KindCtx g2 = gamma;
      g2[c->var] = c->kind;
      auto tb = type_of(g2, delta, sigma, c->a, table, diag);
      if (!tb) return std::nullopt;
      return ct_forall(c->var, c->kind, *tb);
    }
    case CK::TyApp: {
      auto tf = type_of(gamma, delta, sigma, c->a, table, diag);
      if (!tf) return std::nullopt;
      if ((*tf)->k != TK::Forall)
        return fail(diag, "T-TApp", "subject is not polymorphic");
      if (kind_of(gamma, c->type) != (*tf)->kind)
        return fail(diag, "T-TApp", "type argument has the wrong kind");
      return ctype_subst((*tf)->a, (*tf)->var, c->type, (*tf)->kind);
    }
    case CK::Fold: {
      if (kind_of(gamma, c->type) != Kind::Star || c->type->k != TK::Mu)
        return fail(diag, "T-Fold", "annotation is not a recursive type");
      auto tb = type_of(gamma, delta, sigma, c->a, table, diag);
      if (!tb) return std::nullopt;
      auto unrolled = ctype_subst(c->type->a, c->type->var, c->type, Kind::Star);
      if (!ct_equal(*tb, unrolled))
        return fail(diag, "T-Fold", "body type is not the unrolling of the annotation");
      return c->type;
    }
    case CK::Unfold: {
      auto tb = type_of(gamma, delta, sigma, c->a, table, diag);
      if (!tb) return std::nullopt;
      if ((*tb)->k != TK::Mu)
        return fail(diag, "T-Unfold", "subject does not have a recursive type");
      return ctype_subst((*tb)->a, (*tb)->var, *tb, Kind::Star);
    }
    case CK::Pair: {
      auto t1 = type_of(gamma, delta, sigma, c->a, table, diag);
      if (!t1) return std::nullopt;
      auto t2 = type_of(gamma, delta, sigma, c->b, table, diag);
      if (!t2) return std::nullopt;
      return ct_prod(*t1, *t2);
    }
    case CK::Fst: {
      auto t = type_of(gamma, delta, sigma, c->a, table, diag);
      if (!t) return std::nullopt;
      if ((*t)->k != TK::Prod) return fail(diag, "T-Fst", "subject is not a pair");
      return (*t)->a;
    }
    case CK::Snd: {
      auto t = type_of(gamma, delta, sigma, c->a, table, diag);
      if (!t) return std::nullopt;
      if ((*t)->k != TK::Prod) return fail(diag, "T-Snd", "subject is not a pair");
      return (*t)->b;
    }
    case CK::Inl:
    case CK::Inr: {
      const char* rule = c->k == CK::Inl ? "T-Inl" : "T-Inr";
      if (kind_of(gamma, c->type) != Kind::Star || c->type->k != TK::Sum)
        return fail(diag, rule, "annotation is not a sum type");
      auto t = type_of(gamma, delta, sigma, c->a, table, diag);
      if (!t) return std::nullopt;
      const auto& want = c->k == CK::Inl ? c->type->a : c->type->b;
      if (!ct_equal(*t, want))
        return fail(diag, rule, "payload type does not match the annotation side");
      return c->type;
    }
    case CK::Case: {
      auto ts = type_of(gamma, delta, sigma, c->a, table, diag);
      if (!ts) return std::nullopt;
      if ((*ts)->k != TK::Sum)
        return fail(diag, "T-Case", "scrutinee does not have a sum type");
      ChorTyCtx dl = delta;
      dl.emplace_back(c->var, (*ts)->a);
      auto t1 = type_of(gamma, dl, sigma, c->b, table, diag);
      if (!t1) return std::nullopt;
      ChorTyCtx dr = delta;
      dr.emplace_back(c->var2, (*ts)->b);
      auto t2 = type_of(gamma, dr, sigma, c->c, table, diag);
      if (!t2) return std::nullopt;
      if (!ct_equal(*t1, *t2))
        return fail(diag, "T-Case", "branch types differ");
      return t1;
    }
    case CK::Send: {
      auto t = type_of(gamma, delta, sigma, c->a, table, diag);
      if (!t) return std::nullopt;
      if ((*t)->k != TK::At)
        return fail(diag, "T-Send", "subject is not a located local value");
      if (!nec_in(c->loc, (*t)->rho))
        return fail(diag, "T-Send", "sender does not hold the value");
      if (kind_of(gamma, ct_loc(c->loc)) != Kind::StarLoc)
        return fail(diag, "T-Send", "sender is not a well-kinded location");
      if (!set_kinded(gamma, c->rho))
        return fail(diag, "T-Send", "recipients are not a well-kinded location set");
      return ct_at((*t)->local, ls_union((*t)->rho, c->rho));
    }
    case CK::Sync: {
      if (kind_of(gamma, ct_loc(c->loc)) != Kind::StarLoc)
        return fail(diag, "T-Sync", "chooser is not a well-kinded location");
      if (!set_kinded(gamma, c->rho))
        return fail(diag, "T-Sync", "recipients are not a well-kinded location set");
      return type_of(gamma, delta, sigma, c->a, table, diag);
    }
    case CK::If: {
      if (!set_kinded(gamma, c->rho))
        return fail(diag, "T-If", "annotation is not a well-kinded location set");
      auto tc = type_of(gamma, delta, sigma, c->a, table, diag);
      if (!tc) return std::nullopt;
      if ((*tc)->k != TK::At || (*tc)->local->k != LocalType::K::Bool)
        return fail(diag, "T-If", "condition is not a located boolean");
      if (!subset(c->rho, (*tc)->rho))
        return fail(diag, "T-If", "annotated deciders do not all know the condition");
      auto t1 = type_of(gamma, delta, sigma, c->b, table, diag);
      if (!t1) return std::nullopt;
      auto t2 = type_of(gamma, delta, sigma, c->c, table, diag);
      if (!t2) return std::nullopt;
      if (!ct_equal(*t1, *t2)) return fail(diag, "T-If", "branch types differ");
      return t1;
    }
    case CK::LetLocal: {
      if (!set_kinded(gamma, c->rho))
        return fail(diag, "T-LetLocal", "binder namespace is not well-kinded");
      auto t1 = type_of(gamma, delta, sigma, c->a, table, diag);
      if (!t1) return std::nullopt;
      if ((*t1)->k != TK::At)
        return fail(diag, "T-LetLocal", "bound computation is not a located value");
      if (!lt_equal((*t1)->local, c->lty))
        return fail(diag, "T-LetLocal", "bound value type differs from the annotation");
      if (!subset(c->rho, (*t1)->rho))
        return fail(diag, "T-LetLocal", "binder namespace exceeds the value's locations");
      ChorLocalCtx s2 = sigma;
      s2.push_back({c->rho, c->var, (*t1)->local});
      return type_of(gamma, delta, s2, c->b, table, diag);
    }
    case CK::LetType: {
      if (!set_kinded(gamma, c->rho))
        return fail(diag, "T-LetTy", "binder namespace is not well-kinded");
      auto t1 = type_of(gamma, delta, sigma, c->a, table, diag);
      if (!t1) return std::nullopt;
      if ((*t1)->k != TK::At)
        return fail(diag, "T-LetTy", "bound computation is not a located value");
      const auto& rep = (*t1)->local;
      switch (c->kind) {
        case Kind::StarLoc:
          if (rep->k != LocalType::K::Loc)
            return fail(diag, "T-LetLoc", "bound value is not a location representation");
          if (!subset(rep->rho, c->rho))
            return fail(diag, "T-LetLoc",
                        "representable locations are not all in the binder set");
          break;
        case Kind::StarSet:
          if (rep->k != LocalType::K::Set)
            return fail(diag, "T-LetLocSet",
                        "bound value is not a location-set representation");
          if (!subset(rep->rho, c->rho))
            return fail(diag, "T-LetLocSet",
                        "representable locations are not all in the binder set");
          break;
        case Kind::StarLocal:
          if (rep->k != LocalType::K::TyRep)
            return fail(diag, "T-LetLocalTy", "bound value is not a type representation");
          break;
        case Kind::Star:
          return fail(diag, "T-LetTy", "program types cannot be bound by a type-let");
      }
      if (!subset(c->rho, (*t1)->rho))
        return fail(diag, "T-LetTy", "binder set exceeds the representation's locations");
      KindCtx g2 = gamma;
      g2[c->var] = c->kind;
      auto t2 = type_of(g2, delta, sigma, c->b, table, diag);
      if (!t2) return std::nullopt;
      // The result type must make sense without the bound variable.
      if (ct_ftv(*t2).count(c->var) || kind_of(gamma, *t2) != Kind::Star)
        return fail(diag, "T-LetTy", "bound type variable escapes into the result type");
      return t2;
    }
  }
  return fail(diag, "T", "unknown construct");
}

bool ctx_wf(const KindCtx& gamma, const ChorTyCtx& delta, const ChorLocalCtx& sigma) {
  for (const auto& [x, t] : delta)
    if (kind_of(gamma, t) != Kind::Star) return false;
  for (const auto& b : sigma) {
    if (!lkind(gamma, b.t)) return false;
    if (!set_kinded(gamma, b.rho)) return false;
  }
  return true;
}

}  // namespace qc
