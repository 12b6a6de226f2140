#include "chorsem.hpp"

#include <random>
#include <set>
#include <sstream>

namespace qc {

namespace {

using CK = Chor::K;
using RK = Redex::K;

RedexPtr mk_r(Redex r) { return std::make_shared<Redex>(std::move(r)); }

RedexPtr r_done(LocSetPtr rho, LTermPtr e1, LTermPtr e2) {
  Redex r{}; r.k = RK::Done; r.rho = std::move(rho); r.e1 = std::move(e1); r.e2 = std::move(e2);
  return mk_r(std::move(r));
}
RedexPtr r_wrap(RK k, RedexPtr inner) { Redex r{}; r.k = k; r.inner = std::move(inner); return mk_r(std::move(r)); }
RedexPtr r_atom(RK k) { Redex r{}; r.k = k; return mk_r(std::move(r)); }
RedexPtr r_letv(LocSetPtr rho, LTermPtr v) {
  Redex r{}; r.k = RK::LetV; r.rho = std::move(rho); r.v = std::move(v); return mk_r(std::move(r));
}
RedexPtr r_letty(LocSetPtr rho, CTypePtr t) {
  Redex r{}; r.k = RK::LetTy; r.rho = std::move(rho); r.t = std::move(t); return mk_r(std::move(r));
}
RedexPtr r_send(LocExpr l, LTermPtr v, LocSetPtr rho) {
  Redex r{}; r.k = RK::Send; r.loc = std::move(l); r.v = std::move(v); r.rho = std::move(rho);
  return mk_r(std::move(r));
}
RedexPtr r_sync(LocExpr l, bool left, LocSetPtr rho) {
  Redex r{}; r.k = RK::Send; r.loc = std::move(l); r.msg_is_label = true; r.msg_left = left;
  r.rho = std::move(rho); return mk_r(std::move(r));
}
RedexPtr r_if(bool taken, LocSetPtr rho) {
  Redex r{}; r.k = taken ? RK::IfTrue : RK::IfFalse; r.rho = std::move(rho);
  return mk_r(std::move(r));
}

bool ground(const LocSetPtr& s) { return ground_set(s).has_value(); }

}  // namespace

bool redex_equal(const RedexPtr& a, const RedexPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b || a->k != b->k) return false;
  if (a->msg_is_label != b->msg_is_label || a->msg_left != b->msg_left ||
      a->loc != b->loc)
    return false;
  if ((a->rho != nullptr) != (b->rho != nullptr)) return false;
  if (a->rho && !ls_equal(a->rho, b->rho)) return false;
  for (auto sel : {&Redex::e1, &Redex::e2, &Redex::v}) {
    const auto& x = (*a).*sel;
    const auto& y = (*b).*sel;
    if ((x != nullptr) != (y != nullptr)) return false;
    if (x && !le_equal(x, y)) return false;
  }
  if ((a->t != nullptr) != (b->t != nullptr)) return false;
  if (a->t && !ct_equal(a->t, b->t)) return false;
  if ((a->inner != nullptr) != (b->inner != nullptr)) return false;
  if (a->inner && !redex_equal(a->inner, b->inner)) return false;
  return true;
}

std::string redex_to_string(const RedexPtr& r) {
  std::ostringstream os;
  switch (r->k) {
    case RK::Done:
      os << "Done(" << ls_to_string(r->rho) << ", " << le_to_string(r->e1) << " => "
         << le_to_string(r->e2) << ")";
      break;
    case RK::Fun: os << "Fun(" << redex_to_string(r->inner) << ")"; break;
    case RK::Arg: os << "Arg(" << redex_to_string(r->inner) << ")"; break;
    case RK::App: os << "App"; break;
    case RK::TApp: os << "TApp"; break;
    case RK::UnfoldFold: os << "UnfoldFold"; break;
    case RK::PairL: os << "PairL(" << redex_to_string(r->inner) << ")"; break;
    case RK::PairR: os << "PairR(" << redex_to_string(r->inner) << ")"; break;
    case RK::FstPair: os << "FstPair"; break;
    case RK::SndPair: os << "SndPair"; break;
    case RK::CaseInl: os << "CaseInl"; break;
    case RK::CaseInr: os << "CaseInr"; break;
    case RK::LetV:
      os << "Let(" << ls_to_string(r->rho) << " := " << le_to_string(r->v) << ")";
      break;
    case RK::LetTy:
      os << "LetTy(" << ls_to_string(r->rho) << " := " << ct_to_string(r->t) << ")";
      break;
    case RK::Send:
      os << "Send(" << r->loc.name << ", "
         << (r->msg_is_label ? (r->msg_left ? std::string("left") : std::string("right"))
                             : le_to_string(r->v))
         << ", " << ls_to_string(r->rho) << ")";
      break;
    case RK::IfTrue: os << "IfT(" << ls_to_string(r->rho) << ")"; break;
    case RK::IfFalse: os << "IfF(" << ls_to_string(r->rho) << ")"; break;
  }
  return os.str();
}

Footprint rloc(const RedexPtr& r) {
  switch (r->k) {
    case RK::Done:
    case RK::LetV:
    case RK::LetTy:
    case RK::IfTrue:
    case RK::IfFalse:
      return Footprint::of(r->rho);
    case RK::Fun:
    case RK::Arg:
    case RK::PairL:
    case RK::PairR:
      return rloc(r->inner);
    case RK::Send:
      return Footprint::of(ls_union(ls_sng(r->loc), r->rho));
    case RK::App:
    case RK::TApp:
    case RK::UnfoldFold:
    case RK::FstPair:
    case RK::SndPair:
    case RK::CaseInl:
    case RK::CaseInr:
      return Footprint::universe();
  }
  return Footprint::universe();
}

Footprint cloc(const ChorPtr& c) {
  switch (c->k) {
    case CK::Var:
    case CK::Fun:
    case CK::TyAbs:
      return Footprint::empty();
    case CK::Done:
      return Footprint::of(c->rho);
    case CK::App:
    case CK::TyApp:
    case CK::Unfold:
    case CK::Fst:
    case CK::Snd:
    case CK::Case:
      return Footprint::universe();
    case CK::Fold:
    case CK::Inl:
    case CK::Inr:
      return cloc(c->a);
    case CK::Pair:
      return cloc(c->a).join(cloc(c->b));
    case CK::Send:
    case CK::Sync:
      return Footprint::of(ls_union(ls_sng(c->loc), c->rho)).join(cloc(c->a));
    case CK::If:
      return Footprint::of(c->rho).join(cloc(c->a)).join(cloc(c->b)).join(cloc(c->c));
    case CK::LetLocal:
    case CK::LetType:
      return Footprint::of(c->rho).join(cloc(c->a)).join(cloc(c->b));
  }
  return Footprint::universe();
}

namespace {

void push(std::vector<ChorStep>& out, RedexPtr r, ChorPtr next) {
  out.push_back({std::move(r), std::move(next)});
}

std::vector<ChorStep> enabled(const ChorPtr& c, const LocationTable& table) {
  std::vector<ChorStep> out;
  switch (c->k) {
    case CK::Var:
    case CK::Fun:
    case CK::TyAbs:
      return out;
    case CK::Done: {
      if (!ground(c->rho)) return out;
      if (auto e2 = lstep(c->e))
        push(out, r_done(c->rho, c->e, *e2), c_done(c->rho, *e2));
      return out;
    }
    case CK::App: {
      for (auto& [r, n] : enabled(c->a, table))
        push(out, r_wrap(RK::Fun, r), c_app(n, c->b));
      bool left_value = is_chor_value(c->a);
      for (auto& [r, n] : enabled(c->b, table)) {
        if (left_value)
          push(out, r_wrap(RK::Arg, r), c_app(c->a, n));
        else if (fp_disjoint(cloc(c->a), rloc(r)))
          push(out, r_wrap(RK::Arg, r), c_app(c->a, n));
      }
      if (left_value && is_chor_value(c->b) && c->a->k == CK::Fun) {
        auto unrolled = subst_chor(c->a->a, c->a->var, c->a);
        push(out, r_atom(RK::App), subst_chor(unrolled, c->a->var2, c->b));
      }
      return out;
    }
    case CK::TyApp: {
      for (auto& [r, n] : enabled(c->a, table)) push(out, r, c_tyapp(n, c->type));
      if (c->a->k == CK::TyAbs)
        push(out, r_atom(RK::TApp), csubst_type(c->a->a, c->a->var, c->type, c->a->kind));
      return out;
    }
    case CK::Fold: {
      for (auto& [r, n] : enabled(c->a, table)) push(out, r, c_fold(c->type, n));
      return out;
    }
    case CK::Unfold: {
      for (auto& [r, n] : enabled(c->a, table)) push(out, r, c_unfold(n));
      if (c->a->k == CK::Fold && is_chor_value(c->a))
        push(out, r_atom(RK::UnfoldFold), c->a->a);
      return out;
    }
    case CK::Pair: {
      for (auto& [r, n] : enabled(c->a, table))
        push(out, r_wrap(RK::PairL, r), c_pair(n, c->b));
      bool left_value = is_chor_value(c->a);
      for (auto& [r, n] : enabled(c->b, table)) {
        if (left_value || fp_disjoint(cloc(c->a), rloc(r)))
          push(out, r_wrap(RK::PairR, r), c_pair(c->a, n));
      }
      return out;
    }
    case CK::Fst: {
      for (auto& [r, n] : enabled(c->a, table)) push(out, r, c_fst(n));
      if (c->a->k == CK::Pair && is_chor_value(c->a))
        push(out, r_atom(RK::FstPair), c->a->a);
      return out;
    }
    case CK::Snd: {
      for (auto& [r, n] : enabled(c->a, table)) push(out, r, c_snd(n));
      if (c->a->k == CK::Pair && is_chor_value(c->a))
        push(out, r_atom(RK::SndPair), c->a->b);
      return out;
    }
    case CK::Inl: {
      for (auto& [r, n] : enabled(c->a, table)) push(out, r, c_inl(c->type, n));
      return out;
    }
    case CK::Inr: {
      for (auto& [r, n] : enabled(c->a, table)) push(out, r, c_inr(c->type, n));
      return out;
    }
    case CK::Case: {
      for (auto& [r, n] : enabled(c->a, table))
        push(out, r, c_case(n, c->var, c->b, c->var2, c->c));
      if (is_chor_value(c->a)) {
        if (c->a->k == CK::Inl)
          push(out, r_atom(RK::CaseInl), subst_chor(c->b, c->var, c->a->a));
        if (c->a->k == CK::Inr)
          push(out, r_atom(RK::CaseInr), subst_chor(c->c, c->var2, c->a->a));
      }
      return out;
    }
    case CK::Send: {
      for (auto& [r, n] : enabled(c->a, table))
        push(out, r, c_send(n, c->loc, c->rho));
      if (c->a->k == CK::Done && is_chor_value(c->a) && !c->loc.is_var &&
          ground(c->a->rho) && ground(c->rho) && nec_in(c->loc, c->a->rho)) {
        push(out, r_send(c->loc, c->a->e, c->rho),
             c_done(ls_union(c->a->rho, c->rho), c->a->e));
      }
      return out;
    }
    case CK::Sync: {
      if (!c->loc.is_var && ground(c->rho))
        push(out, r_sync(c->loc, c->dir_left, c->rho), c->a);
      auto guard = Footprint::of(ls_union(ls_sng(c->loc), c->rho));
      for (auto& [r, n] : enabled(c->a, table))
        if (fp_disjoint(guard, rloc(r)))
          push(out, r, c_sync(c->loc, c->dir_left, c->rho, n));
      return out;
    }
    case CK::If: {
      for (auto& [r, n] : enabled(c->a, table))
        push(out, r, c_if(c->rho, n, c->b, c->c));
      if (c->a->k == CK::Done && is_chor_value(c->a) && ground(c->rho)) {
        if (auto b = reify_bool(c->a->e))
          push(out, r_if(*b, c->rho), *b ? c->b : c->c);
      }
      // Both branches may take one identical step ahead of the condition when
      // it cannot involve anyone deciding or computing the condition.
      auto guard = Footprint::of(c->rho).join(cloc(c->a));
      auto ls = enabled(c->b, table);
      auto rs = enabled(c->c, table);
      for (auto& [r1, n1] : ls) {
        if (!fp_disjoint(guard, rloc(r1))) continue;
        for (auto& [r2, n2] : rs)
          if (redex_equal(r1, r2))
            push(out, r1, c_if(c->rho, c->a, n1, n2));
      }
      return out;
    }
    case CK::LetLocal: {
      for (auto& [r, n] : enabled(c->a, table))
        push(out, r, c_let_local(c->rho, c->var, c->lty, n, c->b));
      if (c->a->k == CK::Done && is_chor_value(c->a) && ground(c->rho)) {
        if (auto next = subst_local(c->b, c->rho, c->var, c->a->e))
          push(out, r_letv(c->rho, c->a->e), *next);
      }
      auto guard = Footprint::of(c->rho).join(cloc(c->a));
      for (auto& [r, n] : enabled(c->b, table))
        if (fp_disjoint(guard, rloc(r)))
          push(out, r, c_let_local(c->rho, c->var, c->lty, c->a, n));
      return out;
    }
    case CK::LetType: {
      for (auto& [r, n] : enabled(c->a, table))
        push(out, r, c_let_type(c->rho, c->var, c->kind, n, c->b));
      if (c->a->k == CK::Done && is_chor_value(c->a) && ground(c->rho)) {
        CTypePtr t;
        switch (c->kind) {
          case Kind::StarLoc: {
            if (auto l = reify_loc(c->a->e, table)) t = ct_loc(LocExpr::concrete(*l));
            break;
          }
          case Kind::StarSet: {
            auto s = reify_locset(c->a->e, table);
            if (s && !s->empty()) t = ct_set(ls_of(*s));
            break;
          }
          case Kind::StarLocal: {
            if (auto lt = reify_tyrep(c->a->e)) t = ct_local(*lt);
            break;
          }
          case Kind::Star:
            break;
        }
        if (t)
          push(out, r_letty(c->rho, t), csubst_type(c->b, c->var, t, c->kind));
      }
      auto guard = Footprint::of(c->rho).join(cloc(c->a));
      for (auto& [r, n] : enabled(c->b, table))
        if (fp_disjoint(guard, rloc(r)))
          push(out, r, c_let_type(c->rho, c->var, c->kind, c->a, n));
      return out;
    }
  }
  return out;
}

}  // namespace

std::vector<ChorStep> enabled_steps(const ChorPtr& c, const LocationTable& table) {
  auto steps = enabled(c, table);
  std::vector<ChorStep> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (auto& s : steps)
    if (seen.insert({redex_to_string(s.r), c_to_string(s.next)}).second)
      out.push_back(std::move(s));
  return out;
}

std::optional<ChorPtr> step_with(const ChorPtr& c, const RedexPtr& r,
                                 const LocationTable& table) {
  for (const auto& s : enabled_steps(c, table))
    if (redex_equal(s.r, r)) return s.next;
  return std::nullopt;
}

ChorRun run_chor(const ChorPtr& c, const LocationTable& table, int fuel,
                 ChorStrategy strategy, uint32_t seed) {
  ChorRun run{ChorRun::Status::FuelExhausted, c, {}};
  std::mt19937 rng(seed);
  ChorPtr cur = c;
  for (int i = 0; i < fuel; ++i) {
    if (is_chor_value(cur)) {
      run.status = ChorRun::Status::Value;
      break;
    }
    auto steps = enabled_steps(cur, table);
    if (steps.empty()) {
      run.status = ChorRun::Status::Stuck;
      break;
    }
    size_t pick = 0;
    if (strategy == ChorStrategy::Random)
      pick = std::uniform_int_distribution<size_t>(0, steps.size() - 1)(rng);
    run.trace.push_back(steps[pick]);
    cur = steps[pick].next;
  }
  if (is_chor_value(cur)) run.status = ChorRun::Status::Value;
  run.final = cur;
  return run;
}

}  // namespace qc
