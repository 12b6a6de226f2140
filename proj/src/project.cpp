#include "project.hpp"

namespace qc {

namespace {
using NK = Net::K;
using CK = Chor::K;
}  // namespace

std::optional<NetPtr> merge(const NetPtr& a, const NetPtr& b) {
  if (!a && !b) return NetPtr{nullptr};
  if (!a) return b;
  if (!b) return a;
  if (a->k != b->k) return std::nullopt;
  auto sub = [&](const NetPtr& x, const NetPtr& y,
                 auto rebuild) -> std::optional<NetPtr> {
    auto m = merge(x, y);
    if (!m) return std::nullopt;
    return rebuild(*m);
  };
  switch (a->k) {
    case NK::Var:
      return a->var == b->var ? std::optional(a) : std::nullopt;
    case NK::Unit:
      return a;
    case NK::Ret:
      return le_equal(a->e, b->e) ? std::optional(a) : std::nullopt;
    case NK::Recv:
      return a->loc == b->loc ? std::optional(a) : std::nullopt;
    case NK::Seq: {
      auto h = merge(a->a, b->a);
      auto t = merge(a->b, b->b);
      if (!h || !t) return std::nullopt;
      return n_seq(*h, *t);
    }
    case NK::Fun: {
      if (a->var != b->var || a->var2 != b->var2) return std::nullopt;
      return sub(a->a, b->a, [&](const NetPtr& m) { return n_fun(a->var, a->var2, m); });
    }
    case NK::App: {
      auto f = merge(a->a, b->a);
      auto x = merge(a->b, b->b);
      if (!f || !x) return std::nullopt;
      return n_app(*f, *x);
    }
    case NK::TyAbs: {
      if (a->var != b->var || a->kind != b->kind) return std::nullopt;
      return sub(a->a, b->a, [&](const NetPtr& m) { return n_tyabs(a->var, a->kind, m); });
    }
    case NK::TyApp: {
      if (!ct_equal(a->type, b->type)) return std::nullopt;
      return sub(a->a, b->a, [&](const NetPtr& m) { return n_tyapp(m, a->type); });
    }
    case NK::Pair: {
      auto l = merge(a->a, b->a);
      auto r = merge(a->b, b->b);
      if (!l || !r) return std::nullopt;
      return n_pair(*l, *r);
    }
    case NK::Fst: return sub(a->a, b->a, [](const NetPtr& m) { return n_fst(m); });
    case NK::Snd: return sub(a->a, b->a, [](const NetPtr& m) { return n_snd(m); });
    case NK::Inl: return sub(a->a, b->a, [](const NetPtr& m) { return n_inl(m); });
    case NK::Inr: return sub(a->a, b->a, [](const NetPtr& m) { return n_inr(m); });
    case NK::Fold: return sub(a->a, b->a, [](const NetPtr& m) { return n_fold(m); });
    case NK::Unfold: return sub(a->a, b->a, [](const NetPtr& m) { return n_unfold(m); });
    case NK::Case: {
      if (a->var != b->var || a->var2 != b->var2) return std::nullopt;
      auto s = merge(a->a, b->a);
      auto l = merge(a->b, b->b);
      auto r = merge(a->c, b->c);
      if (!s || !l || !r) return std::nullopt;
      return n_case(*s, a->var, *l, a->var2, *r);
    }
    case NK::Send: {
      if (!ls_equal(a->rho, b->rho)) return std::nullopt;
      return sub(a->a, b->a, [&](const NetPtr& m) { return n_send(m, a->rho); });
    }
    case NK::LetLocal: {
      if (a->var != b->var) return std::nullopt;
      auto h = merge(a->a, b->a);
      auto t = merge(a->b, b->b);
      if (!h || !t) return std::nullopt;
      return n_let_local(a->var, *h, *t);
    }
    case NK::LetType: {
      if (a->var != b->var || a->kind != b->kind) return std::nullopt;
      auto h = merge(a->a, b->a);
      auto t = merge(a->b, b->b);
      if (!h || !t) return std::nullopt;
      return n_let_type(a->var, a->kind, *h, *t);
    }
    case NK::Choose: {
      if (a->dir_left != b->dir_left || !ls_equal(a->rho, b->rho)) return std::nullopt;
      return sub(a->a, b->a,
                 [&](const NetPtr& m) { return n_choose(a->dir_left, a->rho, m); });
    }
    case NK::Allow: {
      if (a->loc != b->loc) return std::nullopt;
      auto l = merge(a->a, b->a);
      if (!l) return std::nullopt;
      auto r = merge(a->b, b->b);
      if (!r) return std::nullopt;
      return n_allow(a->loc, *l, *r);
    }
    case NK::AmIIn: {
      if (!ls_equal(a->rho, b->rho)) return std::nullopt;
      auto t = merge(a->a, b->a);
      auto e = merge(a->b, b->b);
      if (!t || !e) return std::nullopt;
      return n_am_i_in(a->rho, *t, *e);
    }
    case NK::Ite: {
      auto c = merge(a->a, b->a);
      auto t = merge(a->b, b->b);
      auto e = merge(a->c, b->c);
      if (!c || !t || !e) return std::nullopt;
      return n_ite(*c, *t, *e);
    }
  }
  return std::nullopt;
}

NetPtr seq_collapse(const NetPtr& a, const NetPtr& b) {
  return net_is_value(a) ? b : n_seq(a, b);
}

std::string projection_failure_to_string(const ProjectionFailure& f) {
  std::string reason;
  switch (f.reason) {
    case ProjectionFailure::Reason::MergeUndefined: reason = "merge-undefined"; break;
    case ProjectionFailure::Reason::FreeTypevarInBody: reason = "free-typevar-in-body"; break;
    case ProjectionFailure::Reason::NamespaceVariableUnresolved:
      reason = "namespace-variable-unresolved";
      break;
  }
  std::string path;
  for (const auto& p : f.path) path += "/" + p;
  if (path.empty()) path = "/";
  return reason + " at " + path;
}

namespace {

struct Projector {
  Location l;
  ProjectionFailure fail;
  bool failed = false;

  std::optional<NetPtr> bail(ProjectionFailure::Reason r, std::vector<std::string> path) {
    if (!failed) {
      failed = true;
      fail.reason = r;
      fail.path = std::move(path);
    }
    return std::nullopt;
  }

  std::optional<NetPtr> go(const ChorPtr& c, std::vector<std::string>& path) {
    switch (c->k) {
      case CK::Var:
        return n_var(c->var);
      case CK::Done:
        return nec_in(l, c->rho) ? n_ret(c->e) : n_unit();
      case CK::Fun: {
        path.push_back("fun");
        auto b = go(c->a, path);
        path.pop_back();
        if (!b) return std::nullopt;
        return n_fun(c->var, c->var2, *b);
      }
      case CK::App: {
        path.push_back("app");
        auto f = go(c->a, path);
        auto x = f ? go(c->b, path) : std::optional<NetPtr>{};
        path.pop_back();
        if (!f || !x) return std::nullopt;
        return n_app(*f, *x);
      }
      case CK::TyAbs: {
        path.push_back("tyfun");
        std::optional<NetPtr> out;
        if (c->kind == Kind::StarLoc) {
          auto match = csubst_type(c->a, c->var, ct_loc(LocExpr::concrete(l)), Kind::StarLoc);
          auto e1 = go(match, path);
          auto e2 = e1 ? go(c->a, path) : std::optional<NetPtr>{};
          if (e1 && e2)
            out = n_tyabs(c->var, c->kind,
                          n_am_i_in(ls_sng(LocExpr::var(c->var)), *e1, *e2));
        } else if (c->kind == Kind::StarSet) {
          auto wide = ct_set(ls_union(ls_sng(Location(l)), ls_var(c->var)));
          auto match = csubst_type(c->a, c->var, wide, Kind::StarSet);
          auto e1 = go(match, path);
          auto e2 = e1 ? go(c->a, path) : std::optional<NetPtr>{};
          if (e1 && e2)
            out = n_tyabs(c->var, c->kind, n_am_i_in(ls_var(c->var), *e1, *e2));
        } else {
          auto b = go(c->a, path);
          if (b) out = n_tyabs(c->var, c->kind, *b);
        }
        path.pop_back();
        return out;
      }
      case CK::TyApp: {
        path.push_back("tyapp");
        auto f = go(c->a, path);
        path.pop_back();
        if (!f) return std::nullopt;
        return n_tyapp(*f, c->type);
      }
      case CK::Fold: {
        path.push_back("fold");
        auto b = go(c->a, path);
        path.pop_back();
        if (!b) return std::nullopt;
        return n_fold(*b);
      }
      case CK::Unfold: {
        path.push_back("unfold");
        auto b = go(c->a, path);
        path.pop_back();
        if (!b) return std::nullopt;
        return n_unfold(*b);
      }
      case CK::Pair: {
        path.push_back("pair");
        auto x = go(c->a, path);
        auto y = x ? go(c->b, path) : std::optional<NetPtr>{};
        path.pop_back();
        if (!x || !y) return std::nullopt;
        return n_pair(*x, *y);
      }
      case CK::Fst: {
        path.push_back("fst");
        auto b = go(c->a, path);
        path.pop_back();
        if (!b) return std::nullopt;
        return n_fst(*b);
      }
      case CK::Snd: {
        path.push_back("snd");
        auto b = go(c->a, path);
        path.pop_back();
        if (!b) return std::nullopt;
        return n_snd(*b);
      }
      case CK::Inl: {
        path.push_back("inl");
        auto b = go(c->a, path);
        path.pop_back();
        if (!b) return std::nullopt;
        return n_inl(*b);
      }
      case CK::Inr: {
        path.push_back("inr");
        auto b = go(c->a, path);
        path.pop_back();
        if (!b) return std::nullopt;
        return n_inr(*b);
      }
      case CK::Case: {
        path.push_back("case");
        auto s = go(c->a, path);
        auto x = s ? go(c->b, path) : std::optional<NetPtr>{};
        auto y = x ? go(c->c, path) : std::optional<NetPtr>{};
        path.pop_back();
        if (!s || !x || !y) return std::nullopt;
        return n_case(*s, c->var, *x, c->var2, *y);
      }
      case CK::Send: {
        path.push_back("send");
        auto b = go(c->a, path);
        path.pop_back();
        if (!b) return std::nullopt;
        if (!c->loc.is_var && c->loc.name == l) return n_send(*b, c->rho);
        if (nec_in(l, c->rho)) return seq_collapse(*b, n_recv(c->loc));
        return *b;
      }
      case CK::Sync: {
        path.push_back("sync");
        auto b = go(c->a, path);
        path.pop_back();
        if (!b) return std::nullopt;
        if (!c->loc.is_var && c->loc.name == l) return n_choose(c->dir_left, c->rho, *b);
        if (nec_in(l, c->rho))
          return c->dir_left ? n_allow(c->loc, *b, nullptr) : n_allow(c->loc, nullptr, *b);
        return *b;
      }
      case CK::If: {
        path.push_back("if");
        auto cond = go(c->a, path);
        auto t = cond ? go(c->b, path) : std::optional<NetPtr>{};
        auto e = t ? go(c->c, path) : std::optional<NetPtr>{};
        if (!cond || !t || !e) {
          path.pop_back();
          return std::nullopt;
        }
        if (nec_in(l, c->rho)) {
          path.pop_back();
          return n_ite(*cond, *t, *e);
        }
        auto m = merge(*t, *e);
        auto here = path;
        path.pop_back();
        if (!m) return bail(ProjectionFailure::Reason::MergeUndefined, here);
        return seq_collapse(*cond, *m);
      }
      case CK::LetLocal: {
        path.push_back("let");
        auto h = go(c->a, path);
        auto b = h ? go(c->b, path) : std::optional<NetPtr>{};
        auto here = path;
        path.pop_back();
        if (!h || !b) return std::nullopt;
        if (nec_in(l, c->rho)) return n_let_local(c->var, *h, *b);
        if (!net_fv_local(*b).count(c->var)) return seq_collapse(*h, *b);
        return bail(ProjectionFailure::Reason::NamespaceVariableUnresolved, here);
      }
      case CK::LetType: {
        path.push_back("let-type");
        auto h = go(c->a, path);
        std::optional<NetPtr> out;
        if (h) {
          if (nec_in(l, c->rho)) {
            if (c->kind == Kind::StarLoc) {
              auto match =
                  csubst_type(c->b, c->var, ct_loc(LocExpr::concrete(l)), Kind::StarLoc);
              auto e1 = go(match, path);
              auto e2 = e1 ? go(c->b, path) : std::optional<NetPtr>{};
              if (e1 && e2)
                out = n_let_type(c->var, c->kind, *h,
                                 n_am_i_in(ls_sng(LocExpr::var(c->var)), *e1, *e2));
            } else if (c->kind == Kind::StarSet) {
              auto wide = ct_set(ls_union(ls_sng(Location(l)), ls_var(c->var)));
              auto match = csubst_type(c->b, c->var, wide, Kind::StarSet);
              auto e1 = go(match, path);
              auto e2 = e1 ? go(c->b, path) : std::optional<NetPtr>{};
              if (e1 && e2)
                out = n_let_type(c->var, c->kind, *h,
                                 n_am_i_in(ls_var(c->var), *e1, *e2));
            } else {
              auto b = go(c->b, path);
              if (b) out = n_let_type(c->var, c->kind, *h, *b);
            }
          } else {
            // The source body is the thing to check: projection may already
            // have resolved a membership test against the bound set variable.
            if (c_ftv(c->b).count(c->var)) {
              auto here = path;
              path.pop_back();
              return bail(ProjectionFailure::Reason::FreeTypevarInBody, here);
            }
            auto b = go(c->b, path);
            if (b) out = seq_collapse(*h, *b);
          }
        }
        path.pop_back();
        return out;
      }
    }
    return std::nullopt;
  }
};

}  // namespace

std::optional<NetPtr> project(const ChorPtr& c, const Location& l,
                              ProjectionFailure* fail) {
  Projector p{l};
  std::vector<std::string> path;
  auto out = p.go(c, path);
  if (!out && fail) *fail = p.fail;
  return out;
}

std::optional<System> project_system(
    const ChorPtr& c, const std::set<Location>& locs,
    std::vector<std::pair<Location, ProjectionFailure>>* fails) {
  if (locs.empty()) return std::nullopt;
  System out;
  bool ok = true;
  for (const auto& l : locs) {
    ProjectionFailure f;
    auto e = project(c, l, &f);
    if (!e) {
      ok = false;
      if (fails) fails->push_back({l, f});
      continue;
    }
    out[l] = *e;
  }
  if (!ok) return std::nullopt;
  return out;
}

// ---- the order relation ----

namespace {

bool leq_opt(const NetPtr& a, const NetPtr& b) {
  if (!a) return true;  // a missing allow-choice branch weakens to anything
  if (!b) return false;
  return leq(a, b);
}

}  // namespace

bool leq(const NetPtr& a, const NetPtr& b) {
  // an already-evaluated sequence head on the right may be absorbed
  if (b->k == NK::Seq && net_is_value(b->a) && leq(a, b->b)) return true;
  if (a->k != b->k) return false;
  switch (a->k) {
    case NK::Var: return a->var == b->var;
    case NK::Unit: return true;
    case NK::Ret: return le_equal(a->e, b->e);
    case NK::Recv: return a->loc == b->loc;
    case NK::Seq: return leq(a->a, b->a) && leq(a->b, b->b);
    case NK::Fun:
      return a->var == b->var && a->var2 == b->var2 && leq(a->a, b->a);
    case NK::App: return leq(a->a, b->a) && leq(a->b, b->b);
    case NK::TyAbs: return a->var == b->var && a->kind == b->kind && leq(a->a, b->a);
    case NK::TyApp: return ct_equal(a->type, b->type) && leq(a->a, b->a);
    case NK::Pair: return leq(a->a, b->a) && leq(a->b, b->b);
    case NK::Fst:
    case NK::Snd:
    case NK::Inl:
    case NK::Inr:
    case NK::Fold:
    case NK::Unfold:
      return leq(a->a, b->a);
    case NK::Case:
      return a->var == b->var && a->var2 == b->var2 && leq(a->a, b->a) &&
             leq(a->b, b->b) && leq(a->c, b->c);
    case NK::Send: return ls_equal(a->rho, b->rho) && leq(a->a, b->a);
    case NK::LetLocal: return a->var == b->var && leq(a->a, b->a) && leq(a->b, b->b);
    case NK::LetType:
      return a->var == b->var && a->kind == b->kind && leq(a->a, b->a) && leq(a->b, b->b);
    case NK::Choose:
      return a->dir_left == b->dir_left && ls_equal(a->rho, b->rho) && leq(a->a, b->a);
    case NK::Allow:
      return a->loc == b->loc && leq_opt(a->a, b->a) && leq_opt(a->b, b->b);
    case NK::AmIIn:
      return ls_equal(a->rho, b->rho) && leq(a->a, b->a) && leq(a->b, b->b);
    case NK::Ite: return leq(a->a, b->a) && leq(a->b, b->b) && leq(a->c, b->c);
  }
  return false;
}

bool leq_system(const System& a, const System& b) {
  if (a.size() != b.size()) return false;
  auto ia = a.begin();
  auto ib = b.begin();
  for (; ia != a.end(); ++ia, ++ib)
    if (ia->first != ib->first || !leq(ia->second, ib->second)) return false;
  return true;
}

}  // namespace qc
