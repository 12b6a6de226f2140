#include "network.hpp"

#include <random>
#include <sstream>

namespace qc {

namespace {
using NK = Net::K;

NetPtr mk_n(Net n) { return std::make_shared<Net>(std::move(n)); }
}  // namespace

NetPtr n_var(std::string x) { Net n{}; n.k = NK::Var; n.var = std::move(x); return mk_n(std::move(n)); }
NetPtr n_unit() { Net n{}; n.k = NK::Unit; return mk_n(std::move(n)); }
NetPtr n_ret(LTermPtr e) { Net n{}; n.k = NK::Ret; n.e = std::move(e); return mk_n(std::move(n)); }
NetPtr n_seq(NetPtr a, NetPtr b) { Net n{}; n.k = NK::Seq; n.a = std::move(a); n.b = std::move(b); return mk_n(std::move(n)); }
NetPtr n_fun(std::string f, std::string x, NetPtr body) {
  Net n{}; n.k = NK::Fun; n.var = std::move(f); n.var2 = std::move(x); n.a = std::move(body);
  return mk_n(std::move(n));
}
NetPtr n_app(NetPtr f, NetPtr a) { Net n{}; n.k = NK::App; n.a = std::move(f); n.b = std::move(a); return mk_n(std::move(n)); }
NetPtr n_tyabs(std::string a, Kind k, NetPtr body) {
  Net n{}; n.k = NK::TyAbs; n.var = std::move(a); n.kind = k; n.a = std::move(body);
  return mk_n(std::move(n));
}
NetPtr n_tyapp(NetPtr f, CTypePtr t) {
  Net n{}; n.k = NK::TyApp; n.a = std::move(f); n.type = std::move(t); return mk_n(std::move(n));
}
NetPtr n_pair(NetPtr a, NetPtr b) { Net n{}; n.k = NK::Pair; n.a = std::move(a); n.b = std::move(b); return mk_n(std::move(n)); }
NetPtr n_fst(NetPtr a) { Net n{}; n.k = NK::Fst; n.a = std::move(a); return mk_n(std::move(n)); }
NetPtr n_snd(NetPtr a) { Net n{}; n.k = NK::Snd; n.a = std::move(a); return mk_n(std::move(n)); }
NetPtr n_inl(NetPtr a) { Net n{}; n.k = NK::Inl; n.a = std::move(a); return mk_n(std::move(n)); }
NetPtr n_inr(NetPtr a) { Net n{}; n.k = NK::Inr; n.a = std::move(a); return mk_n(std::move(n)); }
NetPtr n_case(NetPtr s, std::string x, NetPtr l, std::string y, NetPtr r) {
  Net n{}; n.k = NK::Case; n.a = std::move(s); n.var = std::move(x); n.b = std::move(l);
  n.var2 = std::move(y); n.c = std::move(r);
  return mk_n(std::move(n));
}
NetPtr n_fold(NetPtr a) { Net n{}; n.k = NK::Fold; n.a = std::move(a); return mk_n(std::move(n)); }
NetPtr n_unfold(NetPtr a) { Net n{}; n.k = NK::Unfold; n.a = std::move(a); return mk_n(std::move(n)); }
NetPtr n_send(NetPtr subj, LocSetPtr to) {
  Net n{}; n.k = NK::Send; n.a = std::move(subj); n.rho = std::move(to); return mk_n(std::move(n));
}
NetPtr n_recv(LocExpr from) { Net n{}; n.k = NK::Recv; n.loc = std::move(from); return mk_n(std::move(n)); }
NetPtr n_let_local(std::string x, NetPtr e1, NetPtr e2) {
  Net n{}; n.k = NK::LetLocal; n.var = std::move(x); n.a = std::move(e1); n.b = std::move(e2);
  return mk_n(std::move(n));
}
NetPtr n_let_type(std::string a, Kind k, NetPtr e1, NetPtr e2) {
  Net n{}; n.k = NK::LetType; n.var = std::move(a); n.kind = k; n.a = std::move(e1); n.b = std::move(e2);
  return mk_n(std::move(n));
}
NetPtr n_choose(bool left, LocSetPtr to, NetPtr body) {
  Net n{}; n.k = NK::Choose; n.dir_left = left; n.rho = std::move(to); n.a = std::move(body);
  return mk_n(std::move(n));
}
NetPtr n_allow(LocExpr from, NetPtr l, NetPtr r) {
  Net n{}; n.k = NK::Allow; n.loc = std::move(from); n.a = std::move(l); n.b = std::move(r);
  return mk_n(std::move(n));
}
NetPtr n_am_i_in(LocSetPtr rho, NetPtr t, NetPtr e) {
  Net n{}; n.k = NK::AmIIn; n.rho = std::move(rho); n.a = std::move(t); n.b = std::move(e);
  return mk_n(std::move(n));
}
NetPtr n_ite(NetPtr c, NetPtr t, NetPtr e) {
  Net n{}; n.k = NK::Ite; n.a = std::move(c); n.b = std::move(t); n.c = std::move(e);
  return mk_n(std::move(n));
}

bool net_equal(const NetPtr& a, const NetPtr& b) {
  if (a.get() == b.get()) return true;
  if ((a != nullptr) != (b != nullptr)) return false;
  if (!a) return true;
  if (a->k != b->k || a->var != b->var || a->var2 != b->var2 || a->kind != b->kind ||
      a->dir_left != b->dir_left || a->loc != b->loc)
    return false;
  if ((a->type != nullptr) != (b->type != nullptr)) return false;
  if (a->type && !ct_equal(a->type, b->type)) return false;
  if ((a->e != nullptr) != (b->e != nullptr)) return false;
  if (a->e && !le_equal(a->e, b->e)) return false;
  if ((a->rho != nullptr) != (b->rho != nullptr)) return false;
  if (a->rho && !ls_equal(a->rho, b->rho)) return false;
  for (auto sel : {&Net::a, &Net::b, &Net::c})
    if (!net_equal((*a).*sel, (*b).*sel)) return false;
  return true;
}

std::string net_to_string(const NetPtr& e) {
  std::ostringstream os;
  switch (e->k) {
    case NK::Var: os << e->var; break;
    case NK::Unit: os << "()"; break;
    case NK::Ret: os << "ret " << le_to_string(e->e); break;
    case NK::Seq: os << "(" << net_to_string(e->a) << "; " << net_to_string(e->b) << ")"; break;
    case NK::Fun:
      os << "(fun " << e->var << "(" << e->var2 << ") = " << net_to_string(e->a) << ")";
      break;
    case NK::App: os << "(" << net_to_string(e->a) << " " << net_to_string(e->b) << ")"; break;
    case NK::TyAbs:
      os << "(tyfun " << e->var << " :: " << kind_to_string(e->kind) << " => "
         << net_to_string(e->a) << ")";
      break;
    case NK::TyApp: os << "(" << net_to_string(e->a) << " [" << ct_to_string(e->type) << "])"; break;
    case NK::Pair: os << "(" << net_to_string(e->a) << ", " << net_to_string(e->b) << ")"; break;
    case NK::Fst: os << "fst " << net_to_string(e->a); break;
    case NK::Snd: os << "snd " << net_to_string(e->a); break;
    case NK::Inl: os << "inl " << net_to_string(e->a); break;
    case NK::Inr: os << "inr " << net_to_string(e->a); break;
    case NK::Case:
      os << "(case " << net_to_string(e->a) << " of inl " << e->var << " => "
         << net_to_string(e->b) << " | inr " << e->var2 << " => " << net_to_string(e->c) << ")";
      break;
    case NK::Fold: os << "fold " << net_to_string(e->a); break;
    case NK::Unfold: os << "unfold " << net_to_string(e->a); break;
    case NK::Send:
      os << "send " << net_to_string(e->a) << " to " << ls_to_string(e->rho);
      break;
    case NK::Recv: os << "recv " << e->loc.name; break;
    case NK::LetLocal:
      os << "(let " << e->var << " := " << net_to_string(e->a) << " in "
         << net_to_string(e->b) << ")";
      break;
    case NK::LetType:
      os << "(let " << e->var << " :: " << kind_to_string(e->kind) << " := "
         << net_to_string(e->a) << " in " << net_to_string(e->b) << ")";
      break;
    case NK::Choose:
      os << "choose " << (e->dir_left ? "left" : "right") << " for "
         << ls_to_string(e->rho) << "; " << net_to_string(e->a);
      break;
    case NK::Allow: {
      os << "allow " << e->loc.name << " choice";
      if (e->a) os << " | left => " << net_to_string(e->a);
      if (e->b) os << " | right => " << net_to_string(e->b);
      break;
    }
    case NK::AmIIn:
      os << "(am-i-in " << ls_to_string(e->rho) << " then " << net_to_string(e->a)
         << " else " << net_to_string(e->b) << ")";
      break;
    case NK::Ite:
      os << "(if " << net_to_string(e->a) << " then " << net_to_string(e->b)
         << " else " << net_to_string(e->c) << ")";
      break;
  }
  return os.str();
}

bool net_is_value(const NetPtr& e) {
  switch (e->k) {
    case NK::Unit:
    case NK::Fun:
    case NK::TyAbs:
      return true;
    case NK::Ret:
      return is_lvalue(e->e);
    case NK::Pair:
      return net_is_value(e->a) && net_is_value(e->b);
    case NK::Inl:
    case NK::Inr:
    case NK::Fold:
      return net_is_value(e->a);
    default:
      return false;
  }
}

// ---- free variables ----

std::set<std::string> net_fcv(const NetPtr& e) {
  std::set<std::string> out;
  switch (e->k) {
    case NK::Var:
      out.insert(e->var);
      return out;
    case NK::Fun: {
      out = net_fcv(e->a);
      out.erase(e->var);
      out.erase(e->var2);
      return out;
    }
    case NK::Case: {
      out = net_fcv(e->a);
      auto l = net_fcv(e->b);
      l.erase(e->var);
      auto r = net_fcv(e->c);
      r.erase(e->var2);
      out.insert(l.begin(), l.end());
      out.insert(r.begin(), r.end());
      return out;
    }
    default: {
      for (auto sel : {&Net::a, &Net::b, &Net::c})
        if ((*e).*sel) {
          auto s = net_fcv((*e).*sel);
          out.insert(s.begin(), s.end());
        }
      return out;
    }
  }
}

std::set<std::string> net_fv_local(const NetPtr& e) {
  std::set<std::string> out;
  if (e->k == NK::Ret) return le_fv(e->e);
  if (e->k == NK::LetLocal) {
    out = net_fv_local(e->a);
    auto body = net_fv_local(e->b);
    body.erase(e->var);
    out.insert(body.begin(), body.end());
    return out;
  }
  for (auto sel : {&Net::a, &Net::b, &Net::c})
    if ((*e).*sel) {
      auto s = net_fv_local((*e).*sel);
      out.insert(s.begin(), s.end());
    }
  return out;
}

std::set<std::string> net_ftv(const NetPtr& e) {
  std::set<std::string> out;
  if (e->e) {
    auto s = le_ftv(e->e);
    out.insert(s.begin(), s.end());
  }
  if (e->rho) {
    auto s = fv_set(e->rho);
    out.insert(s.begin(), s.end());
  }
  if (e->loc.is_var) out.insert(e->loc.name);
  if (e->type) {
    auto s = ct_ftv(e->type);
    out.insert(s.begin(), s.end());
  }
  if (e->k == NK::TyAbs || e->k == NK::LetType) {
    if (e->k == NK::LetType) {
      auto h = net_ftv(e->a);
      out.insert(h.begin(), h.end());
      auto b = net_ftv(e->b);
      b.erase(e->var);
      out.insert(b.begin(), b.end());
    } else {
      auto b = net_ftv(e->a);
      b.erase(e->var);
      out.insert(b.begin(), b.end());
    }
    return out;
  }
  for (auto sel : {&Net::a, &Net::b, &Net::c})
    if ((*e).*sel) {
      auto s = net_ftv((*e).*sel);
      out.insert(s.begin(), s.end());
    }
  return out;
}

// ---- substitutions ----

NetPtr net_subst_prog(const NetPtr& e, const std::string& x, const NetPtr& v) {
  switch (e->k) {
    case NK::Var:
      return e->var == x ? v : e;
    case NK::Fun: {
      if (e->var == x || e->var2 == x) return e;
      std::string f = e->var, p = e->var2;
      NetPtr body = e->a;
      auto fvv = net_fcv(v);
      if (fvv.count(f)) {
        std::string n = fresh_name(f);
        body = net_subst_prog(body, f, n_var(n));
        f = n;
      }
      if (fvv.count(p)) {
        std::string n = fresh_name(p);
        body = net_subst_prog(body, p, n_var(n));
        p = n;
      }
      return n_fun(f, p, net_subst_prog(body, x, v));
    }
    case NK::Case: {
      auto s = net_subst_prog(e->a, x, v);
      std::string xl = e->var, xr = e->var2;
      NetPtr lb = e->b, rb = e->c;
      auto fvv = net_fcv(v);
      if (xl != x) {
        if (fvv.count(xl)) {
          std::string n = fresh_name(xl);
          lb = net_subst_prog(lb, xl, n_var(n));
          xl = n;
        }
        lb = net_subst_prog(lb, x, v);
      }
      if (xr != x) {
        if (fvv.count(xr)) {
          std::string n = fresh_name(xr);
          rb = net_subst_prog(rb, xr, n_var(n));
          xr = n;
        }
        rb = net_subst_prog(rb, x, v);
      }
      return n_case(s, xl, lb, xr, rb);
    }
    default: {
      Net out = *e;
      for (auto sel : {&Net::a, &Net::b, &Net::c})
        if (out.*sel) out.*sel = net_subst_prog(out.*sel, x, v);
      return mk_n(std::move(out));
    }
  }
}

NetPtr net_subst_local(const NetPtr& e, const std::string& x, const LTermPtr& v) {
  switch (e->k) {
    case NK::Ret:
      return n_ret(lsubst_term(e->e, x, v));
    case NK::LetLocal: {
      auto a = net_subst_local(e->a, x, v);
      if (e->var == x) return n_let_local(e->var, a, e->b);
      return n_let_local(e->var, a, net_subst_local(e->b, x, v));
    }
    default: {
      Net out = *e;
      for (auto sel : {&Net::a, &Net::b, &Net::c})
        if (out.*sel) out.*sel = net_subst_local(out.*sel, x, v);
      return mk_n(std::move(out));
    }
  }
}

namespace {

// Sort-directed views of a type substituted for a variable, as in the
// choreography layer.
struct NTySubst {
  std::string a;
  CTypePtr t;
  Kind k;

  LocExpr as_loc() const {
    return t->k == ChorType::K::Loc ? t->loc : LocExpr::var(t->var);
  }
  LocSetPtr as_set() const {
    return t->k == ChorType::K::Set ? t->rho : ls_var(t->var);
  }
  LTypePtr as_local() const {
    return t->k == ChorType::K::Local ? t->local : lt_var(t->var);
  }
  LocSetPtr set(const LocSetPtr& s) const {
    if (!s) return s;
    if (k == Kind::StarLoc) return ls_subst_locvar(s, a, as_loc());
    if (k == Kind::StarSet) return ls_subst_setvar(s, a, as_set());
    return s;
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

NetPtr net_subst_type_s(const NetPtr& e, const NTySubst& s) {
  Net out = *e;
  if (out.e) out.e = s.lterm(out.e);
  if (out.rho) out.rho = s.set(out.rho);
  out.loc = s.locexpr(out.loc);
  if (out.type) out.type = ctype_subst(out.type, s.a, s.t, s.k);
  if ((e->k == NK::TyAbs || e->k == NK::LetType) && e->var == s.a) {
    // shadowed in the body (and the binding position of a let's head)
    if (e->k == NK::LetType && out.a) out.a = net_subst_type_s(out.a, s);
    return mk_n(std::move(out));
  }
  for (auto sel : {&Net::a, &Net::b, &Net::c})
    if (out.*sel) out.*sel = net_subst_type_s(out.*sel, s);
  return mk_n(std::move(out));
}

}  // namespace

NetPtr net_subst_type(const NetPtr& e, const std::string& a, const CTypePtr& t, Kind k) {
  return net_subst_type_s(e, NTySubst{a, t, k});
}

// ---- messages and labels ----

bool msg_equal(const Msg& a, const Msg& b) {
  if (a.is_label != b.is_label) return false;
  if (a.is_label) return a.left == b.left;
  return le_equal(a.v, b.v);
}

std::string msg_to_string(const Msg& m) {
  if (m.is_label) return m.left ? "left" : "right";
  return le_to_string(m.v);
}

std::string net_label_to_string(const NetLabel& l) {
  switch (l.k) {
    case NetLabel::K::Iota: return "iota";
    case NetLabel::K::IotaSync: return "iota-sync";
    case NetLabel::K::Send:
      return "send(" + msg_to_string(l.m) + ", " + ls_to_string(l.rho) + ")";
    case NetLabel::K::Recv:
      return "recv(" + l.from + ", " + msg_to_string(l.m) + ")";
  }
  return "?";
}

// ---- per-location semantics ----

namespace {

NetStep iota(NetPtr next) { return {{NetLabel::K::Iota, {}, nullptr, ""}, std::move(next)}; }
NetStep iota_sync(NetPtr next) {
  return {{NetLabel::K::IotaSync, {}, nullptr, ""}, std::move(next)};
}

// Rebuilds e with subterm slot `sel` replaced, keeping each inner label.
template <typename Rebuild>
void lift(std::vector<NetStep>& out, const std::vector<NetStep>& inner,
          const Rebuild& rebuild) {
  for (const auto& s : inner) out.push_back({s.label, rebuild(s.next)});
}

}  // namespace

std::vector<NetStep> net_steps(const Location& self, const NetPtr& e,
                               const LocationTable& table) {
  std::vector<NetStep> out;
  switch (e->k) {
    case NK::Var:
    case NK::Unit:
    case NK::Fun:
    case NK::TyAbs:
    case NK::Recv:
      return out;
    case NK::Ret: {
      if (auto e2 = lstep(e->e)) out.push_back(iota(n_ret(*e2)));
      return out;
    }
    case NK::Seq: {
      lift(out, net_steps(self, e->a, table),
           [&](const NetPtr& n) { return n_seq(n, e->b); });
      if (net_is_value(e->a)) out.push_back(iota(e->b));
      return out;
    }
    case NK::App: {
      lift(out, net_steps(self, e->a, table),
           [&](const NetPtr& n) { return n_app(n, e->b); });
      if (net_is_value(e->a)) {
        lift(out, net_steps(self, e->b, table),
             [&](const NetPtr& n) { return n_app(e->a, n); });
        if (net_is_value(e->b) && e->a->k == NK::Fun) {
          auto body = net_subst_prog(e->a->a, e->a->var, e->a);
          out.push_back(iota_sync(net_subst_prog(body, e->a->var2, e->b)));
        }
      }
      return out;
    }
    case NK::TyApp: {
      lift(out, net_steps(self, e->a, table),
           [&](const NetPtr& n) { return n_tyapp(n, e->type); });
      if (e->a->k == NK::TyAbs)
        out.push_back(iota_sync(net_subst_type(e->a->a, e->a->var, e->type, e->a->kind)));
      return out;
    }
    case NK::Pair: {
      lift(out, net_steps(self, e->a, table),
           [&](const NetPtr& n) { return n_pair(n, e->b); });
      if (net_is_value(e->a))
        lift(out, net_steps(self, e->b, table),
             [&](const NetPtr& n) { return n_pair(e->a, n); });
      return out;
    }
    case NK::Fst: {
      lift(out, net_steps(self, e->a, table), [](const NetPtr& n) { return n_fst(n); });
      if (e->a->k == NK::Pair && net_is_value(e->a)) out.push_back(iota_sync(e->a->a));
      return out;
    }
    case NK::Snd: {
      lift(out, net_steps(self, e->a, table), [](const NetPtr& n) { return n_snd(n); });
      if (e->a->k == NK::Pair && net_is_value(e->a)) out.push_back(iota_sync(e->a->b));
      return out;
    }
    case NK::Inl: {
      lift(out, net_steps(self, e->a, table), [](const NetPtr& n) { return n_inl(n); });
      return out;
    }
    case NK::Inr: {
      lift(out, net_steps(self, e->a, table), [](const NetPtr& n) { return n_inr(n); });
      return out;
    }
    case NK::Case: {
      lift(out, net_steps(self, e->a, table),
           [&](const NetPtr& n) { return n_case(n, e->var, e->b, e->var2, e->c); });
      if (net_is_value(e->a)) {
        if (e->a->k == NK::Inl)
          out.push_back(iota_sync(net_subst_prog(e->b, e->var, e->a->a)));
        if (e->a->k == NK::Inr)
          out.push_back(iota_sync(net_subst_prog(e->c, e->var2, e->a->a)));
      }
      return out;
    }
    case NK::Fold: {
      lift(out, net_steps(self, e->a, table), [](const NetPtr& n) { return n_fold(n); });
      return out;
    }
    case NK::Unfold: {
      lift(out, net_steps(self, e->a, table), [](const NetPtr& n) { return n_unfold(n); });
      if (e->a->k == NK::Fold && net_is_value(e->a)) out.push_back(iota_sync(e->a->a));
      return out;
    }
    case NK::Send: {
      lift(out, net_steps(self, e->a, table),
           [&](const NetPtr& n) { return n_send(n, e->rho); });
      if (e->a->k == NK::Ret && net_is_value(e->a) && ground_set(e->rho)) {
        Msg m{false, true, e->a->e};
        out.push_back({{NetLabel::K::Send, m, e->rho, ""}, e->a});
      }
      return out;
    }
    case NK::LetLocal: {
      lift(out, net_steps(self, e->a, table),
           [&](const NetPtr& n) { return n_let_local(e->var, n, e->b); });
      if (e->a->k == NK::Ret && net_is_value(e->a))
        out.push_back(iota(net_subst_local(e->b, e->var, e->a->e)));
      return out;
    }
    case NK::LetType: {
      lift(out, net_steps(self, e->a, table),
           [&](const NetPtr& n) { return n_let_type(e->var, e->kind, n, e->b); });
      if (e->a->k == NK::Ret && net_is_value(e->a)) {
        CTypePtr t;
        switch (e->kind) {
          case Kind::StarLoc: {
            if (auto l = reify_loc(e->a->e, table)) t = ct_loc(LocExpr::concrete(*l));
            break;
          }
          case Kind::StarSet: {
            auto s = reify_locset(e->a->e, table);
            if (s && !s->empty()) t = ct_set(ls_of(*s));
            break;
          }
          case Kind::StarLocal: {
            if (auto lt = reify_tyrep(e->a->e)) t = ct_local(*lt);
            break;
          }
          case Kind::Star:
            break;
        }
        if (t) out.push_back(iota(net_subst_type(e->b, e->var, t, e->kind)));
      }
      return out;
    }
    case NK::Choose: {
      if (ground_set(e->rho)) {
        Msg m{true, e->dir_left, nullptr};
        out.push_back({{NetLabel::K::Send, m, e->rho, ""}, e->a});
      }
      return out;
    }
    case NK::Allow: {
      if (!e->loc.is_var) {
        if (e->a)
          out.push_back({{NetLabel::K::Recv, Msg{true, true, nullptr}, nullptr, e->loc.name}, e->a});
        if (e->b)
          out.push_back({{NetLabel::K::Recv, Msg{true, false, nullptr}, nullptr, e->loc.name}, e->b});
      }
      return out;
    }
    case NK::AmIIn: {
      if (nec_in(self, e->rho)) out.push_back(iota(e->a));
      else if (!poss_in(self, e->rho)) out.push_back(iota(e->b));
      return out;
    }
    case NK::Ite: {
      lift(out, net_steps(self, e->a, table),
           [&](const NetPtr& n) { return n_ite(n, e->b, e->c); });
      if (e->a->k == NK::Ret && net_is_value(e->a)) {
        if (auto b = reify_bool(e->a->e)) out.push_back(iota(*b ? e->b : e->c));
      }
      return out;
    }
  }
  return out;
}

std::vector<NetPtr> net_receive(const Location& self, const NetPtr& e,
                                const Location& from, const Msg& m,
                                const LocationTable& table) {
  std::vector<NetPtr> out;
  auto ctx = [&](const NetPtr& sub, auto rebuild) {
    for (auto& n : net_receive(self, sub, from, m, table)) out.push_back(rebuild(n));
  };
  switch (e->k) {
    case NK::Recv: {
      if (!m.is_label && !e->loc.is_var && e->loc.name == from)
        out.push_back(n_ret(m.v));
      return out;
    }
    case NK::Allow: {
      if (m.is_label && !e->loc.is_var && e->loc.name == from) {
        if (m.left && e->a) out.push_back(e->a);
        if (!m.left && e->b) out.push_back(e->b);
      }
      return out;
    }
    case NK::Seq:
      ctx(e->a, [&](const NetPtr& n) { return n_seq(n, e->b); });
      return out;
    case NK::App:
      ctx(e->a, [&](const NetPtr& n) { return n_app(n, e->b); });
      if (net_is_value(e->a)) ctx(e->b, [&](const NetPtr& n) { return n_app(e->a, n); });
      return out;
    case NK::TyApp:
      ctx(e->a, [&](const NetPtr& n) { return n_tyapp(n, e->type); });
      return out;
    case NK::Pair:
      ctx(e->a, [&](const NetPtr& n) { return n_pair(n, e->b); });
      if (net_is_value(e->a)) ctx(e->b, [&](const NetPtr& n) { return n_pair(e->a, n); });
      return out;
    case NK::Fst: ctx(e->a, [](const NetPtr& n) { return n_fst(n); }); return out;
    case NK::Snd: ctx(e->a, [](const NetPtr& n) { return n_snd(n); }); return out;
    case NK::Inl: ctx(e->a, [](const NetPtr& n) { return n_inl(n); }); return out;
    case NK::Inr: ctx(e->a, [](const NetPtr& n) { return n_inr(n); }); return out;
    case NK::Fold: ctx(e->a, [](const NetPtr& n) { return n_fold(n); }); return out;
    case NK::Unfold: ctx(e->a, [](const NetPtr& n) { return n_unfold(n); }); return out;
    case NK::Case:
      ctx(e->a, [&](const NetPtr& n) { return n_case(n, e->var, e->b, e->var2, e->c); });
      return out;
    case NK::Send:
      ctx(e->a, [&](const NetPtr& n) { return n_send(n, e->rho); });
      return out;
    case NK::LetLocal:
      ctx(e->a, [&](const NetPtr& n) { return n_let_local(e->var, n, e->b); });
      return out;
    case NK::LetType:
      ctx(e->a, [&](const NetPtr& n) { return n_let_type(e->var, e->kind, n, e->b); });
      return out;
    case NK::Ite:
      ctx(e->a, [&](const NetPtr& n) { return n_ite(n, e->b, e->c); });
      return out;
    default:
      return out;
  }
}

// ---- system semantics ----

std::string system_label_to_string(const SystemLabel& l) {
  switch (l.k) {
    case SystemLabel::K::Iota: return "iota@" + l.loc;
    case SystemLabel::K::IotaSync: return "iota-sync";
    case SystemLabel::K::Comm:
      return l.loc + "." + msg_to_string(l.m) + " ~> " + ls_to_string(l.rho);
  }
  return "?";
}

std::vector<SystemStep> system_steps(const System& pi, const LocationTable& table) {
  std::vector<SystemStep> out;
  std::map<Location, std::vector<NetPtr>> sync_parts;
  bool sync_ok = !pi.empty();
  for (const auto& [loc, prog] : pi) {
    auto steps = net_steps(loc, prog, table);
    bool has_sync = false;
    for (const auto& s : steps) {
      switch (s.label.k) {
        case NetLabel::K::Iota: {
          System next = pi;
          next[loc] = s.next;
          out.push_back({{SystemLabel::K::Iota, loc, {}, nullptr}, std::move(next)});
          break;
        }
        case NetLabel::K::IotaSync:
          has_sync = true;
          sync_parts[loc].push_back(s.next);
          break;
        case NetLabel::K::Send: {
          auto recips = ground_set(s.label.rho);
          if (!recips) break;
          // every recipient inside the system must be able to accept; the
          // sender already holds the value, so it never pairs a recv with
          // itself
          std::vector<System> partial{pi};
          bool ok = true;
          for (const auto& r : *recips) {
            if (r == loc) continue;
            auto it = pi.find(r);
            if (it == pi.end()) { ok = false; break; }
            auto ways = net_receive(r, it->second, loc, s.label.m, table);
            if (ways.empty()) { ok = false; break; }
            std::vector<System> grown;
            for (const auto& sys : partial)
              for (const auto& w : ways) {
                System n = sys;
                n[r] = w;
                grown.push_back(std::move(n));
              }
            partial = std::move(grown);
          }
          if (!ok) break;
          for (auto& sys : partial) {
            sys[loc] = s.next;
            out.push_back({{SystemLabel::K::Comm, loc, s.label.m, s.label.rho},
                           std::move(sys)});
          }
          break;
        }
        case NetLabel::K::Recv:
          // paired only inside Comm
          break;
      }
    }
    if (!has_sync) sync_ok = false;
  }
  if (sync_ok) {
    std::vector<System> combos{System{}};
    for (const auto& [loc, opts] : sync_parts) {
      std::vector<System> grown;
      for (const auto& sys : combos)
        for (const auto& o : opts) {
          System n = sys;
          n[loc] = o;
          grown.push_back(std::move(n));
        }
      combos = std::move(grown);
    }
    for (auto& sys : combos)
      out.push_back({{SystemLabel::K::IotaSync, "", {}, nullptr}, std::move(sys)});
  }
  return out;
}

bool is_terminal_values(const System& pi) {
  for (const auto& [loc, prog] : pi)
    if (!net_is_value(prog)) return false;
  return true;
}

bool system_equal(const System& a, const System& b) {
  if (a.size() != b.size()) return false;
  auto ia = a.begin();
  auto ib = b.begin();
  for (; ia != a.end(); ++ia, ++ib)
    if (ia->first != ib->first || !net_equal(ia->second, ib->second)) return false;
  return true;
}

std::string system_to_string(const System& pi) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [loc, prog] : pi) {
    if (!first) os << " || ";
    first = false;
    os << loc << " |> " << net_to_string(prog);
  }
  return os.str();
}

SimReport simulate(const System& pi, const LocationTable& table, int fuel,
                   NetScheduler sched, uint32_t seed) {
  SimReport rep{SimReport::Status::FuelExhausted, pi, {}};
  std::mt19937 rng(seed);
  System cur = pi;
  for (int i = 0; i < fuel; ++i) {
    if (is_terminal_values(cur)) {
      rep.status = SimReport::Status::AllValues;
      break;
    }
    auto steps = system_steps(cur, table);
    if (steps.empty()) {
      rep.status = SimReport::Status::Deadlocked;
      break;
    }
    size_t pick = 0;
    if (sched == NetScheduler::Seeded)
      pick = std::uniform_int_distribution<size_t>(0, steps.size() - 1)(rng);
    rep.trace.push_back(steps[pick]);
    cur = steps[pick].next;
  }
  if (is_terminal_values(cur)) rep.status = SimReport::Status::AllValues;
  rep.final = cur;
  return rep;
}

ExploreGraph explore(const System& pi, const LocationTable& table, int depth) {
  ExploreGraph g;
  std::map<std::string, size_t> seen;
  std::vector<std::pair<size_t, int>> work;
  auto intern = [&](const System& s) -> std::pair<size_t, bool> {
    auto key = system_to_string(s);
    auto it = seen.find(key);
    if (it != seen.end()) return {it->second, false};
    size_t id = g.states.size();
    seen.emplace(std::move(key), id);
    g.states.push_back(s);
    g.edges.emplace_back();
    return {id, true};
  };
  work.push_back({intern(pi).first, 0});
  std::set<size_t> expanded;
  while (!work.empty()) {
    auto [id, d] = work.back();
    work.pop_back();
    if (expanded.count(id)) continue;
    if (is_terminal_values(g.states[id])) {
      g.all_values.push_back(id);
      expanded.insert(id);
      continue;
    }
    if (d >= depth) {
      g.frontier.push_back(id);
      continue;
    }
    expanded.insert(id);
    auto steps = system_steps(g.states[id], table);
    if (steps.empty()) {
      g.deadlocked.push_back(id);
      continue;
    }
    for (auto& s : steps) {
      auto [nid, is_new] = intern(s.next);
      g.edges[id].push_back({s.label, nid});
      if (is_new || !expanded.count(nid)) work.push_back({nid, d + 1});
    }
  }
  // keep frontier entries that never got expanded via a shorter path
  std::set<size_t> front;
  for (auto id : g.frontier)
    if (!expanded.count(id)) front.insert(id);
  g.frontier.assign(front.begin(), front.end());
  return g;
}

}  // namespace qc
