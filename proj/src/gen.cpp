#include "gen.hpp"

#include <stdexcept>

#include "statics.hpp"

namespace qc {

namespace {

using Rng = std::mt19937_64;

int pick(Rng& rng, int n) { return static_cast<int>(rng() % static_cast<uint64_t>(n)); }
bool flip(Rng& rng) { return (rng() & 1) != 0; }

std::vector<Location> subset_nonempty(Rng& rng, const std::vector<Location>& u) {
  std::vector<Location> out;
  for (const auto& l : u)
    if (flip(rng)) out.push_back(l);
  if (out.empty()) out.push_back(u[pick(rng, static_cast<int>(u.size()))]);
  return out;
}

LTermPtr gen_int(Rng& rng, int d);

LTermPtr gen_bool(Rng& rng, int d) {
  if (d <= 0) return flip(rng) ? le_true() : le_false();
  switch (pick(rng, 5)) {
    case 0: return le_true();
    case 1: return le_false();
    case 2: return le_eq(gen_int(rng, d - 1), gen_int(rng, d - 1));
    case 3: return le_lt(gen_int(rng, d - 1), gen_int(rng, d - 1));
    default: return le_if(gen_bool(rng, d - 1), gen_bool(rng, d - 1), gen_bool(rng, d - 1));
  }
}

LTermPtr gen_int(Rng& rng, int d) {
  if (d <= 0) return le_lit(pick(rng, 10));
  switch (pick(rng, 4)) {
    case 0: return le_lit(pick(rng, 10));
    case 1: return le_add(gen_int(rng, d - 1), gen_int(rng, d - 1));
    case 2: return le_if(gen_bool(rng, d - 1), gen_int(rng, d - 1), gen_int(rng, d - 1));
    default:
      // a beta redex keeps the stepper honest
      return le_app(le_fun("f", "x", lt_int(),
                           le_add(le_var("x"), le_lit(pick(rng, 5)))),
                    gen_int(rng, d - 1));
  }
}

LTermPtr gen_int_list(Rng& rng, int d) {
  if (d <= 0 || flip(rng)) return le_ascribe(le_nil(), lt_list(lt_int()));
  return le_cons(gen_int(rng, d - 1), gen_int_list(rng, d - 1));
}

struct ChorGen {
  Rng& rng;
  std::vector<Location> u;
  LocationTable table;
  int local_depth;
  int fresh = 0;

  LocSetPtr sub(const std::vector<Location>& from) {
    return ls_of(subset_nonempty(rng, from));
  }

  // A located int/bool computation together with its type. Every rule here
  // produces an At type so senders and binders can build on the result.
  GeneratedChor at(int d) {
    if (d <= 0) return done();
    switch (pick(rng, 7)) {
      case 0: return done();
      case 1: return send(d);
      case 2: return u.size() >= 2 ? if_sync(d) : done();
      case 3: return let_local(d);
      case 4: return app_id(d);
      case 5: return let_loc(d);
      default: return send(d);
    }
  }

  GeneratedChor done() {
    auto rho = sub(u);
    if (flip(rng)) {
      auto e = gen_int(rng, local_depth);
      return {c_done(rho, e), ct_at(lt_int(), rho)};
    }
    auto e = gen_bool(rng, local_depth);
    return {c_done(rho, e), ct_at(lt_bool(), rho)};
  }

  GeneratedChor send(int d) {
    auto g = at(d - 1);
    auto holders = ground_set(g.type->rho);
    std::vector<Location> hv(holders->begin(), holders->end());
    Location sender = hv[pick(rng, static_cast<int>(hv.size()))];
    auto to = sub(u);
    auto c = c_send(g.c, LocExpr::concrete(sender), to);
    return {c, ct_at(g.type->local, ls_union(g.type->rho, to))};
  }

  GeneratedChor if_sync(int d) {
    Location decider = u[pick(rng, static_cast<int>(u.size()))];
    auto deciders = ls_sng(decider);
    auto cond = c_done(deciders, gen_bool(rng, local_depth));
    std::vector<Location> others;
    for (const auto& l : u)
      if (l != decider) others.push_back(l);
    auto informed = ls_of(others);
    auto rho_b = sub(u);
    bool ints = flip(rng);
    auto mk = [&] {
      return c_done(rho_b, ints ? gen_int(rng, local_depth) : gen_bool(rng, local_depth));
    };
    auto then_c = c_sync(LocExpr::concrete(decider), true, informed, mk());
    auto else_c = c_sync(LocExpr::concrete(decider), false, informed, mk());
    auto c = c_if(deciders, cond, then_c, else_c);
    return {c, ct_at(ints ? lt_int() : lt_bool(), rho_b)};
  }

  GeneratedChor let_local(int d) {
    auto g = at(d - 1);
    auto holders = ground_set(g.type->rho);
    std::vector<Location> hv(holders->begin(), holders->end());
    auto rho2 = subset_nonempty(rng, hv);
    auto rho3 = subset_nonempty(rng, rho2);
    std::string x = "x" + std::to_string(fresh++);
    ChorPtr body;
    CTypePtr bt;
    if (flip(rng)) {
      // reference the binding from inside its namespace
      LTermPtr e = g.type->local->k == LocalType::K::Int
                       ? le_add(le_var(x), le_lit(pick(rng, 5)))
                       : le_if(le_var(x), le_lit(1), le_lit(0));
      body = c_done(ls_of(rho3), e);
      bt = ct_at(lt_int(), ls_of(rho3));
    } else {
      auto b = done();
      body = b.c;
      bt = b.type;
    }
    auto c = c_let_local(ls_of(rho2), x, g.type->local, g.c, body);
    return {c, bt};
  }

  GeneratedChor app_id(int d) {
    auto g = at(d - 1);
    std::string f = "F" + std::to_string(fresh), x = "X" + std::to_string(fresh);
    ++fresh;
    auto fn = c_fun(f, x, ct_arrow(g.type, g.type), c_var(x));
    return {c_app(fn, g.c), g.type};
  }

  GeneratedChor let_loc(int d) {
    // bind a first-class location name, then compute at a ground namespace
    Location target = u[pick(rng, static_cast<int>(u.size()))];
    auto code = table.code_of(target);
    if (!code) return done();
    auto rho1 = ls_of(subset_with(target));
    auto rep = le_ascribe(le_lit(*code), lt_loc(ls_sng(target)));
    auto bound = c_done(rho1, rep);
    auto rho2 = ls_sng(target);
    auto body = at(d - 1);
    std::string a = "l" + std::to_string(fresh++);
    auto c = c_let_type(rho2, a, Kind::StarLoc, bound, body.c);
    return {c, body.type};
  }

  std::vector<Location> subset_with(const Location& must) {
    auto s = subset_nonempty(rng, u);
    for (const auto& l : s)
      if (l == must) return s;
    s.push_back(must);
    return s;
  }

  // Top level may also leave the At fragment.
  GeneratedChor top(int d) {
    if (d > 0) {
      switch (pick(rng, 8)) {
        case 6: {
          auto a = at(d - 1), b = at(d - 1);
          return {c_pair(a.c, b.c), ct_prod(a.type, b.type)};
        }
        case 7: {
          auto a = at(d - 1), b = at(d - 1);
          auto p = c_pair(a.c, b.c);
          return flip(rng) ? GeneratedChor{c_fst(p), a.type}
                           : GeneratedChor{c_snd(p), b.type};
        }
        default: break;
      }
    }
    return at(d);
  }
};

}  // namespace

LocationTable gen_table(const GenConfig& cfg) {
  LocationTable t;
  auto u = gen_universe(cfg);
  for (size_t i = 0; i < u.size(); ++i) t.codes[static_cast<long long>(i)] = u[i];
  t.fallback = u.back();
  return t;
}

std::vector<Location> gen_universe(const GenConfig& cfg) {
  int n = cfg.universe < 1 ? 1 : (cfg.universe > 26 ? 26 : cfg.universe);
  std::vector<Location> u;
  for (int i = 0; i < n; ++i) u.push_back(std::string(1, static_cast<char>('A' + i)));
  return u;
}

GeneratedChor gen_well_typed(const GenConfig& cfg) {
  Rng rng(cfg.seed);
  auto table = gen_table(cfg);
  auto u = gen_universe(cfg);
  for (int attempt = 0; attempt < 64; ++attempt) {
    ChorGen g{rng, u, table, cfg.local_depth};
    auto out = g.top(cfg.max_depth);
    auto t = type_of({}, {}, {}, out.c, table);
    if (t && ct_equal(*t, out.type)) return out;
  }
  throw std::runtime_error("generation-exhausted");
}

LTermPtr gen_local(std::mt19937_64& rng, const LTypePtr& want, int depth) {
  switch (want->k) {
    case LocalType::K::Int: return gen_int(rng, depth);
    case LocalType::K::Bool: return gen_bool(rng, depth);
    case LocalType::K::List: return gen_int_list(rng, depth);
    default: throw std::runtime_error("gen_local: unsupported type");
  }
}

LTermPtr gen_local_any(std::mt19937_64& rng, int depth) {
  switch (pick(rng, 3)) {
    case 0: return gen_int(rng, depth);
    case 1: return gen_bool(rng, depth);
    default: return gen_int_list(rng, depth);
  }
}

}  // namespace qc
