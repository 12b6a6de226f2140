#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace qc {

using Location = std::string;

// A location expression: either a concrete location name or a type variable.
struct LocExpr {
  bool is_var = false;
  std::string name;

  static LocExpr concrete(std::string n) { return {false, std::move(n)}; }
  static LocExpr var(std::string n) { return {true, std::move(n)}; }
  bool operator==(const LocExpr&) const = default;
  bool operator<(const LocExpr& o) const {
    return std::tie(is_var, name) < std::tie(o.is_var, o.name);
  }
};

// Symbolic location-set expressions: a variable, a singleton, or a union.
// Non-empty by construction; there is deliberately no normalization (the
// containment/subset relations are derivation searches on raw syntax).
struct LocSet;
using LocSetPtr = std::shared_ptr<const LocSet>;

struct LocSet {
  enum class K { Var, Sng, Union };
  K k;
  std::string var;      // K::Var
  LocExpr elem;         // K::Sng
  LocSetPtr lhs, rhs;   // K::Union
};

LocSetPtr ls_var(std::string name);
LocSetPtr ls_sng(LocExpr e);
LocSetPtr ls_sng(const Location& l);
LocSetPtr ls_union(LocSetPtr a, LocSetPtr b);
// {L1} u {L2} u ... (left-assoc); locs must be non-empty.
LocSetPtr ls_of(const std::vector<Location>& locs);
LocSetPtr ls_of(const std::set<Location>& locs);

bool ls_equal(const LocSetPtr& a, const LocSetPtr& b);
std::string ls_to_string(const LocSetPtr& s);

// Necessary containment #(l in rho).
bool nec_in(const LocExpr& l, const LocSetPtr& rho);
bool nec_in(const Location& l, const LocSetPtr& rho);
// Possible containment <>(l in rho).
bool poss_in(const LocExpr& l, const LocSetPtr& rho);
bool poss_in(const Location& l, const LocSetPtr& rho);
// Inductive subset relation (six rules; not the naive pointwise definition).
bool subset(const LocSetPtr& a, const LocSetPtr& b);
// Necessary disjointness: no l is possibly in both.
bool disjoint(const LocSetPtr& a, const LocSetPtr& b);

std::optional<std::set<Location>> ground_set(const LocSetPtr& s);
std::set<std::string> fv_set(const LocSetPtr& s);
// Concrete locations mentioned anywhere in the expression.
std::set<Location> named_locs_set(const LocSetPtr& s);

// Substitute the type variable a by a set sigma (for *_s variables) or by a
// single location expression (for *_l variables appearing in singletons).
LocSetPtr ls_subst_setvar(const LocSetPtr& s, const std::string& a, const LocSetPtr& sigma);
LocSetPtr ls_subst_locvar(const LocSetPtr& s, const std::string& a, const LocExpr& l);

// Participant footprints for rloc/cloc: empty, a symbolic set, or the whole
// universe of declared locations.
struct Footprint {
  enum class K { Empty, Set, Universe };
  K k = K::Empty;
  LocSetPtr set;  // K::Set

  static Footprint empty() { return {}; }
  static Footprint universe() { return {K::Universe, nullptr}; }
  static Footprint of(LocSetPtr s) { return {K::Set, std::move(s)}; }
  Footprint join(const Footprint& o) const;
};

bool fp_disjoint(const Footprint& a, const Footprint& b);
std::string fp_to_string(const Footprint& f);

}  // namespace qc
