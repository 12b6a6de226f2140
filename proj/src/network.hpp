#pragma once

#include <map>
#include <vector>

#include "chor.hpp"

namespace qc {

struct Net;
using NetPtr = std::shared_ptr<const Net>;

// Per-location network programs. allow_choice keeps its branches optional
// (null = missing side); everything else mirrors the choreography layer with
// sends and receives split apart.
struct Net {
  enum class K {
    Var, Unit, Ret, Seq, Fun, App, TyAbs, TyApp,
    Pair, Fst, Snd, Inl, Inr, Case, Fold, Unfold,
    Send, Recv, LetLocal, LetType, Choose, Allow, AmIIn, Ite
  };
  K k;
  std::string var;   // Var X / Fun F / TyAbs+LetType binder / Case X / LetLocal x
  std::string var2;  // Fun X / Case Y
  Kind kind = Kind::Star;  // TyAbs / LetType binder kind
  CTypePtr type;     // TyApp argument
  LTermPtr e;        // Ret payload
  LocSetPtr rho;     // Send target / Choose recipients / AmIIn
  LocExpr loc;       // Recv source / Allow chooser
  bool dir_left = true;  // Choose selection label
  NetPtr a, b, c;    // subterms; Allow: a = left branch, b = right, may be null
};

NetPtr n_var(std::string x);
NetPtr n_unit();
NetPtr n_ret(LTermPtr e);
NetPtr n_seq(NetPtr a, NetPtr b);
NetPtr n_fun(std::string f, std::string x, NetPtr body);
NetPtr n_app(NetPtr f, NetPtr a);
NetPtr n_tyabs(std::string a, Kind k, NetPtr body);
NetPtr n_tyapp(NetPtr f, CTypePtr t);
NetPtr n_pair(NetPtr a, NetPtr b);
NetPtr n_fst(NetPtr a);
NetPtr n_snd(NetPtr a);
NetPtr n_inl(NetPtr a);
NetPtr n_inr(NetPtr a);
NetPtr n_case(NetPtr s, std::string x, NetPtr l, std::string y, NetPtr r);
NetPtr n_fold(NetPtr a);
NetPtr n_unfold(NetPtr a);
NetPtr n_send(NetPtr subj, LocSetPtr to);
NetPtr n_recv(LocExpr from);
NetPtr n_let_local(std::string x, NetPtr e1, NetPtr e2);
NetPtr n_let_type(std::string a, Kind k, NetPtr e1, NetPtr e2);
NetPtr n_choose(bool left, LocSetPtr to, NetPtr body);
NetPtr n_allow(LocExpr from, NetPtr left_or_null, NetPtr right_or_null);
NetPtr n_am_i_in(LocSetPtr rho, NetPtr then_e, NetPtr else_e);
NetPtr n_ite(NetPtr cond, NetPtr then_e, NetPtr else_e);

bool net_equal(const NetPtr& a, const NetPtr& b);
std::string net_to_string(const NetPtr& e);
bool net_is_value(const NetPtr& e);

// Free program variables (X, F), free local variables inside ret payloads,
// and free type variables of every sort (including location-set variables in
// annotations).
std::set<std::string> net_fcv(const NetPtr& e);
std::set<std::string> net_fv_local(const NetPtr& e);
std::set<std::string> net_ftv(const NetPtr& e);

NetPtr net_subst_prog(const NetPtr& e, const std::string& x, const NetPtr& v);
NetPtr net_subst_local(const NetPtr& e, const std::string& x, const LTermPtr& v);
// t's sort matches k, as in the choreography layer.
NetPtr net_subst_type(const NetPtr& e, const std::string& a, const CTypePtr& t, Kind k);

// A message is a local value or a selection label.
struct Msg {
  bool is_label = false;
  bool left = true;
  LTermPtr v;
};
bool msg_equal(const Msg& a, const Msg& b);
std::string msg_to_string(const Msg& m);

struct NetLabel {
  enum class K { Iota, IotaSync, Send, Recv };
  K k;
  Msg m;          // Send / Recv payload
  LocSetPtr rho;  // Send recipients
  Location from;  // Recv sender
};
std::string net_label_to_string(const NetLabel& l);

struct NetStep {
  NetLabel label;
  NetPtr next;
};

// Enabled transitions visible without a communication partner: internal and
// synchronized-internal steps, outgoing sends, and selection receives (whose
// message space is finite). Value receives are matched via net_receive.
std::vector<NetStep> net_steps(const Location& self, const NetPtr& e,
                               const LocationTable& table);

// Ways for `self` to consume message m arriving from `from`.
std::vector<NetPtr> net_receive(const Location& self, const NetPtr& e,
                                const Location& from, const Msg& m,
                                const LocationTable& table);

using System = std::map<Location, NetPtr>;

struct SystemLabel {
  enum class K { Iota, IotaSync, Comm };
  K k;
  Location loc;   // Iota location / Comm sender
  Msg m;          // Comm payload
  LocSetPtr rho;  // Comm recipients
};
std::string system_label_to_string(const SystemLabel& l);

struct SystemStep {
  SystemLabel label;
  System next;
};

std::vector<SystemStep> system_steps(const System& pi, const LocationTable& table);

bool is_terminal_values(const System& pi);
bool system_equal(const System& a, const System& b);
std::string system_to_string(const System& pi);

enum class NetScheduler { Leftmost, Seeded };

struct SimReport {
  enum class Status { AllValues, Deadlocked, FuelExhausted };
  Status status;
  System final;
  std::vector<SystemStep> trace;
};
SimReport simulate(const System& pi, const LocationTable& table, int fuel,
                   NetScheduler sched, uint32_t seed = 0);

// Reachable-state graph to bounded depth, deduplicated by printed form.
struct ExploreGraph {
  std::vector<System> states;                        // index = state id
  std::vector<std::vector<std::pair<SystemLabel, size_t>>> edges;
  std::vector<size_t> all_values;    // terminal: every location at a value
  std::vector<size_t> deadlocked;    // terminal: no successor, not all values
  std::vector<size_t> frontier;      // depth limit reached, successors untried
};
ExploreGraph explore(const System& pi, const LocationTable& table, int depth);

}  // namespace qc
