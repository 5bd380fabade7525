#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "crel/core.hpp"

namespace crel::diag {

inline Nat x_of(Nat e) { return 3 * e + 1; }
inline Nat y_of(Nat e) { return 3 * e + 2; }

struct PhiResult {
  Nat value;
  Nat steps;  // converges after this many micro-steps
};
using Phi = std::function<std::optional<PhiResult>(Nat)>;
// does an element enter V[a,b] at enumeration step `clock` (1-based)?
using VScript = std::function<bool(Nat a, Nat b, Nat clock)>;

struct Family {
  std::vector<Phi> phi;  // phi[e]
  VScript v;
};

// {"machines":[{"values":{"1":{"value":10,"steps":2}},"otherwise":{"kind":"affine","mul":1,"add":0,"steps":1}|{"kind":"diverge"}}],
//  "v":{"default":{"kind":"eq"|"never"|"every","n":3|"at","steps":[..]|"until","k":5},"pairs":[{"a":10,"b":11,"kind":...}]}}
Family family_from_json(const nlohmann::json& j);

enum class Phase { waiting, ended, step3, step4, restarted };
const char* phase_name(Phase p);

struct Instance {
  Nat e = 0, x = 0, y = 0, z = 0;
  Phase phase = Phase::waiting;
  Nat waited = 0;
  Nat fx = 0, fy = 0, fz = 0;
  Nat clock_xy = 0, clock_xz = 0, clock_yz = 0;
};

struct Event {
  Nat step = 0;  // global micro-step, 1-based
  Nat e = 0, z = 0;
  std::string kind;  // add | comp | phase | v
  Nat a = 0, b = 0;  // add/comp: the U pair; v: the V pair
  std::string role;  // v: xy | xz | yz
  Phase from = Phase::waiting, to = Phase::waiting;
};

using Pair = std::pair<Nat, Nat>;  // always first < second
Pair upair(Nat a, Nat b);

struct UFamily {
  bool delta2 = false;
  Nat steps = 0;
  std::map<Pair, Nat> u;         // additions to U_xy
  std::map<Pair, Nat> last_add;  // global step of the latest addition
  // delta2: element indices per pair, split between U and its complement
  std::map<Pair, std::set<Nat>> u_elems, comp_elems;
  std::map<Pair, Nat> next_elem;
  std::set<Pair> closed;  // "all remaining numbers" went to the complement
  std::vector<Event> log;
  std::vector<Instance> instances;  // every instance ever started, in order

  Nat count(Nat a, Nat b) const;  // U_xx is total; reported as the maximum
};

UFamily dovetail(const Family& f, Nat global_budget);
UFamily run_delta2(const Family& f, Nat global_budget);
// machine e alone, starting on z; restarts draw from the pool after z
UFamily run_subroutine(Nat e, Nat z, const Family& f, Nat budget);

struct Report {
  bool ok() const { return violations.empty(); }
  std::vector<std::string> violations;
  std::set<Pair> growing;
};
// growing: for each instance not restarted, its latest addition inside the last `window` steps
Report invariant_report(const UFamily& u, Nat window);
// each touched pair: U and complement indices are disjoint and cover [0,n),
// closed pairs cover [0,horizon)
std::vector<std::string> partition_violations(const UFamily& u, Nat horizon);

nlohmann::json to_json(const Report& r);
nlohmann::json to_json(const Event& e);
nlohmann::json summary_json(const UFamily& u);

}  // namespace crel::diag
