#pragma once

#include <array>
#include <compare>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "crel/core.hpp"

namespace crel::sigma2 {

using BigInt = boost::multiprecision::cpp_int;

// ---------------------------------------------------------------- V machines

using RPredicate = std::function<bool(Nat v, Nat u, Nat x, Nat y)>;

// {"kind":"always"|"never"|"x_le_y"|"v_ge","k":3|"v_ge_x"|"u_lt_v"}
RPredicate r_predicate_from_json(const nlohmann::json& j);

struct VMachine {
  Nat x = 0, y = 0;
  std::vector<Nat> printed;      // printed v values, in order
  std::vector<Nat> entry_steps;  // element k entered at entry_steps[k]; element 0 is the seed at step 0
  Nat steps = 0;                 // R evaluations performed
  bool stalled = false;          // nothing printed during the last half of the budget
};

// one evaluation of R per step
VMachine v_enumerate(const RPredicate& r, Nat x, Nat y, Nat step_budget);

struct VFamily {
  // step at which element e of V_xy enters, if it does so by `horizon`
  std::function<std::optional<Nat>(Nat x, Nat y, Nat e, Nat horizon)> entry_step;
};
VFamily family_from_predicate(RPredicate r);
VFamily explicit_family(std::map<std::pair<Nat, Nat>, std::vector<Nat>> steps);
VFamily empty_family();
// {"kind":"empty"} | {"kind":"predicate","pred":{...}} | {"kind":"explicit","entries":[{"x":0,"y":1,"steps":[0,4]}]}
VFamily family_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------- strings

class RleString {
public:
  struct Block {
    bool bit;
    BigInt len;
    bool operator==(const Block&) const = default;
  };

  RleString() = default;
  static RleString zeros(const BigInt& n) { return RleString().append(false, n); }
  static RleString from_bits(const std::string& s);

  RleString& append(bool bit, const BigInt& n);
  BigInt length() const;
  const std::vector<Block>& blocks() const { return blocks_; }
  // throws precondition_violated past `cap` symbols
  std::string materialize(std::size_t cap = 4096) const;
  bool all_zeros() const { return blocks_.empty() || (blocks_.size() == 1 && !blocks_[0].bit); }

  bool operator==(const RleString&) const = default;
  // shorter first, then lexicographic with 0 < 1
  std::strong_ordering operator<=>(const RleString& o) const;

private:
  std::vector<Block> blocks_;
};

// ---------------------------------------------------------------- tower and stages

BigInt tower(Nat n);  // g(0)=1, g(n+1)=2^g(n); n <= 4
using Tuple = std::array<Nat, 4>;  // (x, y, r, e)
Tuple stage_tuple(Nat n);          // <x,<y,<r,e>>>
Nat tuple_stage(const Tuple& t);
bool tuple_fits(const Tuple& t, const BigInt& m);  // every component <= m
bool stage_valid(Nat n);                           // tuple_fits(stage_tuple(n), g(n))

struct Polynomial {
  std::vector<BigInt> coeffs;  // constant term first
  BigInt operator()(const BigInt& m) const;
  Polynomial operator+(const Polynomial& o) const;
  bool operator==(const Polynomial&) const = default;
};
std::string to_string(const Polynomial& p);

struct SuffixEntry {
  Tuple tuple{};
  Polynomial q;
  Nat x() const { return tuple[0]; }
  Nat y() const { return tuple[1]; }
};
// g of the entry's own stage: both the length of the 1-block and the least |w| it codes
BigInt code_length(const SuffixEntry& e);

using SuffixTable = std::map<std::pair<Nat, Nat>, SuffixEntry>;

struct SuffixResult {
  std::vector<std::pair<Nat, RleString>> coded;  // (destination set, string)
  std::vector<std::pair<Nat, Nat>> cut;          // hops dropped because they revisit a set
};
// every chain from x; throws cycle_detected unless cut_cycles
SuffixResult apply_suffix(const SuffixTable& table, Nat x, const RleString& w, bool cut_cycles = false);

// ---------------------------------------------------------------- construction

using Oracle = std::function<bool(const RleString&)>;
struct OracleMachine {
  std::string name;
  Polynomial clock;
  // must only query strings of length <= clock(|w|)
  std::function<bool(const Oracle&, const RleString&)> run;
};
// reject, accept, echo (accepts iff w is in the oracle)
std::vector<OracleMachine> standard_oracles();

struct Requirement {
  Nat x = 0, y = 0, e = 0, stage = 0;
  RleString w;
  bool a_x = false;      // value assigned to A_x(w)
  bool machine = false;  // M_e(A_y; w) at declaration
};

struct StageRecord {
  Nat n = 0;
  BigInt g;
  Tuple tuple{};
  std::string action;  // invalid | no-trigger | clock-too-slow | short-coding | declared
  bool table_updated = false;
  std::vector<std::string> notes;
  std::optional<Requirement> declared;
};

struct Sigma2Run {
  std::vector<StageRecord> log;
  SuffixTable table;
  std::map<Nat, std::set<RleString>> sets;  // A-set fragments
  std::vector<std::pair<Nat, RleString>> placed;  // strings placed by diagonalization
  std::vector<Requirement> declared;
};

Sigma2Run run_sigma2(const VFamily& v, Nat max_stage, const std::vector<OracleMachine>& registry);
// each declared inequality against the final fragments; returns the failures
std::vector<Requirement> recheck(const Sigma2Run& run, const std::vector<OracleMachine>& registry);

// the three-case reduction for the entry's stage
RleString reduction_fn(const SuffixEntry& entry, const RleString& w, const std::set<RleString>& a_x,
                       const std::set<RleString>& a_y);

nlohmann::json to_json(const StageRecord& r);
nlohmann::json to_json(const RleString& s);

}  // namespace crel::sigma2
