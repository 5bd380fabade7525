#pragma once

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "crel/core.hpp"

namespace crel::fol {

// ---------------------------------------------------------------- formulas

struct Term {
  bool is_const = false;  // the only constant is `zero`
  std::string name;
  bool operator==(const Term&) const = default;
};
Term var(std::string name);
Term zero();

struct Formula;
using F = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { atom, negation, conj, disj, imp, forall, exists };
  Kind kind = Kind::atom;
  std::string pred;           // atom
  std::vector<Term> args;     // atom
  std::vector<F> kids;        // negation: 1, conj/disj: n, imp: 2, quantifiers: 1
  std::vector<std::string> vars;  // quantifiers
};

bool equal(const F& a, const F& b);

F atom(std::string pred, std::vector<Term> args);
F neg(F a);
F conj(std::vector<F> kids);  // flattening is not applied; one kid returns the kid
F disj(std::vector<F> kids);
F imp(F a, F b);
F forall(std::vector<std::string> vars, F body);  // empty vars returns body
F exists(std::vector<std::string> vars, F body);

std::set<std::string> free_vars(const F& f);
bool is_closed(const F& f);
std::size_t count_atoms(const F& f, const std::string& pred);

// fixed signature; Q predicates are "q_<state>"
int arity(const std::string& pred);  // -1 when unknown
std::vector<std::string> fixed_predicates();  // c0 c1 h0 h1 p s z l e
std::string state_pred(const std::string& state);

struct Named {
  std::string name;
  F formula;
};

// ---------------------------------------------------------------- machines

enum class TapeId { work = 0, print = 1 };
enum class Move { le, ri, stay };

struct Transition {
  TapeId tape = TapeId::work;
  std::string from;
  int read = 0;
  int write = 0;
  Move move = Move::stay;
  std::string to;
  bool operator==(const Transition&) const = default;
};

struct NDTM {
  std::string name;
  std::vector<std::string> states;  // states[0] is q0
  std::string pr, nd, re;
  std::set<std::string> cleaning;
  std::vector<Transition> transitions;

  const std::string& q0() const { return states.front(); }
  bool is_special(const std::string& s) const { return s == pr || s == nd || s == re; }
};

// throws malformed_machine
void validate(const NDTM& m);
NDTM machine_from_json(const nlohmann::json& j);
nlohmann::json machine_to_json(const NDTM& m);

struct Config {
  std::string state;
  std::set<Nat> work, print;  // marked cells, 1-based
  Nat h0 = 1, h1 = 1;
  Nat t = 0, b = 0;
  Nat u = 0;   // initial input
  Nat nz = 0;  // remembered print value during cleaning
  auto operator<=>(const Config&) const = default;
};

Config initial_config(Nat x);

struct Trace {
  Nat x = 0;
  std::vector<Config> steps;  // steps[0] is the start
  std::optional<Nat> restart_y;  // if set, steps.back() is the restarted config
  // index r of the restarted configuration
  Nat restart_index() const { return steps.size() - 1; }
};

struct Reachability {
  std::map<Nat, Trace> reached;  // y -> shortest witnessing trace
  bool exhausted = false;        // a budget ran out; results are partial
  Nat configs_explored = 0;
};

Reachability simulate(const NDTM& m, Nat x, Nat step_budget, Nat branch_budget);

// ---------------------------------------------------------------- encoding

std::vector<Named> nat_axioms(const std::vector<std::string>& states);
std::vector<Named> tra_axioms(const NDTM& m);
F conf_formula(Nat x);
F reduce_formula(const NDTM& m, Nat x);  // NAT and TRA and CONF(x)
std::vector<Named> reduce_named(const NDTM& m, Nat x);

// HIST(x,t); at the restart index this is NAT and TRA and CONF(y)
F hist_formula(const NDTM& m, const Trace& tr, Nat t);
// the existential block alone (no NAT/TRA)
F hist_block(const Config& c);

// ---------------------------------------------------------------- checking

struct GroundAtom {
  std::string pred;
  std::vector<Nat> args;
  auto operator<=>(const GroundAtom&) const = default;
};
std::string to_string(const GroundAtom& a);

// machine atoms of an existential conjunction, with successor chains solved
// from `zero`; universally quantified conjuncts are skipped
std::set<GroundAtom> ground_atoms(const F& f);
std::set<GroundAtom> config_atoms(const Config& c);

// NAT 1-12 in the standard model on [0,d]; successor existence is relativized
// to elements below d
bool nat_holds_on(Nat d);

struct CheckVerdict {
  bool ok = true;
  std::optional<GroundAtom> missing;
  std::size_t derived = 0;
};

// derive the configuration at t+1 from the configurations at 0..t by forward
// chaining the TRA clauses over [0,domain_bound]
CheckVerdict ground_check(const NDTM& m, const Trace& tr, Nat t, Nat domain_bound,
                          std::size_t fact_cap = 2000000);
Nat trace_domain_bound(const Trace& tr, Nat upto);  // max index + 2

}  // namespace crel::fol
