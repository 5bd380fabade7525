#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crel/error.hpp"

namespace crel {

using Nat = std::uint64_t;

// Cantor pairing: (x+y)(x+y+1)/2 + y
Nat pair(Nat x, Nat y);
std::pair<Nat, Nat> unpair(Nat c);

struct Edge {
  Nat x = 0, y = 0;
  auto operator<=>(const Edge&) const = default;
};

struct Decision {
  bool accepted = false;
  Nat steps = 0;
};

// Named binary predicates shared by builtin enumerators and deciders.
// Returns nullopt for an unknown name.
std::optional<bool> named_predicate(const std::string& name, const std::vector<Nat>& params,
                                    Nat x, Nat y);
bool known_predicate(const std::string& name);

class ProgramTable {
public:
  enum class Kind { explicit_list, builtin, decider };

  static ProgramTable explicit_list(std::vector<Edge> pairs);
  // enumerates the pairs satisfying a named predicate in Cantor order;
  // a "co-" prefix enumerates the complement
  static ProgramTable builtin(std::string name, std::vector<Nat> params = {});
  static ProgramTable decider(std::string name, std::vector<Nat> params = {});
  // finite acceptance table, one step per call
  static ProgramTable decider_table(std::vector<Edge> accepted);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const std::vector<Nat>& params() const { return params_; }
  const std::vector<Edge>& pairs() const { return pairs_; }

  // element emitted at global step s, if any
  std::optional<Edge> emit(Nat step) const;
  // nullopt when the run needs more than `budget` steps
  std::optional<Decision> decide(Nat x, Nat y, Nat budget) const;

private:
  Kind kind_ = Kind::explicit_list;
  std::string name_;
  std::vector<Nat> params_;
  std::vector<Edge> pairs_;
};

class RelationWindow {
public:
  RelationWindow() : RelationWindow(0) {}
  explicit RelationWindow(Nat t);  // empty relation on [0,t]
  static RelationWindow from_predicate(Nat t, const std::function<bool(Nat, Nat)>& p);

  Nat bound() const { return t_; }
  bool at(Nat x, Nat y) const { return m_[x * (t_ + 1) + y] != 0; }
  bool reflexive() const { return refl_; }
  bool symmetric() const { return sym_; }
  bool transitive() const { return trans_; }
  bool is_equivalence() const { return refl_ && sym_ && trans_; }
  bool is_preorder() const { return refl_ && trans_; }

  RelationWindow restrict_to(Nat t) const;
  bool subset_of(const RelationWindow& other) const;  // over the common window
  std::vector<Edge> edges() const;
  // least y related to x in both directions (class minimum in an equivalence window)
  Nat class_min(Nat x) const;

  bool operator==(const RelationWindow& o) const { return t_ == o.t_ && m_ == o.m_; }

private:
  void refresh();
  Nat t_;
  std::vector<char> m_;
  bool refl_ = false, sym_ = false, trans_ = false;
};

enum class Mode { pi1_equivalence, pi1_preorder, sigma1 };

struct ApproxSequence {
  ProgramTable source;
  Mode mode = Mode::pi1_equivalence;
};

struct SettledWindow {
  RelationWindow window;
  Nat steps = 0;  // enumerator steps consumed when the window settled
};

// Antitone approximations E_t. Window t is settled at the least step count
// s >= max(<t,t>+1, settle(t-1)) at which the unenumerated part of [0,t]^2
// is an equivalence relation (or preorder).
class Pi1Approximation {
public:
  Pi1Approximation(ApproxSequence seq, Nat step_budget);
  const SettledWindow& window(Nat t) const;
  const ApproxSequence& sequence() const { return seq_; }
  Nat budget() const { return budget_; }

private:
  void advance_to(Nat steps) const;
  ApproxSequence seq_;
  Nat budget_;
  mutable std::mutex mu_;
  mutable std::vector<SettledWindow> cache_;
  mutable std::vector<Edge> emitted_;
  mutable Nat steps_done_ = 0;
};

SettledWindow pi1_window(const ApproxSequence& seq, Nat t, Nat step_budget);

enum class ClosureMode { equivalence, preorder };

RelationWindow closure_sigma1(const ProgramTable& source, Nat t, Nat steps,
                              ClosureMode mode = ClosureMode::equivalence);
// closure of an explicit edge set, restricted to [0,t]^2
RelationWindow close_edges(const std::vector<Edge>& edges, Nat t, ClosureMode mode);

RelationWindow symmetric_fragment(const RelationWindow& w);

class Registry {
public:
  void add(Nat id, ProgramTable p) { programs_.insert_or_assign(id, std::move(p)); }
  const ProgramTable& get(Nat id) const;
  bool has(Nat id) const { return programs_.count(id) != 0; }
  std::vector<Nat> ids() const;

private:
  std::map<Nat, ProgramTable> programs_;
};

enum class Sigma1Answer { yes, not_yet };

Sigma1Answer universal_sigma1_member(const Registry& reg, Nat a, Nat b, Nat steps);
inline Nat universal_sigma1_reduction(Nat e, Nat x) { return pair(x, e); }

template <typename Image>
struct ReductionVerdict {
  bool ok = true;
  std::optional<Edge> counterexample;
};

// A(x,y) <=> B(f(x),f(y)) for all x,y <= t; the first failing pair in
// lexicographic order is reported. B returns nullopt when out of budget.
template <typename Image>
ReductionVerdict<Image> check_reduction(
    const RelationWindow& a,
    const std::function<std::optional<bool>(const Image&, const Image&)>& b,
    const std::function<Image(Nat)>& f, Nat t) {
  if (t > a.bound()) throw Error(Errc::precondition_violated, "window smaller than t");
  std::vector<Image> img;
  img.reserve(t + 1);
  for (Nat x = 0; x <= t; ++x) img.push_back(f(x));
  ReductionVerdict<Image> v;
  for (Nat x = 0; x <= t; ++x)
    for (Nat y = 0; y <= t; ++y) {
      auto r = b(img[x], img[y]);
      if (!r) throw Error(Errc::oracle_budget_exhausted, "oracle gave no answer");
      if (*r != a.at(x, y)) {
        v.ok = false;
        v.counterexample = Edge{x, y};
        return v;
      }
    }
  return v;
}

// Id(n): congruence mod n; nullopt stands for n = infinity (equality)
RelationWindow id_n(std::optional<Nat> n, Nat t);
RelationWindow r_a(const std::function<bool(Nat)>& in_a, Nat t);

struct Delta1Triple {
  Nat x = 0, e = 0, t = 0;
  auto operator<=>(const Delta1Triple&) const = default;
};

bool delta1_leq(const Registry& reg, const Delta1Triple& a, const Delta1Triple& b);
Delta1Triple reduce_to_delta1(const Registry& reg, Nat e, Nat x, Nat budget);

}  // namespace crel
