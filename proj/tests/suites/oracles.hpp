#pragma once

// Brute-force reference implementations. Each one is written independently of
// the library algorithm it checks and trades speed for obviousness.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "crel/core.hpp"
#include "crel/trees.hpp"
#include "crel/qgroup.hpp"
#include "crel/sigma2.hpp"

namespace crel::oracle {

using Matrix = std::vector<std::vector<bool>>;

// ---- core ----
Nat cantor_pair_by_walk(Nat x, Nat y);  // walks the diagonals
Matrix closure_fixpoint(const std::vector<Edge>& edges, Nat t, bool symmetric);
bool is_equivalence(const Matrix& m);
bool is_preorder(const Matrix& m);
Matrix to_matrix(const RelationWindow& w);

struct NaiveSettle {
  Matrix window;
  Nat steps = 0;
};
// re-enumerates the complement from step 0 for every candidate step count;
// nullopt when the budget runs out
std::optional<NaiveSettle> naive_settle(const ProgramTable& complement, bool preorder, Nat t,
                                        Nat budget);
std::vector<Nat> class_minima(const Matrix& m);
Nat class_min(const Matrix& m, Nat x);

// ---- kernel / stages ----
struct NaiveStages {
  std::vector<std::set<Nat>> sets;
  std::vector<Nat> fresh_order;
};
// stage construction over explicitly supplied preorder windows P_0..P_T
NaiveStages naive_stages(const std::vector<Matrix>& p_windows);

// ---- trees ----
// parent[0] = -1 for the root
using ParentArray = std::vector<int>;
// every unordered rooted tree with exactly n nodes, each once (built from
// multisets of smaller subtrees, no canonical codes involved)
std::vector<ParentArray> rooted_trees(int n);
std::vector<ParentArray> rooted_trees_up_to(int n);
FiniteTree to_tree(const ParentArray& p);
ParentArray to_parents(const FiniteTree& t);
bool brute_iso(const ParentArray& a, const ParentArray& b);
// root-fixing, injective, parent-preserving injection search
bool brute_embed(const ParentArray& a, const ParentArray& b);

// ---- subgroups ----
// prime powers p^k, p <= prime_bound, k <= k_bound, lying in S(a) but not S(b)
std::size_t missing_prime_powers(const PrimePowerProfile& a, const PrimePowerProfile& b, Nat prime_bound,
                                 unsigned k_bound);
// finiteness read off from growth: the count must not change between k bounds
bool finite_difference(const PrimePowerProfile& a, const PrimePowerProfile& b);
bool member_by_factoring(const PrimePowerProfile& a, const Rational& q);

// ---- sigma2 ----
// exists v <= vmax, forall u <= umax
bool sigma2_truth(const sigma2::RPredicate& r, Nat x, Nat y, Nat vmax, Nat umax);
// replays the stage log: tower values, tuple decoding, trigger-gated table
// updates, final table contents, declared witnesses and their inequalities
std::vector<std::string> sigma2_log_violations(const sigma2::Sigma2Run& run, const sigma2::VFamily& v,
                                               const std::vector<sigma2::OracleMachine>& registry);

}  // namespace crel::oracle
