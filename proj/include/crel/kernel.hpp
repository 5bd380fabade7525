#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "crel/core.hpp"

namespace crel {

struct KernelContext {
  std::shared_ptr<const Pi1Approximation> approx;  // pi1-equivalence mode
};

KernelContext make_kernel_context(ProgramTable complement, Nat step_budget);

struct KernelEval {
  Nat value = 0;
  Nat steps = 0;  // enumerator steps of every window consulted
};

KernelEval kernel_f_counted(const KernelContext& ctx, Nat x, Nat n);
inline Nat kernel_f(const KernelContext& ctx, Nat x, Nat n) { return kernel_f_counted(ctx, x, n).value; }

bool kernel_equiv(const KernelContext& ctx, Nat x, Nat y, Nat big_n);
std::set<Nat> least_elements(const KernelContext& ctx, Nat bound);

// h(k): cost of evaluating f on every pair of [0,k]^2 in lexicographic order,
// so h is nondecreasing by construction.
Nat step_count_h(const KernelContext& ctx, Nat k);
// h(k) if it does not exceed `limit`, otherwise nullopt (stops early)
std::optional<Nat> step_count_h_bounded(const KernelContext& ctx, Nat k, Nat limit);
std::string pad_p(const KernelContext& ctx, Nat x);
Nat padded_g(const KernelContext& ctx, const std::string& a, const std::string& b);

struct FreshRecord {
  Nat n = 0;
  Nat stage = 0;
  Nat source = 0;  // the i whose row of P_t decided where n went
};

struct StageFamily {
  Nat stages_run = 0;  // stages 0..stages_run-1 were executed
  std::vector<std::set<Nat>> sets;
  Nat next_fresh = 0;
  std::vector<FreshRecord> fresh;
};

// P must be a pi1-preorder approximation
StageFamily run_stages(const Pi1Approximation& p, Nat last_stage);
Nat stage_bound(Nat i, Nat n);  // max{ceil(sqrt(2n)), i}
bool a_member(const Pi1Approximation& p, Nat i, Nat n);
// h for the preorder construction: steps needed to settle P_n
Nat preorder_h(const Pi1Approximation& p, Nat n);
bool x_member(const Pi1Approximation& p, Nat i, const std::string& s);
std::string x_string(const Pi1Approximation& p, Nat n);  // 1^n 0^{h(n)}

}  // namespace crel
