#include "crel/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace crel {

KernelContext make_kernel_context(ProgramTable complement, Nat step_budget) {
  ApproxSequence seq{std::move(complement), Mode::pi1_equivalence};
  return KernelContext{std::make_shared<const Pi1Approximation>(std::move(seq), step_budget)};
}

KernelEval kernel_f_counted(const KernelContext& ctx, Nat x, Nat n) {
  KernelEval ev;
  Nat cur = x;
  for (;;) {
    const auto& sw = ctx.approx->window(std::max(cur, n));
    ev.steps += sw.steps;
    Nat z = sw.window.class_min(cur);
    if (z >= cur) break;
    cur = z;
  }
  ev.value = cur;
  return ev;
}

bool kernel_equiv(const KernelContext& ctx, Nat x, Nat y, Nat big_n) {
  for (Nat n = 0; n <= big_n; ++n)
    if (kernel_f(ctx, x, n) != kernel_f(ctx, y, n)) return false;
  return true;
}

std::set<Nat> least_elements(const KernelContext& ctx, Nat bound) {
  std::set<Nat> out;
  for (Nat x = 0; x <= bound; ++x)
    for (Nat n = x; n <= bound; ++n)
      if (kernel_f(ctx, x, n) == x) {
        out.insert(x);
        break;
      }
  return out;
}

std::optional<Nat> step_count_h_bounded(const KernelContext& ctx, Nat k, Nat limit) {
  // every evaluation costs at least one step
  if ((k + 1) * (k + 1) > limit) return std::nullopt;
  Nat total = 0;
  for (Nat a = 0; a <= k; ++a)
    for (Nat b = 0; b <= k; ++b) {
      total += kernel_f_counted(ctx, a, b).steps;
      if (total > limit) return std::nullopt;
    }
  return total;
}

Nat step_count_h(const KernelContext& ctx, Nat k) {
  return *step_count_h_bounded(ctx, k, ~Nat{0} >> 1);
}

std::string pad_p(const KernelContext& ctx, Nat x) {
  return std::string(x, '1') + "0" + std::string(step_count_h(ctx, x), '1');
}

namespace {

// a = 1^x 0 1^m with m = h(x)
std::optional<Nat> decode_p(const KernelContext& ctx, const std::string& a) {
  auto zero = a.find('0');
  if (zero == std::string::npos) return std::nullopt;
  if (a.find_first_not_of('1', zero + 1) != std::string::npos) return std::nullopt;
  if (a.find_first_not_of('1') != zero) return std::nullopt;
  Nat x = zero;
  Nat m = a.size() - zero - 1;
  auto h = step_count_h_bounded(ctx, x, m);
  if (!h || *h != m) return std::nullopt;
  return x;
}

}  // namespace

Nat padded_g(const KernelContext& ctx, const std::string& a, const std::string& b) {
  auto x = decode_p(ctx, a);
  if (!x) return 0;
  auto n = decode_p(ctx, b);
  if (!n) return 0;
  return kernel_f(ctx, *x, *n);
}

StageFamily run_stages(const Pi1Approximation& p, Nat last_stage) {
  if (p.sequence().mode != Mode::pi1_preorder)
    throw Error(Errc::precondition_violated, "stage construction needs a preorder approximation");
  StageFamily fam;
  fam.sets.resize(last_stage + 1);
  for (Nat t = 0; t <= last_stage; ++t) {
    const RelationWindow& pt = p.window(t).window;
    for (Nat i = 0; i < t; ++i)
      if (pt.at(i, t)) fam.sets[t].insert(fam.sets[i].begin(), fam.sets[i].end());
    // one fresh number per i, shared by every k with P_t(i,k)
    for (Nat i = 0; i <= t; ++i) {
      Nat n = fam.next_fresh++;
      fam.fresh.push_back({n, t, i});
      for (Nat k = 0; k <= t; ++k)
        if (pt.at(i, k)) fam.sets[k].insert(n);
    }
    fam.stages_run = t + 1;
  }
  return fam;
}

Nat stage_bound(Nat i, Nat n) {
  Nat r = static_cast<Nat>(std::sqrt(2.0L * static_cast<long double>(n)));
  while (r * r < 2 * n) ++r;
  while (r > 0 && (r - 1) * (r - 1) >= 2 * n) --r;
  return std::max(r, i);
}

bool a_member(const Pi1Approximation& p, Nat i, Nat n) {
  auto fam = run_stages(p, stage_bound(i, n));
  return i < fam.sets.size() && fam.sets[i].count(n) != 0;
}

Nat preorder_h(const Pi1Approximation& p, Nat n) { return p.window(n).steps; }

bool x_member(const Pi1Approximation& p, Nat i, const std::string& s) {
  auto first0 = s.find('0');
  Nat n = first0 == std::string::npos ? s.size() : first0;
  if (s.find('1', n) != std::string::npos) return false;
  Nat k = s.size() - n;
  // the settling step of P_n is at least <n,n>+1
  if (k < pair(n, n) + 1) return false;
  if (k != preorder_h(p, n)) return false;
  return a_member(p, i, n);
}

std::string x_string(const Pi1Approximation& p, Nat n) {
  return std::string(n, '1') + std::string(preorder_h(p, n), '0');
}

}  // namespace crel
