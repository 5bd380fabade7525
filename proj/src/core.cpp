#include "crel/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace crel {

Nat pair(Nat x, Nat y) {
  Nat s = x + y;
  return s * (s + 1) / 2 + y;
}

std::pair<Nat, Nat> unpair(Nat c) {
  // largest w with w(w+1)/2 <= c
  Nat w = static_cast<Nat>((std::sqrt(8.0L * static_cast<long double>(c) + 1.0L) - 1.0L) / 2.0L);
  while (w * (w + 1) / 2 > c) --w;
  while ((w + 1) * (w + 2) / 2 <= c) ++w;
  Nat y = c - w * (w + 1) / 2;
  return {w - y, y};
}

namespace {

bool divides(Nat x, Nat y) {
  if (x == 0) return y == 0;
  return y % x == 0;
}

Nat class_label(const std::vector<Nat>& labels, Nat x) {
  // elements past the label list are singletons
  if (x < labels.size()) return labels[x];
  return (Nat{1} << 62) + x;
}

}  // namespace

std::optional<bool> named_predicate(const std::string& name, const std::vector<Nat>& params,
                                    Nat x, Nat y) {
  if (name == "empty") return false;
  if (name == "all") return true;
  if (name == "eq") return x == y;
  if (name == "leq" || name == "slow-leq") return x <= y;
  if (name == "lt") return x < y;
  if (name == "divides") return divides(x, y);
  if (name == "id-mod") {
    Nat n = params.empty() ? 1 : params[0];
    if (n == 0) return x == y;
    return x % n == y % n;
  }
  if (name == "classes") return class_label(params, x) == class_label(params, y);
  return std::nullopt;
}

bool known_predicate(const std::string& name) {
  return named_predicate(name, {}, 0, 0).has_value();
}

ProgramTable ProgramTable::explicit_list(std::vector<Edge> pairs) {
  ProgramTable p;
  p.kind_ = Kind::explicit_list;
  p.name_ = "explicit";
  p.pairs_ = std::move(pairs);
  return p;
}

ProgramTable ProgramTable::builtin(std::string name, std::vector<Nat> params) {
  std::string base = name.rfind("co-", 0) == 0 ? name.substr(3) : name;
  if (!known_predicate(base)) throw Error(Errc::bad_input, "unknown builtin " + name);
  ProgramTable p;
  p.kind_ = Kind::builtin;
  p.name_ = std::move(name);
  p.params_ = std::move(params);
  return p;
}

ProgramTable ProgramTable::decider(std::string name, std::vector<Nat> params) {
  if (!known_predicate(name)) throw Error(Errc::bad_input, "unknown decider " + name);
  ProgramTable p;
  p.kind_ = Kind::decider;
  p.name_ = std::move(name);
  p.params_ = std::move(params);
  return p;
}

ProgramTable ProgramTable::decider_table(std::vector<Edge> accepted) {
  ProgramTable p;
  p.kind_ = Kind::decider;
  p.name_ = "table";
  std::sort(accepted.begin(), accepted.end());
  p.pairs_ = std::move(accepted);
  return p;
}

std::optional<Edge> ProgramTable::emit(Nat step) const {
  switch (kind_) {
    case Kind::explicit_list:
      if (step < pairs_.size()) return pairs_[step];
      return std::nullopt;
    case Kind::builtin: {
      auto [x, y] = unpair(step);
      bool co = name_.rfind("co-", 0) == 0;
      bool in = *named_predicate(co ? name_.substr(3) : name_, params_, x, y);
      if (in != co) return Edge{x, y};
      return std::nullopt;
    }
    case Kind::decider:
      throw Error(Errc::precondition_violated, "decider used as enumerator");
  }
  return std::nullopt;
}

std::optional<Decision> ProgramTable::decide(Nat x, Nat y, Nat budget) const {
  if (kind_ != Kind::decider) throw Error(Errc::precondition_violated, "enumerator used as decider");
  Nat steps = 1;
  bool acc = false;
  if (name_ == "table") {
    acc = std::binary_search(pairs_.begin(), pairs_.end(), Edge{x, y});
  } else {
    acc = *named_predicate(name_, params_, x, y);
    if (name_ == "divides") {
      steps = 1 + y;
    } else if (name_ == "slow-leq") {
      Nat e = std::min<Nat>(x + y, 62);
      steps = Nat{1} << e;
    } else if (name_ != "all" && name_ != "empty") {
      steps = 1 + std::min(x, y);
    }
  }
  if (steps > budget) return std::nullopt;
  return Decision{acc, steps};
}

RelationWindow::RelationWindow(Nat t) : t_(t), m_((t + 1) * (t + 1), 0) { refresh(); }

RelationWindow RelationWindow::from_predicate(Nat t, const std::function<bool(Nat, Nat)>& p) {
  RelationWindow w(t);
  for (Nat x = 0; x <= t; ++x)
    for (Nat y = 0; y <= t; ++y) w.m_[x * (t + 1) + y] = p(x, y) ? 1 : 0;
  w.refresh();
  return w;
}

void RelationWindow::refresh() {
  const Nat n = t_ + 1;
  refl_ = sym_ = trans_ = true;
  for (Nat x = 0; x < n; ++x) {
    if (!at(x, x)) refl_ = false;
    for (Nat y = 0; y < n; ++y)
      if (at(x, y) && !at(y, x)) sym_ = false;
  }
  for (Nat x = 0; x < n && trans_; ++x)
    for (Nat y = 0; y < n && trans_; ++y) {
      if (!at(x, y)) continue;
      for (Nat z = 0; z < n; ++z)
        if (at(y, z) && !at(x, z)) {
          trans_ = false;
          break;
        }
    }
}

RelationWindow RelationWindow::restrict_to(Nat t) const {
  if (t > t_) throw Error(Errc::precondition_violated, "restriction beyond window");
  return from_predicate(t, [&](Nat x, Nat y) { return at(x, y); });
}

bool RelationWindow::subset_of(const RelationWindow& o) const {
  Nat t = std::min(t_, o.t_);
  for (Nat x = 0; x <= t; ++x)
    for (Nat y = 0; y <= t; ++y)
      if (at(x, y) && !o.at(x, y)) return false;
  return true;
}

std::vector<Edge> RelationWindow::edges() const {
  std::vector<Edge> out;
  for (Nat x = 0; x <= t_; ++x)
    for (Nat y = 0; y <= t_; ++y)
      if (at(x, y)) out.push_back({x, y});
  return out;
}

Nat RelationWindow::class_min(Nat x) const {
  for (Nat z = 0; z < x; ++z)
    if (at(x, z) && at(z, x)) return z;
  return x;
}

Pi1Approximation::Pi1Approximation(ApproxSequence seq, Nat step_budget)
    : seq_(std::move(seq)), budget_(step_budget) {
  if (seq_.mode == Mode::sigma1) throw Error(Errc::precondition_violated, "sequence not in pi1 mode");
}

void Pi1Approximation::advance_to(Nat steps) const {
  while (steps_done_ < steps) {
    if (steps_done_ >= budget_) throw Error(Errc::budget_exhausted, "complement enumeration budget");
    if (auto e = seq_.source.emit(steps_done_)) emitted_.push_back(*e);
    ++steps_done_;
  }
}

const SettledWindow& Pi1Approximation::window(Nat t) const {
  std::lock_guard<std::mutex> lock(mu_);
  while (cache_.size() <= t) {
    const Nat cur = cache_.size();
    Nat start = pair(cur, cur) + 1;
    if (!cache_.empty()) start = std::max(start, cache_.back().steps);
    if (start > budget_) throw Error(Errc::budget_exhausted, "window " + std::to_string(cur));
    advance_to(start);
    const bool preorder = seq_.mode == Mode::pi1_preorder;
    for (;;) {
      std::vector<char> removed((cur + 1) * (cur + 1), 0);
      for (const auto& e : emitted_)
        if (e.x <= cur && e.y <= cur) removed[e.x * (cur + 1) + e.y] = 1;
      auto w = RelationWindow::from_predicate(cur, [&](Nat x, Nat y) { return !removed[x * (cur + 1) + y]; });
      if (preorder ? w.is_preorder() : w.is_equivalence()) {
        cache_.push_back({std::move(w), steps_done_});
        break;
      }
      // only a new pair inside the window can change the verdict
      std::size_t before = emitted_.size();
      for (;;) {
        advance_to(steps_done_ + 1);
        if (emitted_.size() > before) {
          const auto& e = emitted_.back();
          if (e.x <= cur && e.y <= cur) break;
          before = emitted_.size();
        }
      }
    }
  }
  return cache_[t];
}

SettledWindow pi1_window(const ApproxSequence& seq, Nat t, Nat step_budget) {
  Pi1Approximation a(seq, step_budget);
  return a.window(t);
}

RelationWindow close_edges(const std::vector<Edge>& edges, Nat t, ClosureMode mode) {
  // compress the support: the window plus every endpoint that occurs
  std::set<Nat> support;
  for (Nat x = 0; x <= t; ++x) support.insert(x);
  for (const auto& e : edges) {
    support.insert(e.x);
    support.insert(e.y);
  }
  std::vector<Nat> nodes(support.begin(), support.end());
  const std::size_t n = nodes.size();
  auto idx = [&](Nat v) {
    return static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), v) - nodes.begin());
  };
  std::vector<char> m(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) m[i * n + i] = 1;
  for (const auto& e : edges) {
    m[idx(e.x) * n + idx(e.y)] = 1;
    if (mode == ClosureMode::equivalence) m[idx(e.y) * n + idx(e.x)] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (m[i * n + k])
        for (std::size_t j = 0; j < n; ++j)
          if (m[k * n + j]) m[i * n + j] = 1;
  // nodes[0..t] are exactly 0..t
  return RelationWindow::from_predicate(t, [&](Nat x, Nat y) { return m[x * n + y] != 0; });
}

RelationWindow closure_sigma1(const ProgramTable& source, Nat t, Nat steps, ClosureMode mode) {
  std::vector<Edge> got;
  for (Nat s = 0; s < steps; ++s)
    if (auto e = source.emit(s)) got.push_back(*e);
  return close_edges(got, t, mode);
}

RelationWindow symmetric_fragment(const RelationWindow& w) {
  if (!w.is_preorder()) throw Error(Errc::precondition_violated, "window is not a preorder");
  return RelationWindow::from_predicate(w.bound(), [&](Nat x, Nat y) { return w.at(x, y) && w.at(y, x); });
}

const ProgramTable& Registry::get(Nat id) const {
  auto it = programs_.find(id);
  if (it == programs_.end()) throw Error(Errc::unregistered_program, std::to_string(id));
  return it->second;
}

std::vector<Nat> Registry::ids() const {
  std::vector<Nat> out;
  for (const auto& [k, v] : programs_) out.push_back(k);
  return out;
}

Sigma1Answer universal_sigma1_member(const Registry& reg, Nat a, Nat b, Nat steps) {
  auto [x, e] = unpair(a);
  auto [y, i] = unpair(b);
  const ProgramTable& p = reg.get(e);
  reg.get(i);
  if (e != i) return Sigma1Answer::not_yet;
  auto w = closure_sigma1(p, std::max(x, y), steps, ClosureMode::equivalence);
  return w.at(x, y) ? Sigma1Answer::yes : Sigma1Answer::not_yet;
}

RelationWindow id_n(std::optional<Nat> n, Nat t) {
  if (n && *n == 0) throw Error(Errc::precondition_violated, "Id(0)");
  return RelationWindow::from_predicate(t, [&](Nat x, Nat y) { return n ? x % *n == y % *n : x == y; });
}

RelationWindow r_a(const std::function<bool(Nat)>& in_a, Nat t) {
  std::vector<char> mem(t + 1);
  for (Nat x = 0; x <= t; ++x) mem[x] = in_a(x) ? 1 : 0;
  return RelationWindow::from_predicate(t, [&](Nat x, Nat y) { return x == y || (mem[x] && mem[y]); });
}

bool delta1_leq(const Registry& reg, const Delta1Triple& a, const Delta1Triple& b) {
  if (a == b) return true;
  const ProgramTable& da = reg.get(a.e);
  reg.get(b.e);
  if (a.e != b.e) return false;
  if (da.kind() != ProgramTable::Kind::decider)
    throw Error(Errc::precondition_violated, "program is not a decider");
  auto halts_within = [&](Nat x, Nat t) {
    for (Nat i = 0; i <= x; ++i)
      for (Nat j = 0; j <= x; ++j)
        if (!da.decide(i, j, t)) return false;
    return true;
  };
  if (!halts_within(a.x, a.t) || !halts_within(b.x, b.t)) return false;
  // every pair of [0,max]^2 lies in the larger of the two checked squares
  const Nat m = std::max(a.x, b.x);
  const Nat budget = a.x > b.x ? a.t : (b.x > a.x ? b.t : std::max(a.t, b.t));
  auto w = RelationWindow::from_predicate(m, [&](Nat i, Nat j) { return da.decide(i, j, budget)->accepted; });
  if (!w.is_preorder()) return false;
  return w.at(a.x, b.x);
}

Delta1Triple reduce_to_delta1(const Registry& reg, Nat e, Nat x, Nat budget) {
  const ProgramTable& d = reg.get(e);
  Nat t = 0;
  for (Nat i = 0; i <= x; ++i)
    for (Nat j = 0; j <= x; ++j) {
      auto r = d.decide(i, j, budget);
      if (!r) throw Error(Errc::decider_diverges, "pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
      t = std::max(t, r->steps);
    }
  return {x, e, t};
}

}  // namespace crel
