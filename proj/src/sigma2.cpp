#include "crel/sigma2.hpp"

#include "crel/error.hpp"

namespace crel::sigma2 {

// ---------------------------------------------------------------- V machines

RPredicate r_predicate_from_json(const nlohmann::json& j) {
  const std::string kind = j.value("kind", "");
  if (kind == "always") return [](Nat, Nat, Nat, Nat) { return true; };
  if (kind == "never") return [](Nat, Nat, Nat, Nat) { return false; };
  if (kind == "x_le_y") return [](Nat, Nat, Nat x, Nat y) { return x <= y; };
  if (kind == "v_ge") {
    Nat k = j.at("k").get<Nat>();
    return [k](Nat v, Nat, Nat, Nat) { return v >= k; };
  }
  if (kind == "v_ge_x") return [](Nat v, Nat, Nat x, Nat) { return v >= x; };
  if (kind == "u_lt_v") return [](Nat v, Nat u, Nat, Nat) { return u < v; };
  throw Error(Errc::bad_input, "unknown predicate kind '" + kind + "'");
}

VMachine v_enumerate(const RPredicate& r, Nat x, Nat y, Nat step_budget) {
  VMachine m;
  m.x = x;
  m.y = y;
  m.entry_steps.push_back(0);
  Nat v = 0, u = 0, last = 0;
  for (Nat step = 1; step <= step_budget; ++step) {
    m.steps = step;
    if (r(v, u, x, y)) {
      ++u;
      continue;
    }
    m.printed.push_back(v);
    m.entry_steps.push_back(step);
    last = step;
    ++v;
    u = 0;
  }
  m.stalled = last <= step_budget / 2;
  return m;
}

VFamily family_from_predicate(RPredicate r) {
  return {[r = std::move(r)](Nat x, Nat y, Nat e, Nat horizon) -> std::optional<Nat> {
    auto m = v_enumerate(r, x, y, horizon);
    if (e < m.entry_steps.size()) return m.entry_steps[e];
    return std::nullopt;
  }};
}

VFamily explicit_family(std::map<std::pair<Nat, Nat>, std::vector<Nat>> steps) {
  for (const auto& [k, v] : steps)
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i] <= v[i - 1]) throw Error(Errc::bad_input, "entry steps must increase");
  return {[s = std::move(steps)](Nat x, Nat y, Nat e, Nat horizon) -> std::optional<Nat> {
    auto it = s.find({x, y});
    if (it == s.end() || e >= it->second.size() || it->second[e] > horizon) return std::nullopt;
    return it->second[e];
  }};
}

VFamily empty_family() {
  return {[](Nat, Nat, Nat, Nat) -> std::optional<Nat> { return std::nullopt; }};
}

VFamily family_from_json(const nlohmann::json& j) {
  const std::string kind = j.value("kind", "");
  if (kind == "empty") return empty_family();
  if (kind == "predicate") return family_from_predicate(r_predicate_from_json(j.at("pred")));
  if (kind == "explicit") {
    std::map<std::pair<Nat, Nat>, std::vector<Nat>> steps;
    for (const auto& e : j.at("entries"))
      steps[{e.at("x").get<Nat>(), e.at("y").get<Nat>()}] = e.at("steps").get<std::vector<Nat>>();
    return explicit_family(std::move(steps));
  }
  throw Error(Errc::bad_input, "unknown family kind '" + kind + "'");
}

// ---------------------------------------------------------------- strings

RleString RleString::from_bits(const std::string& s) {
  RleString r;
  for (char c : s) {
    if (c != '0' && c != '1') throw Error(Errc::bad_input, "not a bit string");
    r.append(c == '1', 1);
  }
  return r;
}

RleString& RleString::append(bool bit, const BigInt& n) {
  if (n <= 0) return *this;
  if (!blocks_.empty() && blocks_.back().bit == bit) blocks_.back().len += n;
  else blocks_.push_back({bit, n});
  return *this;
}

BigInt RleString::length() const {
  BigInt n = 0;
  for (const auto& b : blocks_) n += b.len;
  return n;
}

std::string RleString::materialize(std::size_t cap) const {
  if (length() > cap) throw Error(Errc::precondition_violated, "string too long to materialize");
  std::string s;
  for (const auto& b : blocks_) s.append(static_cast<std::size_t>(b.len), b.bit ? '1' : '0');
  return s;
}

std::strong_ordering RleString::operator<=>(const RleString& o) const {
  BigInt la = length(), lb = o.length();
  if (la != lb) return la < lb ? std::strong_ordering::less : std::strong_ordering::greater;
  std::size_t i = 0, j = 0;
  BigInt used_a = 0, used_b = 0;
  while (i < blocks_.size() && j < o.blocks_.size()) {
    const auto &a = blocks_[i], &b = o.blocks_[j];
    if (a.bit != b.bit) return a.bit ? std::strong_ordering::greater : std::strong_ordering::less;
    BigInt ra = a.len - used_a, rb = b.len - used_b;
    BigInt step = ra < rb ? ra : rb;
    used_a += step;
    used_b += step;
    if (used_a == a.len) {
      ++i;
      used_a = 0;
    }
    if (used_b == b.len) {
      ++j;
      used_b = 0;
    }
  }
  return std::strong_ordering::equal;
}

// ---------------------------------------------------------------- tower and stages

BigInt tower(Nat n) {
  if (n > 4) throw Error(Errc::precondition_violated, "g(" + std::to_string(n) + ") is not feasible");
  BigInt g = 1;
  for (Nat i = 0; i < n; ++i) g = BigInt(1) << static_cast<unsigned>(g);
  return g;
}

Tuple stage_tuple(Nat n) {
  auto [x, r1] = unpair(n);
  auto [y, r2] = unpair(r1);
  auto [r, e] = unpair(r2);
  return {x, y, r, e};
}

Nat tuple_stage(const Tuple& t) { return pair(t[0], pair(t[1], pair(t[2], t[3]))); }

bool tuple_fits(const Tuple& t, const BigInt& m) {
  for (Nat c : t)
    if (c > m) return false;
  return true;
}

bool stage_valid(Nat n) {
  // components of stage n are at most n, and g(n) > n; past 4 g is not materialized
  if (n > 4) return true;
  return tuple_fits(stage_tuple(n), tower(n));
}

BigInt Polynomial::operator()(const BigInt& m) const {
  BigInt acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * m + *it;
  return acc;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial r;
  r.coeffs.resize(std::max(coeffs.size(), o.coeffs.size()));
  for (std::size_t i = 0; i < r.coeffs.size(); ++i)
    r.coeffs[i] = (i < coeffs.size() ? coeffs[i] : 0) + (i < o.coeffs.size() ? o.coeffs[i] : 0);
  return r;
}

std::string to_string(const Polynomial& p) {
  std::string s;
  for (std::size_t i = p.coeffs.size(); i-- > 0;) {
    if (p.coeffs[i] == 0) continue;
    if (!s.empty()) s += " + ";
    s += p.coeffs[i].str();
    if (i == 1) s += "m";
    if (i > 1) s += "m^" + std::to_string(i);
  }
  return s.empty() ? "0" : s;
}

BigInt code_length(const SuffixEntry& e) { return tower(tuple_stage(e.tuple)); }

SuffixResult apply_suffix(const SuffixTable& table, Nat x, const RleString& w, bool cut_cycles) {
  SuffixResult out;
  std::set<Nat> path{x};
  std::function<void(Nat, const RleString&)> walk = [&](Nat from, const RleString& s) {
    for (auto it = table.lower_bound({from, 0}); it != table.end() && it->first.first == from; ++it) {
      const auto& entry = it->second;
      BigInt len = code_length(entry);
      BigInt n = s.length();
      if (n < len) continue;  // the entry only codes strings of length >= g(its stage)
      Nat to = it->first.second;
      if (path.count(to)) {
        if (!cut_cycles)
          throw Error(Errc::cycle_detected, "chain from " + std::to_string(x) + " revisits " + std::to_string(to));
        out.cut.emplace_back(from, to);
        continue;
      }
      RleString next = s;
      next.append(true, len).append(false, entry.q(n));
      out.coded.emplace_back(to, next);
      path.insert(to);
      walk(to, next);
      path.erase(to);
    }
  };
  walk(x, w);
  return out;
}

// ---------------------------------------------------------------- construction

std::vector<OracleMachine> standard_oracles() {
  Polynomial id{{0, 1}};
  return {
      {"reject", id, [](const Oracle&, const RleString&) { return false; }},
      {"accept", Polynomial{{1, 1}}, [](const Oracle&, const RleString&) { return true; }},
      {"echo", id, [](const Oracle& a, const RleString& w) { return a(w); }},
  };
}

namespace {

class Construction {
public:
  Construction(const VFamily& v, const std::vector<OracleMachine>& reg) : v_(v), reg_(reg) {}

  Sigma2Run run(Nat max_stage) {
    if (max_stage > 4) throw Error(Errc::precondition_violated, "stages beyond 4 are not feasible");
    for (Nat n = 0; n <= max_stage; ++n) out_.log.push_back(stage(n));
    return std::move(out_);
  }

private:
  void effect_codings(StageRecord& rec) {
    for (const auto& [z, w] : out_.placed) {
      auto res = apply_suffix(out_.table, z, w, true);
      for (auto& [to, s] : res.coded) out_.sets[to].insert(s);
      for (const auto& [a, b] : res.cut)
        rec.notes.push_back("cycle cut at hop " + std::to_string(a) + "->" + std::to_string(b));
    }
  }

  StageRecord stage(Nat n) {
    StageRecord rec;
    rec.n = n;
    rec.g = tower(n);
    rec.tuple = stage_tuple(n);
    const auto [x, y, r, e] = rec.tuple;
    const BigInt m = rec.g;
    if (!stage_valid(n)) {
      rec.action = "invalid";
      return rec;
    }
    auto when = v_.entry_step(x, y, e, r);
    if (!when || *when != r) {
      rec.action = "no-trigger";
      return rec;
    }

    SuffixEntry entry;
    entry.tuple = rec.tuple;
    for (Nat i = 0; i <= e && i < reg_.size(); ++i) entry.q = entry.q + reg_[i].clock;
    out_.table[{x, y}] = entry;
    rec.table_updated = true;
    effect_codings(rec);

    if (e >= reg_.size() || reg_[e].clock(m) > (BigInt(1) << static_cast<unsigned>(m))) {
      rec.action = "clock-too-slow";
      return rec;
    }
    const BigInt bound = reg_[e].clock(m);
    const RleString w = RleString::zeros(m);
    // M_e can query strings up to length clock(m) inclusive
    bool short_string = x == y && m <= bound;
    for (const auto& [to, s] : apply_suffix(out_.table, x, w, true).coded)
      if (to == y && s.length() <= bound) short_string = true;
    if (short_string) {
      rec.action = "short-coding";
      return rec;
    }

    const auto& ay = out_.sets[y];
    Oracle oracle = [&ay](const RleString& s) { return ay.count(s) != 0; };
    Requirement req{x, y, e, n, w, false, reg_[e].run(oracle, w)};
    req.a_x = !req.machine;
    if (req.a_x) {
      out_.placed.emplace_back(x, w);
      out_.sets[x].insert(w);
      effect_codings(rec);
    }
    rec.action = "declared";
    rec.declared = req;
    out_.declared.push_back(req);
    return rec;
  }

  const VFamily& v_;
  const std::vector<OracleMachine>& reg_;
  Sigma2Run out_;
};

}  // namespace

Sigma2Run run_sigma2(const VFamily& v, Nat max_stage, const std::vector<OracleMachine>& registry) {
  return Construction(v, registry).run(max_stage);
}

std::vector<Requirement> recheck(const Sigma2Run& run, const std::vector<OracleMachine>& registry) {
  std::vector<Requirement> bad;
  static const std::set<RleString> none;
  for (const auto& req : run.declared) {
    auto ix = run.sets.find(req.x), iy = run.sets.find(req.y);
    const auto& ax = ix == run.sets.end() ? none : ix->second;
    const auto& ay = iy == run.sets.end() ? none : iy->second;
    Oracle oracle = [&ay](const RleString& s) { return ay.count(s) != 0; };
    if ((ax.count(req.w) != 0) == registry.at(req.e).run(oracle, req.w)) bad.push_back(req);
  }
  return bad;
}

RleString reduction_fn(const SuffixEntry& entry, const RleString& w, const std::set<RleString>& a_x,
                       const std::set<RleString>& a_y) {
  BigInt g = code_length(entry);
  if (w.length() >= g) {
    RleString s = w;
    return s.append(true, g).append(false, entry.q(w.length()));
  }
  if (a_x.count(w)) {
    if (a_y.empty()) throw Error(Errc::short_case_unresolvable, "A_y fragment has no member");
    return *a_y.begin();
  }
  // least string outside a finite fragment, in length-lexicographic order
  for (unsigned len = 0; len < 64; ++len)
    for (unsigned long long bits = 0; bits < (1ULL << len); ++bits) {
      RleString s;
      for (unsigned i = len; i-- > 0;) s.append((bits >> i) & 1, 1);
      if (!a_y.count(s)) return s;
    }
  throw Error(Errc::short_case_unresolvable, "A_y fragment covers every short string");
}

nlohmann::json to_json(const RleString& s) {
  auto blocks = nlohmann::json::array();
  for (const auto& b : s.blocks()) blocks.push_back({b.bit ? 1 : 0, b.len.str()});
  return blocks;
}

nlohmann::json to_json(const StageRecord& r) {
  nlohmann::json j;
  j["stage"] = r.n;
  j["g"] = r.g.str();
  j["tuple"] = r.tuple;
  j["action"] = r.action;
  j["table_updated"] = r.table_updated;
  if (!r.notes.empty()) j["notes"] = r.notes;
  if (r.declared) {
    j["requirement"] = {{"x", r.declared->x}, {"y", r.declared->y}, {"e", r.declared->e},
                        {"w", to_json(r.declared->w)}, {"a_x", r.declared->a_x}, {"machine", r.declared->machine}};
  }
  return j;
}

}  // namespace crel::sigma2
