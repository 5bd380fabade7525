#include "crel/diag.hpp"

#include <numeric>

#include "crel/error.hpp"

namespace crel::diag {

Pair upair(Nat a, Nat b) { return a < b ? Pair{a, b} : Pair{b, a}; }

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::waiting: return "waiting";
    case Phase::ended: return "ended";
    case Phase::step3: return "step3";
    case Phase::step4: return "step4";
    case Phase::restarted: return "restarted";
  }
  return "?";
}

Nat UFamily::count(Nat a, Nat b) const {
  if (a == b) return static_cast<Nat>(-1);
  auto it = u.find(upair(a, b));
  return it == u.end() ? 0 : it->second;
}

// ---------------------------------------------------------------- families

namespace {

Phi phi_from_json(const nlohmann::json& j) {
  std::map<Nat, PhiResult> table;
  if (j.contains("values"))
    for (const auto& [k, v] : j["values"].items())
      table[std::stoull(k)] = {v.at("value").get<Nat>(), v.value("steps", Nat{1})};
  nlohmann::json other = j.value("otherwise", nlohmann::json{{"kind", "diverge"}});
  const std::string kind = other.value("kind", "");
  if (kind != "diverge" && kind != "affine") throw Error(Errc::bad_input, "unknown phi kind '" + kind + "'");
  Nat mul = other.value("mul", Nat{1}), add = other.value("add", Nat{0}), steps = other.value("steps", Nat{1});
  bool diverge = kind == "diverge";
  return [=](Nat n) -> std::optional<PhiResult> {
    if (auto it = table.find(n); it != table.end()) return it->second;
    if (diverge) return std::nullopt;
    return PhiResult{mul * n + add, steps};
  };
}

using Stream = std::function<bool(Nat a, Nat b, Nat clock)>;

Stream stream_from_json(const nlohmann::json& j) {
  const std::string kind = j.value("kind", "");
  if (kind == "never") return [](Nat, Nat, Nat) { return false; };
  if (kind == "eq") return [](Nat a, Nat b, Nat) { return a == b; };
  if (kind == "every") {
    Nat n = j.at("n").get<Nat>();
    if (n == 0) throw Error(Errc::bad_input, "every needs n >= 1");
    return [n](Nat, Nat, Nat c) { return c % n == 0; };
  }
  if (kind == "at") {
    auto v = j.at("steps").get<std::vector<Nat>>();
    std::set<Nat> s(v.begin(), v.end());
    return [s](Nat, Nat, Nat c) { return s.count(c) != 0; };
  }
  if (kind == "until") {
    Nat k = j.at("k").get<Nat>();
    return [k](Nat, Nat, Nat c) { return c <= k; };
  }
  throw Error(Errc::bad_input, "unknown V kind '" + kind + "'");
}

}  // namespace

Family family_from_json(const nlohmann::json& j) {
  try {
    Family f;
    for (const auto& m : j.at("machines")) f.phi.push_back(phi_from_json(m));
    const auto& v = j.value("v", nlohmann::json{{"default", {{"kind", "never"}}}});
    Stream dflt = stream_from_json(v.value("default", nlohmann::json{{"kind", "never"}}));
    std::map<Pair, Stream> pairs;
    for (const auto& p : v.value("pairs", nlohmann::json::array()))
      pairs[upair(p.at("a").get<Nat>(), p.at("b").get<Nat>())] = stream_from_json(p);
    f.v = [dflt, pairs](Nat a, Nat b, Nat c) {
      auto it = pairs.find(upair(a, b));
      return it != pairs.end() ? it->second(a, b, c) : dflt(a, b, c);
    };
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::bad_input, e.what());
  }
}

// ---------------------------------------------------------------- engine

namespace {

class Engine {
public:
  Engine(const Family& f, bool delta2) : f_(f) { out_.delta2 = delta2; }

  Instance start(Nat e, Nat z) {
    used_.insert(z);
    Instance in;
    in.e = e;
    in.x = x_of(e);
    in.y = y_of(e);
    in.z = z;
    out_.instances.push_back(in);
    return in;
  }

  Nat fresh_z() {
    Nat z = 3;
    while (used_.count(z)) z += 3;
    return z;
  }

  void run(std::vector<Instance> slots, Nat budget) {
    if (slots.empty()) {
      out_.steps = budget;
      return;
    }
    for (Nat s = 1; s <= budget; ++s) {
      out_.steps = s;
      step_ = s;
      micro(slots[(s - 1) % slots.size()]);
    }
  }

  UFamily take() { return std::move(out_); }

private:
  void assign(const Pair& p, bool to_u, const Instance& in) {
    Event ev;
    ev.step = step_;
    ev.e = in.e;
    ev.z = in.z;
    ev.a = p.first;
    ev.b = p.second;
    if (to_u) {
      ++out_.u[p];
      out_.last_add[p] = step_;
      ev.kind = "add";
    } else {
      ev.kind = "comp";
    }
    if (out_.delta2) {
      Nat idx = out_.next_elem[p]++;
      (to_u ? out_.u_elems : out_.comp_elems)[p].insert(idx);
    }
    out_.log.push_back(ev);
  }

  void comp(const Pair& p, const Instance& in) {
    if (out_.delta2) assign(p, false, in);
  }

  void phase(Instance& in, Phase to) {
    Event ev;
    ev.step = step_;
    ev.e = in.e;
    ev.z = in.z;
    ev.kind = "phase";
    ev.from = in.phase;
    ev.to = to;
    out_.log.push_back(ev);
    in.phase = to;
  }

  bool v_event(const Instance& in, Nat a, Nat b, Nat clock, const char* role) {
    if (!f_.v(a, b, clock)) return false;
    Event ev;
    ev.step = step_;
    ev.e = in.e;
    ev.z = in.z;
    ev.kind = "v";
    ev.a = a;
    ev.b = b;
    ev.role = role;
    out_.log.push_back(ev);
    return true;
  }

  void restart(Instance& in) {
    phase(in, Phase::restarted);
    if (out_.delta2) {
      out_.closed.insert(upair(in.x, in.z));
      out_.closed.insert(upair(in.y, in.z));
    }
    in = start(in.e, fresh_z());
  }

  void micro(Instance& in) {
    const Pair xy = upair(in.x, in.y), xz = upair(in.x, in.z), yz = upair(in.y, in.z);
    switch (in.phase) {
      case Phase::waiting: {
        ++in.waited;
        comp(xy, in);
        comp(xz, in);
        comp(yz, in);
        const Phi& phi = f_.phi[in.e];
        auto rx = phi(in.x), ry = phi(in.y), rz = phi(in.z);
        if (!rx || !ry || !rz) return;
        if (in.waited < std::max({rx->steps, ry->steps, rz->steps})) return;
        in.fx = rx->value;
        in.fy = ry->value;
        in.fz = rz->value;
        if (in.fx == in.fy || in.fx == in.fz || in.fy == in.fz) phase(in, Phase::ended);
        else phase(in, Phase::step3);
        return;
      }
      case Phase::step3: {
        assign(xz, true, in);
        comp(xy, in);
        comp(yz, in);
        bool to5 = v_event(in, in.fx, in.fy, ++in.clock_xy, "xy");
        bool to4 = v_event(in, in.fx, in.fz, ++in.clock_xz, "xz");
        if (to5) restart(in);
        else if (to4) phase(in, Phase::step4);
        return;
      }
      case Phase::step4: {
        assign(yz, true, in);
        comp(xy, in);
        comp(xz, in);
        bool to5 = v_event(in, in.fx, in.fy, ++in.clock_xy, "xy");
        bool to3 = v_event(in, in.fy, in.fz, ++in.clock_yz, "yz");
        if (to5) restart(in);
        else if (to3) phase(in, Phase::step3);
        return;
      }
      case Phase::ended:
      case Phase::restarted: return;
    }
  }

  const Family& f_;
  UFamily out_;
  std::set<Nat> used_;
  Nat step_ = 0;
};

UFamily run_all(const Family& f, Nat budget, bool delta2) {
  Engine eng(f, delta2);
  std::vector<Instance> slots;
  for (Nat e = 0; e < f.phi.size(); ++e) slots.push_back(eng.start(e, eng.fresh_z()));
  eng.run(std::move(slots), budget);
  return eng.take();
}

}  // namespace

UFamily dovetail(const Family& f, Nat global_budget) { return run_all(f, global_budget, false); }

UFamily run_delta2(const Family& f, Nat global_budget) { return run_all(f, global_budget, true); }

UFamily run_subroutine(Nat e, Nat z, const Family& f, Nat budget) {
  if (e >= f.phi.size()) throw Error(Errc::index_out_of_range, "no machine " + std::to_string(e));
  if (z == 0 || z % 3) throw Error(Errc::precondition_violated, "z must be a positive multiple of 3");
  Engine eng(f, false);
  std::vector<Instance> slots{eng.start(e, z)};
  eng.run(std::move(slots), budget);
  return eng.take();
}

// ---------------------------------------------------------------- checks

Report invariant_report(const UFamily& u, Nat window) {
  Report r;
  auto bad = [&](std::string s) { r.violations.push_back(std::move(s)); };
  auto name = [](const Pair& p) { return "U_{" + std::to_string(p.first) + "," + std::to_string(p.second) + "}"; };

  for (const auto& [p, n] : u.u) {
    Nat ra = p.first % 3, rb = p.second % 3;
    if (n > 0 && ((ra == 1 && rb == 2) || (ra == 2 && rb == 1))) bad(name(p) + " = " + std::to_string(n) + " (x_e,y_d pair)");
  }

  // per live instance, the pair it added to most recently inside the window
  const Nat since = u.steps > window ? u.steps - window : 0;
  std::map<std::pair<Nat, Nat>, std::pair<Nat, Pair>> latest;
  std::set<std::pair<Nat, Nat>> dead;
  for (const auto& ev : u.log) {
    if (ev.kind == "add" && ev.step > since) latest[{ev.e, ev.z}] = {ev.step, Pair{ev.a, ev.b}};
    if (ev.kind == "phase" && ev.to == Phase::restarted) dead.insert({ev.e, ev.z});
  }
  for (const auto& [key, v] : latest)
    if (!dead.count(key)) r.growing.insert(v.second);
  // classes of the growing relation
  std::map<Nat, Nat> parent;
  std::function<Nat(Nat)> find = [&](Nat a) -> Nat {
    if (!parent.count(a)) parent[a] = a;
    return parent[a] == a ? a : parent[a] = find(parent[a]);
  };
  for (const auto& p : r.growing) parent[find(p.first)] = find(p.second);
  std::map<Nat, std::set<Nat>> classes;
  for (const auto& [a, _] : parent) classes[find(a)].insert(a);
  for (const auto& [root, members] : classes)
    if (members.size() > 2) {
      std::string s = "class of size " + std::to_string(members.size()) + ":";
      for (Nat m : members) s += " " + std::to_string(m);
      bad(s);
    }
  std::map<Nat, Nat> partners;
  for (const auto& p : r.growing) {
    ++partners[p.first];
    ++partners[p.second];
  }
  for (const auto& [x, k] : partners)
    if (k > 1) bad(std::to_string(x) + " has " + std::to_string(k) + " growing partners");

  // event log: phase changes follow the numbered steps, justified by V events
  std::map<std::tuple<Nat, Nat, Nat, std::string>, bool> vseen;
  std::map<std::pair<Nat, Nat>, Nat> restarted_at;  // (e, z) -> step
  for (const auto& ev : u.log) {
    if (ev.kind == "v") vseen[{ev.step, ev.e, ev.z, ev.role}] = true;
    if (ev.kind == "phase") {
      auto need = [&](const char* role) {
        if (!vseen.count({ev.step, ev.e, ev.z, role}))
          bad(std::string(phase_name(ev.from)) + "->" + phase_name(ev.to) + " at step " + std::to_string(ev.step) +
              " without a V event on " + role);
      };
      bool legal = (ev.from == Phase::waiting && (ev.to == Phase::ended || ev.to == Phase::step3)) ||
                   (ev.from == Phase::step3 && (ev.to == Phase::step4 || ev.to == Phase::restarted)) ||
                   (ev.from == Phase::step4 && (ev.to == Phase::step3 || ev.to == Phase::restarted));
      if (!legal) bad(std::string("illegal transition ") + phase_name(ev.from) + "->" + phase_name(ev.to));
      if (ev.from == Phase::step3 && ev.to == Phase::step4) need("xz");
      if (ev.from == Phase::step4 && ev.to == Phase::step3) need("yz");
      if (ev.to == Phase::restarted) {
        need("xy");
        restarted_at[{ev.e, ev.z}] = ev.step;
      }
    }
    if (ev.kind == "add") {
      // after step 5 on z, neither cross counter of z may grow
      for (const auto& [key, when] : restarted_at) {
        Nat z = key.second;
        Pair xz = upair(x_of(key.first), z), yz = upair(y_of(key.first), z);
        Pair p{ev.a, ev.b};
        if ((p == xz || p == yz) && ev.step > when) bad(name(p) + " grew after step 5");
      }
    }
  }
  return r;
}

std::vector<std::string> partition_violations(const UFamily& u, Nat horizon) {
  std::vector<std::string> bad;
  std::set<Pair> pairs;
  for (const auto& [p, _] : u.next_elem) pairs.insert(p);
  static const std::set<Nat> none;
  for (const auto& p : pairs) {
    auto iu = u.u_elems.find(p), ic = u.comp_elems.find(p);
    const auto& us = iu == u.u_elems.end() ? none : iu->second;
    std::set<Nat> cs = ic == u.comp_elems.end() ? none : ic->second;
    Nat n = u.next_elem.at(p);
    if (u.closed.count(p))
      for (Nat i = n; i < std::max(n, horizon); ++i) cs.insert(i);
    Nat cover = u.closed.count(p) ? std::max(n, horizon) : n;
    std::string tag = "(" + std::to_string(p.first) + "," + std::to_string(p.second) + ")";
    for (Nat i : us)
      if (cs.count(i)) bad.push_back(tag + " element " + std::to_string(i) + " on both sides");
    if (us.size() + cs.size() != cover) bad.push_back(tag + " does not cover its horizon");
    if (!us.empty() && *us.rbegin() >= cover) bad.push_back(tag + " element beyond horizon");
    if (!cs.empty() && *cs.rbegin() >= cover) bad.push_back(tag + " element beyond horizon");
    auto it = u.u.find(p);
    if ((it == u.u.end() ? 0 : it->second) != us.size()) bad.push_back(tag + " counter disagrees with elements");
  }
  return bad;
}

nlohmann::json to_json(const Report& r) {
  nlohmann::json j;
  j["ok"] = r.ok();
  j["violations"] = r.violations;
  auto g = nlohmann::json::array();
  for (const auto& p : r.growing) g.push_back({p.first, p.second});
  j["growing"] = g;
  return j;
}

nlohmann::json to_json(const Event& e) {
  nlohmann::json j{{"step", e.step}, {"e", e.e}, {"z", e.z}, {"kind", e.kind}};
  if (e.kind == "phase") {
    j["from"] = phase_name(e.from);
    j["to"] = phase_name(e.to);
  } else {
    j["pair"] = {e.a, e.b};
  }
  if (e.kind == "v") j["role"] = e.role;
  return j;
}

nlohmann::json summary_json(const UFamily& u) {
  nlohmann::json j;
  j["steps"] = u.steps;
  j["delta2"] = u.delta2;
  auto us = nlohmann::json::array();
  for (const auto& [p, n] : u.u) us.push_back({{"pair", {p.first, p.second}}, {"count", n}});
  j["u"] = us;
  auto ins = nlohmann::json::array();
  for (const auto& in : u.instances) ins.push_back({{"e", in.e}, {"z", in.z}});
  j["instances"] = ins;
  return j;
}

}  // namespace crel::diag
