#include <functional>

#include "crel/error.hpp"
#include "crel/fol.hpp"

namespace crel::fol {

using K = Formula::Kind;

std::string to_string(const GroundAtom& a) {
  std::string s = a.pred + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) s += (i ? "," : "") + std::to_string(a.args[i]);
  return s + ")";
}

namespace {

bool is_background(const std::string& p) { return p == "s" || p == "z" || p == "l" || p == "e"; }

int time_slot(const std::string& p) {
  if (p.rfind("q_", 0) == 0) return 0;
  if (p == "c0" || p == "c1" || p == "h0" || p == "h1" || p == "p") return 1;
  return -1;
}

bool background_holds(const std::string& p, const std::vector<Nat>& a) {
  if (p == "s") return a[0] + 1 == a[1];
  if (p == "z") return a[0] == 0;
  if (p == "l") return a[0] <= a[1];
  return a[0] == a[1];
}

using Env = std::map<std::string, Nat>;

// temporarily unbinds quantified names, restoring outer bindings on exit
struct Shadow {
  Env& env;
  std::vector<std::pair<std::string, std::optional<Nat>>> saved;
  Shadow(Env& e, const std::vector<std::string>& vars) : env(e) {
    for (const auto& v : vars) {
      auto it = env.find(v);
      saved.emplace_back(v, it == env.end() ? std::nullopt : std::optional<Nat>(it->second));
      if (it != env.end()) env.erase(it);
    }
  }
  ~Shadow() {
    for (const auto& [v, old] : saved) {
      if (old) env[v] = *old;
      else env.erase(v);
    }
  }
};

class Chainer {
public:
  Chainer(Nat domain, Nat time_cap) : d_(domain), cap_(time_cap) {}

  std::set<GroundAtom> facts;

  bool eval(const F& f, Env& env) {
    switch (f->kind) {
      case K::atom: {
        GroundAtom g{f->pred, args(f, env)};
        if (is_background(f->pred)) return background_holds(f->pred, g.args);
        return facts.count(g) != 0;
      }
      case K::negation: return !eval(f->kids[0], env);
      case K::conj:
        for (const auto& k : f->kids)
          if (!eval(k, env)) return false;
        return true;
      case K::disj:
        for (const auto& k : f->kids)
          if (eval(k, env)) return true;
        return false;
      case K::imp: return !eval(f->kids[0], env) || eval(f->kids[1], env);
      case K::forall:
      case K::exists: {
        Shadow sh(env, f->vars);
        bool want = f->kind == K::exists;
        bool found = false;
        enumerate(f->vars, 0, env, [&] {
          if (eval(f->kids[0], env) == want) found = true;
          return !found;
        });
        return want ? found : !found;
      }
    }
    return false;
  }

  void saturate(const std::vector<F>& rules, std::size_t fact_cap) {
    for (;;) {
      index_.clear();
      for (const auto& g : facts) index_[g.pred].push_back(g.args);
      pending_.clear();
      for (const auto& r : rules) {
        Env env;
        derive(r, env);
      }
      bool grew = false;
      for (const auto& g : pending_) grew |= facts.insert(g).second;
      if (facts.size() > fact_cap) throw Error(Errc::budget_exhausted, "ground check exceeded " + std::to_string(fact_cap) + " facts");
      if (!grew) return;
    }
  }

private:
  std::vector<Nat> args(const F& f, const Env& env) const {
    std::vector<Nat> out;
    out.reserve(f->args.size());
    for (const auto& t : f->args) {
      if (t.is_const) {
        out.push_back(0);
        continue;
      }
      auto it = env.find(t.name);
      if (it == env.end()) throw Error(Errc::precondition_violated, "unbound variable " + t.name);
      out.push_back(it->second);
    }
    return out;
  }

  // visit every assignment of vars[k..] over the domain; the callback returns false to stop
  bool enumerate(const std::vector<std::string>& vars, std::size_t k, Env& env, const std::function<bool()>& cb) {
    if (k == vars.size()) return cb();
    for (Nat v = 0; v <= d_; ++v) {
      env[vars[k]] = v;
      if (!enumerate(vars, k + 1, env, cb)) {
        env.erase(vars[k]);
        return false;
      }
    }
    env.erase(vars[k]);
    return true;
  }

  static void positives(const F& f, std::vector<F>& out) {
    if (f->kind == K::atom && !is_background(f->pred)) out.push_back(f);
    if (f->kind == K::conj)
      for (const auto& k : f->kids) positives(k, out);
  }

  // machine atoms that must hold for derive(f) to add anything; nullopt if it never adds
  static std::optional<std::vector<F>> necessary(const F& f) {
    switch (f->kind) {
      case K::atom:
        if (is_background(f->pred)) return std::nullopt;
        return std::vector<F>{};
      case K::conj: {
        std::optional<std::vector<F>> acc;
        for (const auto& k : f->kids) {
          auto n = necessary(k);
          if (!n) continue;
          if (!acc) {
            acc = n;
            continue;
          }
          std::vector<F> keep;
          for (const auto& a : *acc)
            for (const auto& b : *n)
              if (equal(a, b)) {
                keep.push_back(a);
                break;
              }
          acc = keep;
        }
        return acc;
      }
      case K::imp: {
        auto n = necessary(f->kids[1]);
        if (!n) return std::nullopt;
        positives(f->kids[0], *n);
        return n;
      }
      case K::forall:
      case K::exists: return necessary(f->kids[0]);
      default: return std::vector<F>{};
    }
  }

  // bind `vars` by joining trigger atoms with the facts, then enumerate the rest
  void for_bindings(const std::vector<std::string>& vars, const F& body, Env& env, const std::function<void()>& cb) {
    std::vector<F> triggers;
    if (auto n = necessary(body)) {
      std::set<std::string> scope(vars.begin(), vars.end());
      for (const auto& a : *n) {
        bool ok = true;
        for (const auto& t : a->args)
          if (!t.is_const && !scope.count(t.name) && !env.count(t.name)) ok = false;
        if (ok) triggers.push_back(a);
      }
    } else {
      return;
    }
    std::function<void(std::size_t)> join = [&](std::size_t k) {
      if (k == triggers.size()) {
        std::vector<std::string> rest;
        for (const auto& v : vars)
          if (!env.count(v)) rest.push_back(v);
        enumerate(rest, 0, env, [&] {
          cb();
          return true;
        });
        return;
      }
      const auto& a = triggers[k];
      auto it = index_.find(a->pred);
      if (it == index_.end()) return;
      for (const auto& row : it->second) {
        std::vector<std::string> bound_here;
        bool ok = true;
        for (std::size_t i = 0; i < row.size() && ok; ++i) {
          const auto& t = a->args[i];
          if (t.is_const) {
            ok = row[i] == 0;
            continue;
          }
          auto e = env.find(t.name);
          if (e != env.end()) {
            ok = e->second == row[i];
          } else {
            env[t.name] = row[i];
            bound_here.push_back(t.name);
          }
        }
        if (ok) join(k + 1);
        for (const auto& v : bound_here) env.erase(v);
      }
    };
    join(0);
  }

  static void constraints(const F& f, std::vector<F>& out) {
    switch (f->kind) {
      case K::atom:
        if (is_background(f->pred)) out.push_back(f);
        break;
      case K::conj:
        for (const auto& k : f->kids) constraints(k, out);
        break;
      case K::imp: constraints(f->kids[1], out); break;
      case K::exists: constraints(f->kids[0], out); break;
      default: break;
    }
  }

  // witnesses come from the successor/zero/equality constraints of the body
  bool choose_witnesses(const std::vector<std::string>& vars, const F& body, Env& env) {
    std::vector<F> cs;
    constraints(body, cs);
    std::set<std::string> open(vars.begin(), vars.end());
    auto known = [&](const Term& t) -> std::optional<Nat> {
      if (t.is_const) return 0;
      if (open.count(t.name) && !env.count(t.name)) return std::nullopt;
      auto it = env.find(t.name);
      if (it == env.end()) return std::nullopt;
      return it->second;
    };
    for (bool progress = true; progress;) {
      progress = false;
      for (const auto& c : cs) {
        auto set = [&](const Term& t, Nat v) {
          if (!t.is_const && open.count(t.name) && !env.count(t.name)) {
            env[t.name] = v;
            progress = true;
          }
        };
        if (c->pred == "z") {
          set(c->args[0], 0);
        } else if (c->pred == "s") {
          auto a = known(c->args[0]), b = known(c->args[1]);
          if (a && !b) set(c->args[1], *a + 1);
          if (!a && b && *b > 0) set(c->args[0], *b - 1);
        } else if (c->pred == "e") {
          auto a = known(c->args[0]), b = known(c->args[1]);
          if (a && !b) set(c->args[1], *a);
          if (!a && b) set(c->args[0], *b);
        }
      }
    }
    for (const auto& v : vars) {
      if (!env.count(v)) env[v] = 0;
      if (env[v] > d_) return false;
    }
    for (const auto& c : cs) {
      bool ground = true;
      for (const auto& t : c->args)
        if (!t.is_const && !env.count(t.name)) ground = false;
      if (ground && !background_holds(c->pred, args(c, env))) return false;
    }
    return true;
  }

  void derive(const F& f, Env& env) {
    switch (f->kind) {
      case K::atom: {
        if (is_background(f->pred)) return;
        GroundAtom g{f->pred, args(f, env)};
        for (Nat a : g.args)
          if (a > d_) return;
        int ts = time_slot(f->pred);
        if (ts >= 0 && g.args[ts] > cap_) return;
        pending_.insert(std::move(g));
        return;
      }
      case K::conj:
        for (const auto& k : f->kids) derive(k, env);
        return;
      case K::imp:
        if (eval(f->kids[0], env)) derive(f->kids[1], env);
        return;
      case K::forall: {
        Shadow sh(env, f->vars);
        derive_forall(f->vars, f->kids[0], env);
        return;
      }
      case K::exists: {
        Shadow sh(env, f->vars);
        if (choose_witnesses(f->vars, f->kids[0], env)) derive(f->kids[0], env);
        return;
      }
      default: throw Error(Errc::precondition_violated, "negation or disjunction in a rule head");
    }
  }

  void derive_forall(const std::vector<std::string>& vars, const F& body, Env& env) {
    if (body->kind == K::conj) {
      for (const auto& k : body->kids) derive_forall(vars, k, env);
      return;
    }
    for_bindings(vars, body, env, [&] { derive(body, env); });
  }

  Nat d_, cap_;
  std::map<std::string, std::vector<std::vector<Nat>>> index_;
  std::set<GroundAtom> pending_;
};

}  // namespace

std::set<GroundAtom> ground_atoms(const F& f) {
  std::vector<F> machine, succ;
  std::function<void(const F&)> walk = [&](const F& g) {
    if (g->kind == K::atom) {
      if (g->pred == "s") succ.push_back(g);
      else if (!is_background(g->pred)) machine.push_back(g);
    } else if (g->kind == K::conj || g->kind == K::exists) {
      for (const auto& k : g->kids) walk(k);
    }
  };
  walk(f);
  Env env;
  for (bool progress = true; progress;) {
    progress = false;
    for (const auto& s : succ) {
      const auto &a = s->args[0], &b = s->args[1];
      std::optional<Nat> va = a.is_const ? std::optional<Nat>(0) : (env.count(a.name) ? std::optional<Nat>(env[a.name]) : std::nullopt);
      if (va && !b.is_const && !env.count(b.name)) {
        env[b.name] = *va + 1;
        progress = true;
      }
    }
  }
  std::set<GroundAtom> out;
  for (const auto& m : machine) {
    GroundAtom g{m->pred, {}};
    for (const auto& t : m->args) {
      if (t.is_const) {
        g.args.push_back(0);
        continue;
      }
      auto it = env.find(t.name);
      if (it == env.end()) throw Error(Errc::precondition_violated, "no successor chain reaches " + t.name);
      g.args.push_back(it->second);
    }
    out.insert(std::move(g));
  }
  return out;
}

std::set<GroundAtom> config_atoms(const Config& c) {
  std::set<GroundAtom> out;
  out.insert({state_pred(c.state), {c.t, c.b, c.u, c.nz}});
  out.insert({"h0", {c.h0, c.t, c.b, c.u}});
  out.insert({"h1", {c.h1, c.t, c.b, c.u}});
  for (Nat w : c.work) out.insert({"c0", {w, c.t, c.b, c.u}});
  for (Nat w : c.print) out.insert({"c1", {w, c.t, c.b, c.u}});
  return out;
}

bool nat_holds_on(Nat d) {
  Chainer ch(d, 0);
  for (const auto& ax : nat_axioms({})) {
    if (ax.name.rfind("nat_ind_", 0) == 0) continue;  // E is identity here
    if (ax.name == "nat10") {
      // successors exist below the top of the domain
      for (Nat x = 0; x < d; ++x) {
        Env env{{"x", x}, {"y", x + 1}};
        if (!ch.eval(atom("s", {var("x"), var("y")}), env)) return false;
      }
      continue;
    }
    Env env;
    if (!ch.eval(ax.formula, env)) return false;
  }
  return true;
}

Nat trace_domain_bound(const Trace& tr, Nat upto) {
  Nat top = 0;
  for (Nat i = 0; i <= upto + 1 && i < tr.steps.size(); ++i) {
    const auto& c = tr.steps[i];
    top = std::max({top, c.h0, c.h1, c.t, c.b, c.u, c.nz});
    if (!c.work.empty()) top = std::max(top, *c.work.rbegin());
    if (!c.print.empty()) top = std::max(top, *c.print.rbegin());
  }
  return top + 2;
}

CheckVerdict ground_check(const NDTM& m, const Trace& tr, Nat t, Nat domain_bound, std::size_t fact_cap) {
  if (t + 1 >= tr.steps.size()) throw Error(Errc::index_out_of_range, "no step after " + std::to_string(t));
  CheckVerdict v;
  if (!nat_holds_on(domain_bound)) {
    v.ok = false;
    return v;
  }
  Chainer ch(domain_bound, tr.steps[t].t + 1);
  for (Nat i = 0; i <= t; ++i) {
    auto g = ground_atoms(hist_block(tr.steps[i]));
    ch.facts.insert(g.begin(), g.end());
  }
  std::vector<F> rules;
  for (const auto& n : tra_axioms(m)) rules.push_back(n.formula);
  ch.saturate(rules, fact_cap);
  v.derived = ch.facts.size();
  for (const auto& g : ground_atoms(hist_block(tr.steps[t + 1]))) {
    if (!ch.facts.count(g)) {
      v.ok = false;
      v.missing = g;
      break;
    }
  }
  return v;
}

}  // namespace crel::fol
