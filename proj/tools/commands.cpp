#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "crel/diag.hpp"
#include "crel/error.hpp"
#include "crel/fol.hpp"
#include "crel/kernel.hpp"
#include "crel/program_json.hpp"
#include "crel/qgroup.hpp"
#include "crel/sigma2.hpp"
#include "crel/tptp.hpp"
#include "crel/trees.hpp"
#include "suites.hpp"

namespace crel::cli {

namespace {

using nlohmann::json;

struct Globals {
  Nat seed = 1;
  Nat budget = 200000;
  bool json = false;
  std::string out;
};

using Action = std::function<int(std::ostream&)>;

// inline JSON when the argument starts like JSON, a file path otherwise
json load_json(const std::string& arg) {
  try {
    if (!arg.empty() && (arg[0] == '{' || arg[0] == '[')) return json::parse(arg);
    std::ifstream in(arg);
    if (!in) throw Error(Errc::bad_input, "cannot read " + arg);
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse_error, arg + ": " + e.what());
  }
}

void put(std::ostream& os, const json& j) { os << j.dump(2) << "\n"; }

std::string yes_no(bool b) { return b ? "yes" : "no"; }

int exit_for(const Error& e) {
  switch (e.code()) {
    case Errc::budget_exhausted:
    case Errc::oracle_budget_exhausted:
    case Errc::decider_budget_exhausted:
    case Errc::decider_diverges:
    case Errc::node_cap_exceeded: return Exit::budget;
    default: return Exit::usage;
  }
}

// ---------------------------------------------------------------- rel

RelationWindow window_of(const ProgramTable& p, const std::string& mode, Nat t, Nat steps, Nat budget) {
  if (mode == "sigma1") return closure_sigma1(p, t, steps);
  if (mode == "sigma1-pre") return closure_sigma1(p, t, steps, ClosureMode::preorder);
  if (mode == "pi1-eq") return pi1_window({p, Mode::pi1_equivalence}, t, budget).window;
  if (mode == "pi1-pre") return pi1_window({p, Mode::pi1_preorder}, t, budget).window;
  throw Error(Errc::bad_input, "unknown mode " + mode);
}

void print_window(std::ostream& os, const RelationWindow& w) {
  os << "window [0," << w.bound() << "] reflexive=" << yes_no(w.reflexive()) << " symmetric=" << yes_no(w.symmetric())
     << " transitive=" << yes_no(w.transitive()) << "\n";
  for (Nat x = 0; x <= w.bound(); ++x) {
    for (Nat y = 0; y <= w.bound(); ++y) os << (w.at(x, y) ? '1' : '.');
    os << "\n";
  }
}

std::function<Nat(Nat)> map_from_json(const json& j) {
  const std::string kind = j.value("kind", "");
  if (kind == "table") {
    auto v = j.at("values").get<std::vector<Nat>>();
    return [v](Nat x) {
      if (x >= v.size()) throw Error(Errc::index_out_of_range, "map table has no entry " + std::to_string(x));
      return v[x];
    };
  }
  if (kind == "affine") {
    Nat m = j.value("mul", Nat{1}), a = j.value("add", Nat{0});
    return [m, a](Nat x) { return m * x + a; };
  }
  if (kind == "mod") {
    Nat n = j.at("n").get<Nat>();
    if (n == 0) throw Error(Errc::bad_input, "mod 0");
    return [n](Nat x) { return x % n; };
  }
  throw Error(Errc::bad_input, "unknown map kind '" + kind + "'");
}

void add_rel(CLI::App& app, Globals& g, Action& act) {
  auto rel = app.add_subcommand("rel", "relation windows, closures and reductions");
  rel->require_subcommand(1);

  struct WindowOpts {
    std::string rel, mode = "pi1-eq";
    Nat t = 5, steps = 1000;
  };
  auto w = std::make_shared<WindowOpts>();
  auto win = rel->add_subcommand("window", "settled or closed window of a program");
  win->add_option("--rel,--json", w->rel, "program JSON (file or inline)")->required();
  win->add_option("--t", w->t, "window bound");
  win->add_option("--mode", w->mode, "pi1-eq | pi1-pre | sigma1 | sigma1-pre");
  win->add_option("--steps", w->steps, "enumeration steps for sigma1 modes");
  win->callback([&, w] {
    act = [&, w](std::ostream& os) {
      auto p = program_from_json(load_json(w->rel));
      auto win = window_of(p, w->mode, w->t, w->steps, g.budget);
      if (g.json) put(os, window_to_json(win));
      else print_window(os, win);
      return Exit::ok;
    };
  });

  auto c = std::make_shared<WindowOpts>();
  auto clo = rel->add_subcommand("closure", "equivalence (or preorder) closure after some steps");
  clo->add_option("--rel,--json", c->rel, "program JSON")->required();
  clo->add_option("--t", c->t, "window bound");
  clo->add_option("--steps", c->steps, "enumeration steps");
  auto pre = std::make_shared<bool>(false);
  clo->add_flag("--preorder", *pre, "reflexive-transitive closure only");
  clo->callback([&, c, pre] {
    act = [&, c, pre](std::ostream& os) {
      auto p = program_from_json(load_json(c->rel));
      auto win = closure_sigma1(p, c->t, c->steps, *pre ? ClosureMode::preorder : ClosureMode::equivalence);
      if (g.json) put(os, window_to_json(win));
      else print_window(os, win);
      return Exit::ok;
    };
  });

  struct ReduceOpts {
    std::string a, b, map, mode = "sigma1";
    Nat t = 5, steps = 1000;
  };
  auto r = std::make_shared<ReduceOpts>();
  auto red = rel->add_subcommand("reduce-check", "check A(x,y) <=> B(f(x),f(y)) on a window");
  red->add_option("--a", r->a, "program JSON for A")->required();
  red->add_option("--b", r->b, "program JSON for B")->required();
  red->add_option("--map", r->map, R"(map JSON: {"kind":"table","values":[..]} | affine | mod)")->required();
  red->add_option("--t", r->t, "window bound");
  red->add_option("--mode", r->mode, "how both programs are read (see rel window)");
  red->add_option("--steps", r->steps, "enumeration steps for sigma1 modes");
  red->callback([&, r] {
    act = [&, r](std::ostream& os) {
      auto a = window_of(program_from_json(load_json(r->a)), r->mode, r->t, r->steps, g.budget);
      auto f = map_from_json(load_json(r->map));
      Nat top = 0;
      for (Nat x = 0; x <= r->t; ++x) top = std::max(top, f(x));
      auto b = window_of(program_from_json(load_json(r->b)), r->mode, top, r->steps, g.budget);
      std::function<std::optional<bool>(const Nat&, const Nat&)> bo = [&](const Nat& p, const Nat& q) {
        return std::optional<bool>(b.at(p, q));
      };
      auto v = check_reduction<Nat>(a, bo, f, r->t);
      if (g.json) {
        json j{{"ok", v.ok}};
        if (v.counterexample) j["counterexample"] = {v.counterexample->x, v.counterexample->y};
        put(os, j);
      } else if (v.ok) {
        os << "ok on [0," << r->t << "]\n";
      } else {
        os << "counterexample (" << v.counterexample->x << "," << v.counterexample->y << ")\n";
      }
      return v.ok ? Exit::ok : Exit::violation;
    };
  });

  struct DeltaOpts {
    std::string rel;
    Nat t = 5;
  };
  auto d = std::make_shared<DeltaOpts>();
  auto del = rel->add_subcommand("delta1", "reduce a decider preorder to the delta1 preorder and check it");
  del->add_option("--rel,--json", d->rel, "decider JSON")->required();
  del->add_option("--t", d->t, "window bound");
  del->callback([&, d] {
    act = [&, d](std::ostream& os) {
      Registry reg;
      reg.add(0, program_from_json(load_json(d->rel)));
      const auto& dec = reg.get(0);
      auto a = RelationWindow::from_predicate(d->t, [&](Nat x, Nat y) {
        auto r = dec.decide(x, y, g.budget);
        if (!r) throw Error(Errc::decider_budget_exhausted, "decider on (" + std::to_string(x) + "," + std::to_string(y) + ")");
        return r->accepted;
      });
      std::vector<Delta1Triple> img;
      for (Nat x = 0; x <= d->t; ++x) img.push_back(reduce_to_delta1(reg, 0, x, g.budget));
      std::function<Delta1Triple(Nat)> f = [&](Nat x) { return img[x]; };
      std::function<std::optional<bool>(const Delta1Triple&, const Delta1Triple&)> leq =
          [&](const Delta1Triple& p, const Delta1Triple& q) { return std::optional<bool>(delta1_leq(reg, p, q)); };
      auto v = check_reduction<Delta1Triple>(a, leq, f, d->t);
      if (g.json) {
        json j{{"ok", v.ok}};
        auto ts = json::array();
        for (const auto& tr : img) ts.push_back({tr.x, tr.e, tr.t});
        j["triples"] = ts;
        if (v.counterexample) j["counterexample"] = {v.counterexample->x, v.counterexample->y};
        put(os, j);
      } else {
        os << "x\te\tt\n";
        for (const auto& tr : img) os << tr.x << "\t" << tr.e << "\t" << tr.t << "\n";
        if (v.ok) os << "ok on [0," << d->t << "]\n";
        else os << "counterexample (" << v.counterexample->x << "," << v.counterexample->y << ")\n";
      }
      return v.ok ? Exit::ok : Exit::violation;
    };
  });
}

// ---------------------------------------------------------------- kernel, preorder

std::vector<std::pair<Nat, Nat>> parse_pairs(const std::string& s) {
  std::vector<std::pair<Nat, Nat>> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';')) {
    auto comma = item.find(',');
    if (comma == std::string::npos) throw Error(Errc::bad_input, "pair '" + item + "' needs a comma");
    try {
      out.push_back({std::stoull(item.substr(0, comma)), std::stoull(item.substr(comma + 1))});
    } catch (const std::logic_error&) {
      throw Error(Errc::bad_input, "bad pair '" + item + "'");
    }
  }
  return out;
}

void add_kernel(CLI::App& app, Globals& g, Action& act) {
  auto k = app.add_subcommand("kernel", "the kernel function of a pi1 equivalence relation");
  k->require_subcommand(1);

  struct TableOpts {
    std::string rel;
    Nat xmax = 5, nmax = 5;
  };
  auto t = std::make_shared<TableOpts>();
  auto tab = k->add_subcommand("table", "TSV table of f(x,n)");
  tab->add_option("--rel", t->rel, "program JSON enumerating the complement")->required();
  tab->add_option("--xmax", t->xmax);
  tab->add_option("--nmax", t->nmax);
  tab->callback([&, t] {
    act = [&, t](std::ostream& os) {
      auto ctx = make_kernel_context(program_from_json(load_json(t->rel)), g.budget);
      if (g.json) {
        json rows = json::array();
        for (Nat x = 0; x <= t->xmax; ++x) {
          json row = json::array();
          for (Nat n = 0; n <= t->nmax; ++n) row.push_back(kernel_f(ctx, x, n));
          rows.push_back(row);
        }
        put(os, {{"f", rows}});
        return Exit::ok;
      }
      os << "x\\n";
      for (Nat n = 0; n <= t->nmax; ++n) os << "\t" << n;
      os << "\n";
      for (Nat x = 0; x <= t->xmax; ++x) {
        os << x;
        for (Nat n = 0; n <= t->nmax; ++n) os << "\t" << kernel_f(ctx, x, n);
        os << "\n";
      }
      return Exit::ok;
    };
  });

  struct CheckOpts {
    std::string rel;
    std::vector<std::string> pairs;
    Nat n = 64;
  };
  auto c = std::make_shared<CheckOpts>();
  auto chk = k->add_subcommand("check", "kernel equivalence of listed pairs");
  chk->add_option("--rel", c->rel, "program JSON enumerating the complement")->required();
  chk->add_option("--pairs", c->pairs, "x,y;x,y;... (or several x,y values)")->required()->expected(1, -1);
  chk->add_option("--n", c->n, "largest n consulted");
  chk->callback([&, c] {
    act = [&, c](std::ostream& os) {
      auto ctx = make_kernel_context(program_from_json(load_json(c->rel)), g.budget);
      json arr = json::array();
      std::vector<std::pair<Nat, Nat>> all;
      for (const auto& p : c->pairs)
        for (auto xy : parse_pairs(p)) all.push_back(xy);
      for (auto [x, y] : all) {
        bool eq = kernel_equiv(ctx, x, y, c->n);
        if (g.json) arr.push_back({{"x", x}, {"y", y}, {"equivalent", eq}});
        else os << x << "\t" << y << "\t" << (eq ? "equivalent" : "distinct") << "\n";
      }
      if (g.json) put(os, arr);
      return Exit::ok;
    };
  });

  struct LeastOpts {
    std::string rel;
    Nat bound = 10;
  };
  auto l = std::make_shared<LeastOpts>();
  auto lst = k->add_subcommand("least", "least elements of the kernel classes up to a bound");
  lst->add_option("--rel", l->rel, "program JSON enumerating the complement")->required();
  lst->add_option("--bound", l->bound);
  lst->callback([&, l] {
    act = [&, l](std::ostream& os) {
      auto ctx = make_kernel_context(program_from_json(load_json(l->rel)), g.budget);
      auto s = least_elements(ctx, l->bound);
      if (g.json) {
        put(os, json(std::vector<Nat>(s.begin(), s.end())));
      } else {
        bool first = true;
        for (Nat v : s) os << (first ? "" : " ") << v, first = false;
        os << "\n";
      }
      return Exit::ok;
    };
  });

  struct StageOpts {
    std::string rel;
    Nat T = 4;
  };
  auto p = std::make_shared<StageOpts>();
  auto pre = app.add_subcommand("preorder", "the set family of a pi1 preorder");
  pre->require_subcommand(1);
  auto st = pre->add_subcommand("stages", "run stages 0..T and emit the A_i family as JSON");
  st->add_option("--rel", p->rel, "program JSON enumerating the complement")->required();
  st->add_option("--T", p->T, "last stage");
  st->callback([&, p] {
    act = [&, p](std::ostream& os) {
      Pi1Approximation approx({program_from_json(load_json(p->rel)), Mode::pi1_preorder}, g.budget);
      auto fam = run_stages(approx, p->T);
      json sets = json::array();
      for (const auto& s : fam.sets) sets.push_back(std::vector<Nat>(s.begin(), s.end()));
      json fresh = json::array();
      for (const auto& f : fam.fresh) fresh.push_back({{"n", f.n}, {"stage", f.stage}, {"source", f.source}});
      put(os, {{"stages_run", fam.stages_run}, {"sets", sets}, {"fresh", fresh}});
      return Exit::ok;
    };
  });
}

// ---------------------------------------------------------------- trees

TreeLanguage lang_arg(const std::string& arg, const char* kind) {
  json j = load_json(arg);
  if (j.is_array()) {
    if (std::string(kind) == "function") return language_from_json({{"kind", "function"}, {"values", j}});
    if (std::string(kind) == "set") return language_from_json({{"kind", "set"}, {"members", j}});
  }
  return language_from_json(j);
}

void add_tree(CLI::App& app, Globals& g, Action& act) {
  auto tr = app.add_subcommand("tree", "computable trees, isomorphism and embedding");
  tr->require_subcommand(1);

  struct BuildOpts {
    std::string fn, set, lang;
    Nat depth = 4;
  };
  auto b = std::make_shared<BuildOpts>();
  auto build = tr->add_subcommand("build", "truncate a tree to a depth");
  auto o_fn = build->add_option("--fn", b->fn, "function values (array or tree JSON)");
  auto o_set = build->add_option("--set", b->set, "set members (array or tree JSON)");
  auto o_lang = build->add_option("--tree", b->lang, "tree JSON");
  o_fn->excludes(o_set)->excludes(o_lang);
  o_set->excludes(o_lang);
  build->add_option("--depth", b->depth);
  build->callback([&, b, o_fn, o_set, o_lang] {
    if (!*o_fn && !*o_set && !*o_lang) throw CLI::RequiredError("--fn, --set or --tree");
    act = [&, b](std::ostream& os) {
      auto lang = !b->fn.empty() ? lang_arg(b->fn, "function") : !b->set.empty() ? lang_arg(b->set, "set") : lang_arg(b->lang, "");
      auto t = truncate(lang, b->depth);
      if (g.json) {
        put(os, tree_to_json(t));
      } else {
        os << "nodes " << t.size() << "\ncode " << canonical_code(t) << "\n";
        for (const auto& w : t.nodes()) os << (w.empty() ? "ε" : w) << "\n";
      }
      return Exit::ok;
    };
  });

  struct PairOpts {
    std::string a, b;
    Nat depth = 4;
  };
  auto add_pair = [&](const char* name, const char* what, bool embed) {
    auto o = std::make_shared<PairOpts>();
    auto sub = tr->add_subcommand(name, what);
    sub->add_option("--a", o->a, "tree JSON")->required();
    sub->add_option("--b", o->b, "tree JSON")->required();
    sub->add_option("--depth", o->depth);
    sub->callback([&, o, embed] {
      act = [&, o, embed](std::ostream& os) {
        auto a = lang_arg(o->a, ""), b = lang_arg(o->b, "");
        bool r = embed ? embed_to_depth(a, b, o->depth) : iso_to_depth(a, b, o->depth);
        if (g.json) put(os, {{embed ? "embeds" : "isomorphic", r}, {"depth", o->depth}});
        else if (embed) os << (r ? "embeds" : "does not embed") << "\n";
        else os << (r ? "isomorphic" : "not isomorphic") << "\n";
        return r ? Exit::ok : Exit::violation;
      };
    });
  };
  add_pair("iso", "isomorphism of the depth-d truncations", false);
  add_pair("embed", "root-preserving embedding of the depth-d truncations", true);

  auto dopt = std::make_shared<BuildOpts>();
  auto dot = tr->add_subcommand("dot", "DOT drawing of a truncated tree");
  dot->add_option("--tree", dopt->lang, "tree JSON")->required();
  dot->add_option("--depth", dopt->depth);
  dot->callback([&, dopt] {
    act = [&, dopt](std::ostream& os) {
      os << to_dot(truncate(lang_arg(dopt->lang, ""), dopt->depth));
      return Exit::ok;
    };
  });
}

// ---------------------------------------------------------------- qgroup

void add_qgroup(CLI::App& app, Globals& g, Action& act) {
  auto q = app.add_subcommand("qgroup", "subgroups of the rationals");
  q->require_subcommand(1);

  struct MemberOpts {
    std::string profile, q;
  };
  auto m = std::make_shared<MemberOpts>();
  auto mem = q->add_subcommand("member", "membership of a rational");
  mem->add_option("--profile", m->profile, "profile JSON")->required();
  mem->add_option("--q", m->q, "a/b")->required();
  mem->callback([&, m] {
    act = [&, m](std::ostream& os) {
      bool in = member(profile_from_json(load_json(m->profile)), parse_rational(m->q));
      if (g.json) put(os, {{"member", in}});
      else os << (in ? "member" : "not a member") << "\n";
      return in ? Exit::ok : Exit::violation;
    };
  });

  struct PairOpts {
    std::string a, b;
  };
  auto add_pair = [&](const char* name, const char* what, bool embed) {
    auto o = std::make_shared<PairOpts>();
    auto sub = q->add_subcommand(name, what);
    sub->add_option("--a", o->a, "profile JSON")->required();
    sub->add_option("--b", o->b, "profile JSON")->required();
    sub->callback([&, o, embed] {
      act = [&, o, embed](std::ostream& os) {
        auto a = profile_from_json(load_json(o->a)), b = profile_from_json(load_json(o->b));
        auto mult = embed ? embed_multiplier(a, b) : iso_multiplier(a, b);
        if (g.json) {
          json j{{"relation", embed ? "almost included" : "almost equal"}, {"holds", mult.has_value()}};
          if (mult) j["multiplier"] = to_string(*mult);
          put(os, j);
        } else if (mult) {
          os << "multiplier " << to_string(*mult) << "\n";
        } else {
          os << (embed ? "not ⊆*" : "not =*") << "\n";
        }
        return mult ? Exit::ok : Exit::violation;
      };
    });
  };
  add_pair("iso", "multiplier m with m*A = B", false);
  add_pair("embed", "integer multiplier m with m*A inside B", true);

  auto gens = std::make_shared<std::vector<std::string>>();
  auto norm = q->add_subcommand("normalize", "profile and scaling of the group generated by rationals");
  norm->add_option("--gens", *gens, "generators a/b ...")->required();
  norm->callback([&, gens] {
    act = [&, gens](std::ostream& os) {
      std::vector<Rational> qs;
      for (const auto& s : *gens) qs.push_back(parse_rational(s));
      auto n = normalize_generators(qs);
      json j{{"profile", profile_to_json(n.profile)}, {"scaling", to_string(n.scaling)}};
      if (g.json) put(os, j);
      else os << "profile " << j["profile"].dump() << "\nscaling " << to_string(n.scaling) << "\n";
      return Exit::ok;
    };
  });
}

// ---------------------------------------------------------------- fol

void add_fol(CLI::App& app, Globals& g, Action& act) {
  auto f = app.add_subcommand("fol", "first-order encoding of nondeterministic machines");
  f->require_subcommand(1);

  struct CompileOpts {
    std::string machine, tptp;
    Nat x = 0;
  };
  auto c = std::make_shared<CompileOpts>();
  auto comp = f->add_subcommand("compile", "NAT, TRA and CONF(x) as TPTP");
  comp->add_option("--machine", c->machine, "machine JSON")->required();
  comp->add_option("--x", c->x, "input");
  comp->add_option("--tptp", c->tptp, "write the TPTP file here instead of the output");
  comp->callback([&, c] {
    act = [&, c](std::ostream& os) {
      auto m = fol::machine_from_json(load_json(c->machine));
      auto named = fol::reduce_named(m, c->x);
      auto text = fol::to_tptp_file(named);
      if (c->tptp.empty()) {
        os << text;
      } else {
        std::ofstream out(c->tptp, std::ios::binary);
        if (!out) throw Error(Errc::bad_input, "cannot write " + c->tptp);
        out << text;
        os << "wrote " << named.size() << " formulas to " << c->tptp << "\n";
      }
      return Exit::ok;
    };
  });

  struct SimOpts {
    std::string machine;
    Nat x = 0, y = 0, steps = 120;
  };
  auto s = std::make_shared<SimOpts>();
  auto sim = f->add_subcommand("simulate", "inputs y reachable from x");
  sim->add_option("--machine", s->machine, "machine JSON")->required();
  sim->add_option("--x", s->x);
  sim->add_option("--steps", s->steps, "steps per branch");
  sim->callback([&, s] {
    act = [&, s](std::ostream& os) {
      auto m = fol::machine_from_json(load_json(s->machine));
      auto r = fol::simulate(m, s->x, s->steps, g.budget);
      if (g.json) {
        json reached = json::array();
        for (const auto& [y, tr] : r.reached) reached.push_back({{"y", y}, {"trace_length", tr.steps.size()}});
        put(os, {{"x", s->x}, {"reached", reached}, {"exhausted", r.exhausted}, {"configs", r.configs_explored}});
      } else {
        os << "y\ttrace_length\n";
        for (const auto& [y, tr] : r.reached) os << y << "\t" << tr.steps.size() << "\n";
        if (r.exhausted) os << "budget exhausted: the list may be partial\n";
      }
      return r.exhausted ? Exit::budget : Exit::ok;
    };
  });

  auto t = std::make_shared<SimOpts>();
  auto chk = f->add_subcommand("check-trace", "ground-check every step of the trace from x to y");
  chk->add_option("--machine", t->machine, "machine JSON")->required();
  chk->add_option("--x", t->x);
  chk->add_option("--y", t->y);
  chk->add_option("--steps", t->steps, "steps per branch");
  chk->callback([&, t] {
    act = [&, t](std::ostream& os) {
      auto m = fol::machine_from_json(load_json(t->machine));
      auto r = fol::simulate(m, t->x, t->steps, g.budget);
      auto it = r.reached.find(t->y);
      if (it == r.reached.end()) {
        if (g.json) put(os, {{"trace", false}, {"exhausted", r.exhausted}});
        else os << "no trace from " << t->x << " to " << t->y << "\n";
        return r.exhausted ? Exit::budget : Exit::violation;
      }
      const auto& tr = it->second;
      json steps = json::array();
      bool all = true;
      for (Nat i = 0; i + 1 < tr.steps.size(); ++i) {
        auto v = fol::ground_check(m, tr, i, fol::trace_domain_bound(tr, i));
        all &= v.ok;
        std::string miss = v.missing ? fol::to_string(*v.missing) : "";
        if (g.json) {
          json j{{"step", i}, {"ok", v.ok}, {"derived", v.derived}};
          if (v.missing) j["missing"] = miss;
          steps.push_back(j);
        } else {
          os << "step " << i << (v.ok ? " ok" : " FAILED") << " (" << v.derived << " facts)";
          if (v.missing) os << " missing " << miss;
          os << "\n";
        }
      }
      if (g.json) put(os, {{"trace", true}, {"ok", all}, {"steps", steps}});
      return all ? Exit::ok : Exit::violation;
    };
  });
}

// ---------------------------------------------------------------- sigma2, diag

void add_sigma2(CLI::App& app, Globals& g, Action& act) {
  auto s = app.add_subcommand("sigma2", "sigma2 relations and the suffix construction");
  s->require_subcommand(1);

  struct VOpts {
    std::string pred;
    Nat x = 0, y = 0;
  };
  auto v = std::make_shared<VOpts>();
  auto vs = s->add_subcommand("v", "enumerate V_xy for a predicate R");
  vs->add_option("--pred", v->pred, "R predicate JSON")->required();
  vs->add_option("--x", v->x);
  vs->add_option("--y", v->y);
  vs->callback([&, v] {
    act = [&, v](std::ostream& os) {
      auto r = sigma2::r_predicate_from_json(load_json(v->pred));
      auto m = sigma2::v_enumerate(r, v->x, v->y, g.budget);
      Nat last = m.entry_steps.back();
      if (g.json)
        put(os, {{"x", v->x}, {"y", v->y}, {"steps", m.steps}, {"printed", m.printed.size()}, {"last_entry", last},
                 {"stalled", m.stalled}});
      else
        os << "printed " << m.printed.size() << " in " << m.steps << " steps, last entry at step " << last
           << (m.stalled ? ", stalled" : ", still growing") << "\n";
      return Exit::ok;
    };
  });

  struct RunOpts {
    std::string family;
    Nat stages = 3;
  };
  auto r = std::make_shared<RunOpts>();
  auto run = s->add_subcommand("run", "run the construction; one JSON line per stage");
  run->add_option("--family", r->family, "V family JSON")->required();
  run->add_option("--stages", r->stages, "last stage (at most 4)");
  run->callback([&, r] {
    act = [&, r](std::ostream& os) {
      auto fam = sigma2::family_from_json(load_json(r->family));
      auto reg = sigma2::standard_oracles();
      auto res = sigma2::run_sigma2(fam, r->stages, reg);
      for (const auto& rec : res.log) os << sigma2::to_json(rec).dump() << "\n";
      return sigma2::recheck(res, reg).empty() ? Exit::ok : Exit::violation;
    };
  });
}

void add_diag(CLI::App& app, Globals& g, Action& act) {
  auto d = app.add_subcommand("diag", "the diagonalization against uniform reductions");
  d->require_subcommand(1);
  struct RunOpts {
    std::string family;
    bool report = false, delta2 = false;
    Nat window = 1000;
  };
  auto o = std::make_shared<RunOpts>();
  auto run = d->add_subcommand("run", "dovetail the subroutines; event log and report as JSON");
  run->add_option("--family", o->family, "family JSON")->required();
  run->add_flag("--report", o->report, "append the invariant report");
  run->add_flag("--delta2", o->delta2, "track complements as well");
  run->add_option("--window", o->window, "growth window for the report");
  run->callback([&, o] {
    act = [&, o](std::ostream& os) {
      auto fam = diag::family_from_json(load_json(o->family));
      auto u = o->delta2 ? diag::run_delta2(fam, g.budget) : diag::dovetail(fam, g.budget);
      json j{{"summary", diag::summary_json(u)}};
      json log = json::array();
      for (const auto& ev : u.log) log.push_back(diag::to_json(ev));
      j["log"] = log;
      bool good = true;
      if (o->report) {
        auto rep = diag::invariant_report(u, o->window);
        j["report"] = diag::to_json(rep);
        good = rep.ok();
        if (o->delta2) {
          auto pv = diag::partition_violations(u, u.steps);
          j["partition"] = pv;
          good &= pv.empty();
        }
      }
      put(os, j);
      return good ? Exit::ok : Exit::violation;
    };
  });
}

// ---------------------------------------------------------------- verify

void add_verify(CLI::App& app, Globals& g, Action& act) {
  auto suite = std::make_shared<std::string>("all");
  auto v = app.add_subcommand("verify", "run acceptance suites");
  v->add_option("--suite", *suite, "all | relations | kernel | preorder | trees | qgroup | fol | sigma2 | diag");
  v->callback([&, suite] {
    act = [&, suite](std::ostream& os) {
      auto ids = suites::suite_criteria(*suite);
      int passed = 0;
      json arr = json::array();
      for (int id : ids) {
        auto r = suites::run_criterion(id, g.seed);
        passed += r.pass;
        if (g.json)
          arr.push_back({{"criterion", id}, {"title", r.title}, {"pass", r.pass}, {"checks", r.checks}, {"detail", r.detail}});
        else
          os << (r.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << r.title << " (" << r.detail << ")\n";
      }
      if (g.json) put(os, {{"suite", *suite}, {"seed", g.seed}, {"passed", passed}, {"total", ids.size()}, {"criteria", arr}});
      else os << "suite " << *suite << " seed " << g.seed << ": " << passed << "/" << ids.size() << " passed\n";
      return passed == static_cast<int>(ids.size()) ? Exit::ok : Exit::violation;
    };
  });
}

// a versioned JSON document standing for one command line
// relative file arguments are resolved against the directory holding that file
std::vector<std::string> spec_to_args(const json& j, const std::filesystem::path& dir) {
  static const std::set<std::string> known{"version", "command", "args", "global"};
  if (!j.is_object()) throw Error(Errc::bad_input, "spec file must be an object");
  for (const auto& [k, _] : j.items())
    if (!known.count(k)) throw Error(Errc::bad_input, "unknown field '" + k + "'");
  if (j.value("version", 0) != 1) throw Error(Errc::bad_input, "spec version must be 1");
  std::vector<std::string> args;
  auto flags = [&](const json& obj) {
    if (!obj.is_object()) throw Error(Errc::bad_input, "arguments must be an object");
    for (const auto& [k, v] : obj.items()) {
      if (v.is_boolean()) {
        if (v.get<bool>()) args.push_back("--" + k);
        continue;
      }
      args.push_back("--" + k);
      if (v.is_string()) {
        std::string a = v.get<std::string>();
        std::filesystem::path rel = dir / a;
        args.push_back(!a.empty() && a[0] != '{' && a[0] != '[' && std::filesystem::exists(rel) ? rel.string() : a);
      }
      else if (v.is_array() && !v.empty() && v[0].is_string())
        for (const auto& s : v) args.push_back(s.get<std::string>());
      else args.push_back(v.dump());
    }
  };
  for (const auto& c : j.at("command")) args.push_back(c.get<std::string>());
  if (args.empty() || args[0] == "spec") throw Error(Errc::bad_input, "spec command must name a module");
  if (j.contains("args")) flags(j["args"]);
  if (j.contains("global")) flags(j["global"]);
  return args;
}

int run_impl(const std::vector<std::string>& args, bool allow_spec) {
  CLI::App app{"crel: component-wise reducibility workbench"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  Action act;
  app.add_option("--seed", g.seed, "seed for sampled corpora");
  app.add_option("--budget", g.budget, "step budget");
  app.add_flag("--json", g.json, "JSON output");
  app.add_option("--out", g.out, "write output to this file");
  add_rel(app, g, act);
  add_kernel(app, g, act);
  add_tree(app, g, act);
  add_qgroup(app, g, act);
  add_fol(app, g, act);
  add_sigma2(app, g, act);
  add_diag(app, g, act);
  add_verify(app, g, act);
  std::string spec_file;
  if (allow_spec) {
    auto sp = app.add_subcommand("spec", "run the command described by a JSON spec file");
    sp->add_option("--file", spec_file, "spec JSON")->required();
  }

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? Exit::ok : Exit::usage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Exit::usage;
  }

  try {
    if (!spec_file.empty()) return run_impl(spec_to_args(load_json(spec_file), std::filesystem::path(spec_file).parent_path()), false);
    std::ostringstream buf;
    int code = act(buf);
    if (g.out.empty()) {
      std::cout << buf.str();
    } else {
      std::ofstream out(g.out, std::ios::binary);
      if (!out) throw Error(Errc::bad_input, "cannot write " + g.out);
      out << buf.str();
    }
    return code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: bad JSON: " << e.what() << "\n";
    return Exit::usage;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args) { return run_impl(args, true); }

}  // namespace crel::cli
