#include "crel/fol.hpp"

#include <functional>

#include "crel/error.hpp"

namespace crel::fol {

Term var(std::string name) { return Term{false, std::move(name)}; }
Term zero() { return Term{true, "zero"}; }

namespace {

F make(Formula f) { return std::make_shared<const Formula>(std::move(f)); }

using K = Formula::Kind;

}  // namespace

bool equal(const F& a, const F& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->pred != b->pred || a->args != b->args || a->vars != b->vars) return false;
  if (a->kids.size() != b->kids.size()) return false;
  for (std::size_t i = 0; i < a->kids.size(); ++i)
    if (!equal(a->kids[i], b->kids[i])) return false;
  return true;
}

F atom(std::string pred, std::vector<Term> args) {
  int ar = arity(pred);
  if (ar >= 0 && static_cast<std::size_t>(ar) != args.size())
    throw Error(Errc::precondition_violated, "arity of " + pred);
  Formula f;
  f.kind = K::atom;
  f.pred = std::move(pred);
  f.args = std::move(args);
  return make(std::move(f));
}

F neg(F a) {
  Formula f;
  f.kind = K::negation;
  f.kids = {std::move(a)};
  return make(std::move(f));
}

F conj(std::vector<F> kids) {
  if (kids.size() == 1) return kids.front();
  Formula f;
  f.kind = K::conj;
  f.kids = std::move(kids);
  return make(std::move(f));
}

F disj(std::vector<F> kids) {
  if (kids.size() == 1) return kids.front();
  Formula f;
  f.kind = K::disj;
  f.kids = std::move(kids);
  return make(std::move(f));
}

F imp(F a, F b) {
  Formula f;
  f.kind = K::imp;
  f.kids = {std::move(a), std::move(b)};
  return make(std::move(f));
}

F forall(std::vector<std::string> vars, F body) {
  if (vars.empty()) return body;
  Formula f;
  f.kind = K::forall;
  f.vars = std::move(vars);
  f.kids = {std::move(body)};
  return make(std::move(f));
}

F exists(std::vector<std::string> vars, F body) {
  if (vars.empty()) return body;
  Formula f;
  f.kind = K::exists;
  f.vars = std::move(vars);
  f.kids = {std::move(body)};
  return make(std::move(f));
}

std::set<std::string> free_vars(const F& f) {
  std::set<std::string> out;
  std::function<void(const F&, std::set<std::string>)> walk = [&](const F& g, std::set<std::string> bound) {
    if (g->kind == K::atom) {
      for (const auto& t : g->args)
        if (!t.is_const && !bound.count(t.name)) out.insert(t.name);
      return;
    }
    if (g->kind == K::forall || g->kind == K::exists) bound.insert(g->vars.begin(), g->vars.end());
    for (const auto& k : g->kids) walk(k, bound);
  };
  walk(f, {});
  return out;
}

bool is_closed(const F& f) { return free_vars(f).empty(); }

std::size_t count_atoms(const F& f, const std::string& pred) {
  if (f->kind == K::atom) return f->pred == pred;
  std::size_t n = 0;
  for (const auto& k : f->kids) n += count_atoms(k, pred);
  return n;
}

int arity(const std::string& pred) {
  if (pred == "c0" || pred == "c1" || pred == "h0" || pred == "h1") return 4;
  if (pred == "p") return 3;
  if (pred == "s" || pred == "l" || pred == "e") return 2;
  if (pred == "z") return 1;
  if (pred.rfind("q_", 0) == 0) return 4;
  return -1;
}

std::vector<std::string> fixed_predicates() { return {"c0", "c1", "h0", "h1", "p", "s", "z", "l", "e"}; }

std::string state_pred(const std::string& state) { return "q_" + state; }

// ---------------------------------------------------------------- NAT

namespace {

F S(Term a, Term b) { return atom("s", {std::move(a), std::move(b)}); }
F Z(Term a) { return atom("z", {std::move(a)}); }
F L(Term a, Term b) { return atom("l", {std::move(a), std::move(b)}); }
F E(Term a, Term b) { return atom("e", {std::move(a), std::move(b)}); }

std::string tape_pred(char kind, TapeId t) { return std::string(1, kind) + (t == TapeId::work ? "0" : "1"); }
TapeId other(TapeId t) { return t == TapeId::work ? TapeId::print : TapeId::work; }

}  // namespace

std::vector<Named> nat_axioms(const std::vector<std::string>& states) {
  auto x = var("x"), y = var("y"), z = var("z");
  std::vector<Named> out;
  out.push_back({"nat1", forall({"x"}, L(x, x))});
  out.push_back({"nat2", forall({"x", "y", "z"}, imp(conj({L(x, y), L(y, z)}), L(x, z)))});
  out.push_back({"nat3", forall({"x", "y"}, disj({L(x, y), L(y, x)}))});
  out.push_back({"nat4", forall({"x"}, E(x, x))});
  out.push_back({"nat5", forall({"x", "y"}, imp(E(x, y), E(y, x)))});
  out.push_back({"nat6", forall({"x", "y", "z"}, imp(conj({E(x, y), E(y, z)}), E(x, z)))});
  out.push_back({"nat7", forall({"x", "y"}, imp(conj({L(x, y), L(y, x)}), E(x, y)))});
  out.push_back({"nat8", forall({"x", "y"}, imp(conj({Z(x), L(y, x)}), Z(y)))});
  out.push_back({"nat9", forall({"x", "y"}, imp(Z(x), neg(S(y, x))))});
  out.push_back({"nat10", forall({"x"}, exists({"y"}, S(x, y)))});
  out.push_back({"nat11", forall({"x", "y", "z"}, imp(conj({S(x, y), S(x, z)}), E(y, z)))});
  out.push_back({"nat12", forall({"x"}, exists({"y"}, imp(neg(Z(x)), S(y, x))))});

  auto preds = fixed_predicates();
  for (const auto& s : states) preds.push_back(state_pred(s));
  for (const auto& p : preds) {
    int k = arity(p);
    std::vector<std::string> vars;
    std::vector<Term> xs, ys;
    std::vector<F> ante;
    for (int i = 1; i <= k; ++i) {
      auto xi = "x" + std::to_string(i), yi = "y" + std::to_string(i);
      vars.push_back(xi);
      xs.push_back(var(xi));
      ys.push_back(var(yi));
      ante.push_back(E(var(xi), var(yi)));
    }
    for (int i = 1; i <= k; ++i) vars.push_back("y" + std::to_string(i));
    ante.push_back(atom(p, xs));
    out.push_back({"nat_ind_" + p, forall(vars, imp(conj(ante), atom(p, ys)))});
  }
  return out;
}

// ---------------------------------------------------------------- TRA

namespace {

// the variable block shared by every item
const Term wm = var("wm"), st = var("st"), st1 = var("st1"), db = var("db"), db1 = var("db1"),
           db2 = var("db2"), ux = var("ux"), nz = var("nz"), wy = var("wy");

F cell(TapeId t, Term w, Term s, Term d) { return atom(tape_pred('c', t), {std::move(w), std::move(s), std::move(d), ux}); }
F head(TapeId t, Term w, Term s, Term d) { return atom(tape_pred('h', t), {std::move(w), std::move(s), std::move(d), ux}); }

// every marked cell on either tape survives into (s', d')
F copy_tapes(Term s2, Term d2) {
  return conj({imp(cell(TapeId::work, wm, st, db), cell(TapeId::work, wm, s2, d2)),
               imp(cell(TapeId::print, wm, st, db), cell(TapeId::print, wm, s2, d2))});
}
F copy_heads(Term s2, Term d2) {
  return conj({imp(head(TapeId::work, wm, st, db), head(TapeId::work, wm, s2, d2)),
               imp(head(TapeId::print, wm, st, db), head(TapeId::print, wm, s2, d2))});
}

F ordinary(const NDTM&, const Transition& tr) {
  const TapeId T = tr.tape, O = other(tr.tape);
  auto wk = var("wk"), wo = var("wo"), i = var("i"), wm1 = var("wm1");
  std::vector<F> ante{atom(state_pred(tr.from), {st, db, ux, nz}), head(T, wm, st, db)};
  ante.push_back(tr.read ? cell(T, wm, st, db) : neg(cell(T, wm, st, db)));

  F tape = forall({"wk"}, conj({imp(neg(head(T, wk, st, db)), imp(cell(T, wk, st, db), cell(T, wk, st1, db))),
                                imp(cell(O, wk, st, db), cell(O, wk, st1, db))}));
  std::vector<F> hd;
  if (tr.write) hd.push_back(cell(T, wm, st1, db));
  switch (tr.move) {
    case Move::le:
      hd.push_back(forall({"i"}, imp(Z(i), conj({imp(S(i, wm), head(T, wm, st1, db)),
                                                 imp(neg(S(i, wm)), exists({"wm1"}, conj({S(wm1, wm), head(T, wm1, st1, db)})))}))));
      break;
    case Move::ri:
      hd.push_back(exists({"wm1"}, conj({S(wm, wm1), head(T, wm1, st1, db)})));
      break;
    case Move::stay:
      hd.push_back(head(T, wm, st1, db));
      break;
  }
  hd.push_back(forall({"wo"}, imp(head(O, wo, st, db), head(O, wo, st1, db))));

  std::vector<F> cons{atom(state_pred(tr.to), {st1, db, ux, nz}), tape};
  cons.insert(cons.end(), hd.begin(), hd.end());
  return forall({"wm", "st", "db", "ux", "nz"},
                exists({"st1"}, conj({S(st, st1), imp(conj(ante), conj(cons))})));
}

F print_step(const NDTM& m, const Transition&) {
  auto wj = var("wj");
  F print = forall({"wy"}, imp(conj({cell(TapeId::print, wy, st, db),
                                     forall({"wj"}, imp(cell(TapeId::print, wj, st, db), L(wj, wy)))}),
                               atom("p", {wy, st1, ux})));
  return forall({"wm", "st", "db", "ux", "nz"},
                exists({"st1"}, conj({S(st, st1), imp(atom(state_pred(m.pr), {st, db, ux, nz}),
                                                      conj({atom(state_pred(m.nd), {st1, db, ux, nz}), copy_tapes(st1, db),
                                                            copy_heads(st1, db), print}))})));
}

F clean_branch(const NDTM& m, const Transition& tr) {
  return forall({"wm", "st", "db", "ux", "nz", "wy"},
                exists({"st1", "db1"},
                       conj({S(st, st1), S(db, db1),
                             imp(conj({atom("p", {wy, st, ux}), atom(state_pred(m.nd), {st, db, ux, nz})}),
                                 conj({atom(state_pred(tr.to), {st1, db1, ux, wy}), copy_tapes(st1, db1), copy_heads(st1, db1)}))})));
}

F continue_branch(const NDTM& m, const Transition& tr) {
  return forall({"wm", "st", "db", "ux", "nz"},
                exists({"st1", "db1", "db2"},
                       conj({S(st, st1), S(db, db1), S(db1, db2),
                             imp(atom(state_pred(m.nd), {st, db, ux, nz}),
                                 conj({atom(state_pred(tr.to), {st1, db2, ux, nz}), copy_tapes(st1, db2), copy_heads(st1, db2)}))})));
}

F restart(const NDTM& m, const Transition&) {
  auto i = var("i"), uy = var("uy"), w1 = var("w1");
  auto c0 = [&](Term w, Term s, Term d, Term u) { return atom("c0", {std::move(w), std::move(s), std::move(d), std::move(u)}); };
  return forall({"wm", "st", "db", "ux", "nz", "i"},
                exists({"uy", "w1"},
                       imp(conj({Z(i), atom(state_pred(m.re), {st, db, ux, nz})}),
                           conj({S(uy, nz), S(i, w1), atom(state_pred(m.q0()), {i, i, uy, i}),
                                 imp(c0(wm, st, db, ux), c0(wm, i, i, uy)),
                                 atom("h0", {w1, i, i, uy}), atom("h1", {w1, i, i, uy})}))));
}

}  // namespace

std::vector<Named> tra_axioms(const NDTM& m) {
  validate(m);
  std::vector<Named> out;
  std::size_t k = 0;
  for (const auto& tr : m.transitions) {
    F f;
    if (tr.from == m.pr) f = print_step(m, tr);
    else if (tr.from == m.nd) f = m.cleaning.count(tr.to) ? clean_branch(m, tr) : continue_branch(m, tr);
    else if (tr.from == m.re) f = restart(m, tr);
    else f = ordinary(m, tr);
    out.push_back({"tra" + std::to_string(++k), f});
  }
  return out;
}

// ---------------------------------------------------------------- CONF, HIST

namespace {

std::vector<F> chain(const std::string& prefix, Nat n, std::vector<std::string>& vars) {
  std::vector<F> out;
  Term prev = zero();
  for (Nat i = 1; i <= n; ++i) {
    auto v = prefix + std::to_string(i);
    vars.push_back(v);
    out.push_back(S(prev, var(v)));
    prev = var(v);
  }
  return out;
}

Term num(const std::string& prefix, Nat i) { return i == 0 ? zero() : var(prefix + std::to_string(i)); }

}  // namespace

F conf_formula(Nat x) {
  std::vector<std::string> vars;
  std::vector<F> body{Z(zero())};
  Nat cells = std::max<Nat>(x, 1);  // the heads sit on cell 1 even for input 0
  auto ws = chain("w", cells, vars);
  auto us = chain("u", x, vars);
  body.insert(body.end(), ws.begin(), ws.end());
  body.insert(body.end(), us.begin(), us.end());
  Term u = num("u", x), w1 = var("w1");
  body.push_back(atom(state_pred("q0"), {zero(), zero(), u, zero()}));
  body.push_back(atom("h0", {w1, zero(), zero(), u}));
  body.push_back(atom("h1", {w1, zero(), zero(), u}));
  for (Nat i = 1; i <= x; ++i) body.push_back(atom("c0", {num("w", i), zero(), zero(), u}));
  return exists(vars, conj(body));
}

namespace {

F conf_for(const NDTM& m, Nat x) {
  // conf_formula names the start state q0; rename for machines that use another name
  F f = conf_formula(x);
  if (m.q0() == "q0") return f;
  std::function<F(const F&)> ren = [&](const F& g) -> F {
    if (g->kind == K::atom) return g->pred == state_pred("q0") ? atom(state_pred(m.q0()), g->args) : g;
    Formula c = *g;
    for (auto& k : c.kids) k = ren(k);
    return make(std::move(c));
  };
  return ren(f);
}

std::vector<F> formulas(const std::vector<Named>& v) {
  std::vector<F> out;
  for (const auto& n : v) out.push_back(n.formula);
  return out;
}

}  // namespace

F reduce_formula(const NDTM& m, Nat x) {
  return conj({conj(formulas(nat_axioms(m.states))), conj(formulas(tra_axioms(m))), conf_for(m, x)});
}

std::vector<Named> reduce_named(const NDTM& m, Nat x) {
  auto out = nat_axioms(m.states);
  auto tra = tra_axioms(m);
  out.insert(out.end(), tra.begin(), tra.end());
  out.push_back({"conf", conf_for(m, x)});
  return out;
}

F hist_block(const Config& c) {
  Nat top = std::max({c.h0, c.h1, c.t, c.b, c.u, c.nz});
  if (!c.work.empty()) top = std::max(top, *c.work.rbegin());
  if (!c.print.empty()) top = std::max(top, *c.print.rbegin());
  std::vector<std::string> vars;
  std::vector<F> body{Z(zero())};
  auto ns = chain("n", top, vars);
  body.insert(body.end(), ns.begin(), ns.end());
  auto n = [](Nat i) { return num("n", i); };
  body.push_back(atom(state_pred(c.state), {n(c.t), n(c.b), n(c.u), n(c.nz)}));
  body.push_back(atom("h0", {n(c.h0), n(c.t), n(c.b), n(c.u)}));
  body.push_back(atom("h1", {n(c.h1), n(c.t), n(c.b), n(c.u)}));
  for (Nat w : c.work) body.push_back(atom("c0", {n(w), n(c.t), n(c.b), n(c.u)}));
  for (Nat w : c.print) body.push_back(atom("c1", {n(w), n(c.t), n(c.b), n(c.u)}));
  return exists(vars, conj(body));
}

F hist_formula(const NDTM& m, const Trace& tr, Nat t) {
  if (t >= tr.steps.size()) throw Error(Errc::index_out_of_range, "step " + std::to_string(t));
  F nat = conj(formulas(nat_axioms(m.states)));
  F tra = conj(formulas(tra_axioms(m)));
  if (tr.restart_y && t == tr.restart_index()) return conj({nat, tra, conf_for(m, *tr.restart_y)});
  return conj({nat, tra, hist_block(tr.steps[t])});
}

}  // namespace crel::fol
