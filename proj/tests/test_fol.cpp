#include <doctest.h>

#include <fstream>
#include <sstream>

#include "corpus.hpp"
#include "crel/error.hpp"
#include "crel/tptp.hpp"

using namespace crel;
using namespace crel::fol;

namespace {

std::vector<Config> corruptions(const Config& c, const NDTM& m) {
  std::vector<Config> out;
  Config a = c;
  a.h0 += 1;
  out.push_back(a);
  Config b = c;
  b.h1 += 1;
  out.push_back(b);
  for (const auto& s : m.states)
    if (s != c.state) {
      Config d = c;
      d.state = s;
      out.push_back(d);
      break;
    }
  Config e = c;
  Nat cell = 1;
  while (e.work.count(cell)) ++cell;
  e.work.insert(cell);
  out.push_back(e);
  return out;
}

}  // namespace

TEST_CASE("nat axioms") {
  auto nat = nat_axioms({"q0", "q1", "pr"});
  CHECK(nat.size() == 12 + 9 + 3);
  CHECK(to_tptp_line(nat[2]) == "fof(nat3, axiom, ![X,Y]: (l(X,Y) | l(Y,X))).");
  for (const auto& n : nat) CHECK(is_closed(n.formula));
  for (Nat d : {1, 5, 30}) CHECK(nat_holds_on(d));
}

TEST_CASE("tptp round trip") {
  for (const auto& toy : corpus::toy_machines()) {
    for (Nat x : {0, 1, 3}) {
      auto named = reduce_named(toy.machine, x);
      auto text = to_tptp_file(named);
      auto back = parse_tptp_file(text);
      REQUIRE(back.size() == named.size());
      for (std::size_t i = 0; i < named.size(); ++i) {
        CHECK(back[i].name == named[i].name);
        CHECK(equal(back[i].formula, named[i].formula));
      }
      F whole = reduce_formula(toy.machine, x);
      CHECK(equal(parse_tptp_formula(to_tptp(whole)), whole));
    }
  }
  CHECK_THROWS_AS(parse_tptp_formula("(p(X) & q(X) | r(X))"), Error);
  CHECK_THROWS_AS(parse_tptp_formula("l(X)"), Error);
  CHECK_THROWS_AS(parse_tptp_formula("![x]: l(X,X)"), Error);
}

TEST_CASE("reduce formula shape") {
  const auto& leq = corpus::toy_machine("leq").machine;
  F f = reduce_formula(leq, 2);
  REQUIRE(f->kind == Formula::Kind::conj);
  CHECK(f->kids.size() == 3);
  CHECK(is_closed(f));
  CHECK(tra_axioms(leq).size() == leq.transitions.size());
  // x=1: one w and one u variable
  F c1 = conf_formula(1);
  CHECK(c1->vars == std::vector<std::string>{"w1", "u1"});
  CHECK(count_atoms(conf_formula(3), "c0") == 3);
  CHECK(count_atoms(conf_formula(0), "c0") == 0);

  NDTM one;
  one.states = {"q0", "q1", "pr", "nd", "re"};
  one.pr = "pr";
  one.nd = "nd";
  one.re = "re";
  one.transitions = {{TapeId::work, "q0", 0, 1, Move::ri, "q1"}};
  auto tra = tra_axioms(one);
  REQUIRE(tra.size() == 1);
  CHECK(tra[0].formula->kind == Formula::Kind::forall);
}

TEST_CASE("malformed machines") {
  auto j = machine_to_json(corpus::toy_machine("leq").machine);
  CHECK(machine_to_json(machine_from_json(j)) == j);
  auto bad = j;
  bad["transitions"].push_back({"work", "q0", 0, 0, "Stay", "re"});
  CHECK_THROWS_AS(machine_from_json(bad), Error);
  bad = j;
  bad["special"]["pr"] = "nope";
  CHECK_THROWS_AS(machine_from_json(bad), Error);
  bad = j;
  bad["transitions"].push_back({"tape", "q0", 0, 0, "Stay", "a1"});
  CHECK_THROWS_AS(machine_from_json(bad), Error);
}

TEST_CASE("shipped machine files match the corpus") {
  for (const auto& toy : corpus::toy_machines()) {
    std::ifstream in(std::string(CREL_DATA_DIR) + "/machines/" + toy.machine.name + ".json");
    REQUIRE(in);
    auto j = nlohmann::json::parse(in);
    CHECK(machine_to_json(machine_from_json(j)) == machine_to_json(toy.machine));
  }
}

TEST_CASE("simulation matches the intended relation") {
  for (const auto& toy : corpus::toy_machines()) {
    for (Nat x = 0; x <= 4; ++x) {
      auto r = simulate(toy.machine, x, 120, 200000);
      for (Nat y = 0; y <= 4; ++y) {
        INFO(toy.machine.name << " " << x << " " << y);
        CHECK((r.reached.count(y) != 0) == toy.intended(x, y));
      }
    }
  }
  auto r = simulate(corpus::toy_machine("eq").machine, 2, 200, 1000);
  REQUIRE(r.reached.count(2));
  const auto& tr = r.reached.at(2);
  CHECK(tr.steps.front() == [] { auto c = initial_config(2); return c; }());
  CHECK(tr.steps.back().t == 0);
  CHECK(!r.exhausted);
  CHECK(simulate(corpus::toy_machine("silent").machine, 1, 50, 100).reached.empty());
}

TEST_CASE("hist grounding") {
  const auto& leq = corpus::toy_machine("leq").machine;
  auto r = simulate(leq, 1, 100, 100000);
  const auto& tr = r.reached.at(2);
  for (Nat t = 0; t + 1 < tr.steps.size(); ++t)
    CHECK(ground_atoms(hist_block(tr.steps[t])) == config_atoms(tr.steps[t]));
  // HIST(x,0) carries the content of CONF(x); the restart carries CONF(y)
  CHECK(ground_atoms(hist_formula(leq, tr, 0)) == ground_atoms(conf_formula(1)));
  CHECK(ground_atoms(hist_formula(leq, tr, tr.restart_index())) == ground_atoms(conf_formula(2)));
  CHECK(config_atoms(tr.steps.back()) == ground_atoms(conf_formula(2)));
  CHECK_THROWS_AS(hist_formula(leq, tr, tr.steps.size()), Error);
}

TEST_CASE("ground check follows every step and rejects corruptions") {
  std::size_t checked = 0;
  for (const auto& toy : corpus::toy_machines()) {
    for (Nat x = 0; x <= 2; ++x) {
      auto r = simulate(toy.machine, x, 20, 100000);
      for (const auto& [y, tr] : r.reached) {
        if (tr.steps.size() > 21) continue;
        for (Nat t = 0; t + 1 < tr.steps.size(); ++t) {
          Nat d = trace_domain_bound(tr, t);
          REQUIRE(d <= 30);
          INFO(toy.machine.name << " x=" << x << " y=" << y << " t=" << t);
          auto v = ground_check(toy.machine, tr, t, d);
          CHECK_MESSAGE(v.ok, (v.missing ? to_string(*v.missing) : std::string("nat")));
          ++checked;
          for (const auto& bad : corruptions(tr.steps[t + 1], toy.machine)) {
            Trace c = tr;
            c.steps[t + 1] = bad;
            CHECK(!ground_check(toy.machine, c, t, trace_domain_bound(c, t)).ok);
          }
        }
      }
    }
  }
  CHECK(checked > 30);
}
