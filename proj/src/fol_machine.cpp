#include <deque>
#include <regex>

#include "crel/error.hpp"
#include "crel/fol.hpp"

namespace crel::fol {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::malformed_machine, what); }

const char* tape_name(TapeId t) { return t == TapeId::work ? "work" : "print"; }
const char* move_name(Move m) { return m == Move::le ? "Le" : m == Move::ri ? "Ri" : "Stay"; }

}  // namespace

void validate(const NDTM& m) {
  static const std::regex name_re("[a-z][a-z0-9_]*");
  if (m.states.empty()) bad("no states");
  std::set<std::string> st;
  for (const auto& s : m.states) {
    if (!std::regex_match(s, name_re)) bad("state name '" + s + "'");
    if (!st.insert(s).second) bad("duplicate state " + s);
  }
  for (const auto* s : {&m.pr, &m.nd, &m.re})
    if (!st.count(*s)) bad("special state '" + *s + "' is not declared");
  if (m.pr == m.nd || m.nd == m.re || m.pr == m.re) bad("special states must differ");
  if (m.is_special(m.q0())) bad("q0 cannot be special");
  for (const auto& c : m.cleaning)
    if (!st.count(c) || m.is_special(c) || c == m.q0()) bad("bad cleaning state " + c);

  std::size_t from_pr = 0, from_re = 0;
  for (const auto& tr : m.transitions) {
    if (!st.count(tr.from) || !st.count(tr.to)) bad("transition names an unknown state");
    if (tr.read < 0 || tr.read > 1 || tr.write < 0 || tr.write > 1) bad("symbols are 0 or 1");
    const bool to_clean = m.cleaning.count(tr.to) != 0;
    if (tr.from == m.pr) {
      ++from_pr;
      if (tr.to != m.nd) bad("q_pr must step to q_nd");
    } else if (tr.from == m.nd) {
      if (m.is_special(tr.to)) bad("q_nd must step to an ordinary state");
    } else if (tr.from == m.re) {
      ++from_re;
      if (tr.to != m.q0()) bad("q_re must step to q0");
    } else if (m.cleaning.count(tr.from)) {
      if (!to_clean && tr.to != m.re) bad("cleaning state " + tr.from + " leaves the cleaning phase");
    } else {
      if (to_clean || tr.to == m.nd || tr.to == m.re) bad("ordinary state " + tr.from + " skips q_pr/q_nd");
    }
  }
  if (from_pr > 1 || from_re > 1) bad("q_pr and q_re have at most one transition");
}

NDTM machine_from_json(const nlohmann::json& j) {
  try {
    NDTM m;
    m.name = j.value("name", "");
    m.states = j.at("states").get<std::vector<std::string>>();
    const auto& sp = j.at("special");
    m.pr = sp.at("pr").get<std::string>();
    m.nd = sp.at("nd").get<std::string>();
    m.re = sp.at("re").get<std::string>();
    for (const auto& c : sp.value("cleaning", nlohmann::json::array())) m.cleaning.insert(c.get<std::string>());
    for (const auto& row : j.at("transitions")) {
      if (!row.is_array() || row.size() != 6) bad("transition rows have six fields");
      Transition tr;
      auto tape = row[0].get<std::string>();
      if (tape == "work") tr.tape = TapeId::work;
      else if (tape == "print") tr.tape = TapeId::print;
      else bad("tape '" + tape + "'");
      tr.from = row[1].get<std::string>();
      tr.read = row[2].get<int>();
      tr.write = row[3].get<int>();
      auto mv = row[4].get<std::string>();
      if (mv == "Le") tr.move = Move::le;
      else if (mv == "Ri") tr.move = Move::ri;
      else if (mv == "Stay") tr.move = Move::stay;
      else bad("move '" + mv + "'");
      tr.to = row[5].get<std::string>();
      m.transitions.push_back(tr);
    }
    validate(m);
    return m;
  } catch (const nlohmann::json::exception& e) {
    bad(e.what());
  }
}

nlohmann::json machine_to_json(const NDTM& m) {
  nlohmann::json j;
  if (!m.name.empty()) j["name"] = m.name;
  j["states"] = m.states;
  j["special"] = {{"pr", m.pr}, {"nd", m.nd}, {"re", m.re}, {"cleaning", std::vector<std::string>(m.cleaning.begin(), m.cleaning.end())}};
  auto rows = nlohmann::json::array();
  for (const auto& tr : m.transitions)
    rows.push_back({tape_name(tr.tape), tr.from, tr.read, tr.write, move_name(tr.move), tr.to});
  j["transitions"] = rows;
  return j;
}

Config initial_config(Nat x) {
  Config c;
  c.state = "q0";
  for (Nat i = 1; i <= x; ++i) c.work.insert(i);
  c.u = x;
  return c;
}

Reachability simulate(const NDTM& m, Nat x, Nat step_budget, Nat branch_budget) {
  validate(m);
  struct Node {
    Config c;
    std::size_t parent;
  };
  const std::size_t root = static_cast<std::size_t>(-1);
  std::vector<Node> nodes;
  std::set<Config> seen;
  std::deque<std::size_t> queue;
  Reachability out;

  auto push = [&](Config c, std::size_t parent) {
    if (!seen.insert(c).second) return;
    nodes.push_back({std::move(c), parent});
    queue.push_back(nodes.size() - 1);
  };
  auto trace_of = [&](std::size_t i, const Config& last) {
    Trace tr;
    tr.x = x;
    std::vector<Config> rev{last};
    for (; i != root; i = nodes[i].parent) rev.push_back(nodes[i].c);
    tr.steps.assign(rev.rbegin(), rev.rend());
    return tr;
  };

  Config start = initial_config(x);
  start.state = m.q0();
  push(start, root);

  while (!queue.empty()) {
    if (nodes.size() > branch_budget) {
      out.exhausted = true;
      break;
    }
    std::size_t i = queue.front();
    queue.pop_front();
    const Config c = nodes[i].c;
    ++out.configs_explored;

    std::vector<Config> next;
    for (const auto& tr : m.transitions) {
      if (tr.from != c.state) continue;
      Config d = c;
      d.t = c.t + 1;
      d.state = tr.to;
      if (c.state == m.pr) {
        // printing only changes the state
      } else if (c.state == m.nd) {
        if (m.cleaning.count(tr.to)) {
          if (c.print.empty()) continue;  // nothing printed, no P fact
          d.b = c.b + 1;
          d.nz = *c.print.rbegin();
        } else {
          d.b = c.b + 2;
        }
      } else if (c.state == m.re) {
        if (c.nz == 0) continue;
        Nat y = c.nz - 1;
        bool clean = c.print.empty() && c.work.size() == y && (y == 0 || *c.work.rbegin() == y);
        if (!clean) continue;
        Config r;
        r.state = m.q0();
        r.work = c.work;
        r.u = y;
        if (!out.reached.count(y)) {
          auto t = trace_of(i, r);
          t.restart_y = y;
          out.reached.emplace(y, std::move(t));
        }
        continue;  // nothing past a restart
      } else {
        auto& tape = tr.tape == TapeId::work ? d.work : d.print;
        Nat& h = tr.tape == TapeId::work ? d.h0 : d.h1;
        if (static_cast<int>(tape.count(h)) != tr.read) continue;
        if (tr.write) tape.insert(h);
        else tape.erase(h);
        if (tr.move == Move::ri) ++h;
        else if (tr.move == Move::le && h > 1) --h;
      }
      next.push_back(std::move(d));
    }
    if (c.t >= step_budget) {
      if (!next.empty()) out.exhausted = true;
      continue;
    }
    for (auto& d : next) push(std::move(d), i);
  }
  return out;
}

}  // namespace crel::fol
