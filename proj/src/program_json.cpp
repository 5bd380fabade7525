#include "crel/program_json.hpp"

namespace crel {

namespace {

std::vector<Edge> edges_of(const nlohmann::json& arr) {
  std::vector<Edge> out;
  for (const auto& p : arr) {
    if (!p.is_array() || p.size() != 2) throw Error(Errc::bad_input, "pair must be [x,y]");
    out.push_back({p[0].get<Nat>(), p[1].get<Nat>()});
  }
  return out;
}

std::vector<Nat> params_of(const nlohmann::json& j) {
  std::vector<Nat> params;
  if (j.contains("n")) params.push_back(j["n"].get<Nat>());
  if (j.contains("labels"))
    for (const auto& v : j["labels"]) params.push_back(v.get<Nat>());
  return params;
}

}  // namespace

ProgramTable program_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) throw Error(Errc::bad_input, "program needs a kind");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "explicit") return ProgramTable::explicit_list(edges_of(j.value("pairs", nlohmann::json::array())));
  if (kind == "builtin") return ProgramTable::builtin(j.at("name").get<std::string>(), params_of(j));
  if (kind == "decider") {
    if (j.contains("accept")) return ProgramTable::decider_table(edges_of(j["accept"]));
    return ProgramTable::decider(j.at("name").get<std::string>(), params_of(j));
  }
  throw Error(Errc::bad_input, "unknown program kind " + kind);
}

nlohmann::json program_to_json(const ProgramTable& p) {
  nlohmann::json j;
  auto pairs = [](const std::vector<Edge>& es) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& e : es) a.push_back({e.x, e.y});
    return a;
  };
  switch (p.kind()) {
    case ProgramTable::Kind::explicit_list:
      j["kind"] = "explicit";
      j["pairs"] = pairs(p.pairs());
      break;
    case ProgramTable::Kind::builtin:
    case ProgramTable::Kind::decider:
      j["kind"] = p.kind() == ProgramTable::Kind::builtin ? "builtin" : "decider";
      if (p.name() == "table") {
        j["accept"] = pairs(p.pairs());
        break;
      }
      j["name"] = p.name();
      if (p.name().find("classes") != std::string::npos) {
        j["labels"] = p.params();
      } else if (!p.params().empty()) {
        j["n"] = p.params()[0];
      }
      break;
  }
  return j;
}

nlohmann::json window_to_json(const RelationWindow& w) {
  nlohmann::json j;
  j["t"] = w.bound();
  nlohmann::json a = nlohmann::json::array();
  for (const auto& e : w.edges()) a.push_back({e.x, e.y});
  j["pairs"] = a;
  j["reflexive"] = w.reflexive();
  j["symmetric"] = w.symmetric();
  j["transitive"] = w.transitive();
  return j;
}

}  // namespace crel
