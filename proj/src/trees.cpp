#include "crel/trees.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace crel {

FiniteTree FiniteTree::from_words(std::set<Word> words) {
  if (!words.count("")) throw Error(Errc::bad_input, "tree lacks the root");
  for (const auto& w : words) {
    if (w.find_first_not_of("0123456789") != Word::npos) throw Error(Errc::bad_input, "bad word " + w);
    if (!w.empty() && !words.count(w.substr(0, w.size() - 1)))
      throw Error(Errc::bad_input, "not prefix-closed at " + w);
  }
  FiniteTree t;
  t.nodes_ = std::move(words);
  return t;
}

std::vector<Word> FiniteTree::children(const Word& w) const {
  std::vector<Word> out;
  for (char c = '0'; c <= '9'; ++c)
    if (nodes_.count(w + c)) out.push_back(w + c);
  return out;
}

unsigned FiniteTree::alphabet_bound() const {
  unsigned c = 0;
  for (const auto& w : nodes_)
    for (char ch : w) c = std::max<unsigned>(c, ch - '0');
  return c;
}

bool TreeLanguage::member(const Word& w) const {
  for (std::size_t k = 0; k <= w.size(); ++k) {
    if (k > 0 && static_cast<unsigned>(w[k - 1] - '0') > c_) return false;
    auto r = raw_(w.substr(0, k));
    if (!r) throw Error(Errc::decider_budget_exhausted, "prefix of length " + std::to_string(k));
    if (!*r) return false;
  }
  return true;
}

TreeLanguage language_of_words(std::set<Word> accepted, unsigned c) {
  return TreeLanguage([acc = std::move(accepted)](const Word& w) -> std::optional<bool> { return acc.count(w) != 0; }, c);
}

TreeLanguage full_language(unsigned c) {
  return TreeLanguage([](const Word&) -> std::optional<bool> { return true; }, c);
}

TreeLanguage spine_language() {
  return TreeLanguage([](const Word& w) -> std::optional<bool> { return w.find('0') == Word::npos; }, 1);
}

TreeLanguage language_of_tree(const FiniteTree& t) { return language_of_words(t.nodes(), std::max(1u, t.alphabet_bound())); }

FiniteTree truncate(const TreeLanguage& lang, Nat d, std::size_t node_cap) {
  std::set<Word> nodes{""};
  if (!lang.member("")) throw Error(Errc::bad_input, "language rejects the root");
  std::deque<Word> frontier{""};
  while (!frontier.empty()) {
    Word w = frontier.front();
    frontier.pop_front();
    if (w.size() >= d) continue;
    for (unsigned c = 0; c <= lang.alphabet_bound(); ++c) {
      Word v = w + static_cast<char>('0' + c);
      auto r = lang.raw()(v);
      if (!r) throw Error(Errc::decider_budget_exhausted, "word " + v);
      if (!*r) continue;
      nodes.insert(v);
      if (nodes.size() > node_cap) throw Error(Errc::node_cap_exceeded, std::to_string(node_cap));
      frontier.push_back(v);
    }
  }
  return FiniteTree::from_words(std::move(nodes));
}

std::string canonical_code(const FiniteTree& t, const Word& at) {
  std::vector<std::string> kids;
  for (const auto& c : t.children(at)) kids.push_back(canonical_code(t, c));
  std::sort(kids.begin(), kids.end());
  std::string out = "(";
  for (const auto& k : kids) out += k;
  return out + ")";
}

bool iso_finite(const FiniteTree& a, const FiniteTree& b) {
  return a.size() == b.size() && canonical_code(a) == canonical_code(b);
}

namespace {

class Embedder {
public:
  Embedder(const FiniteTree& a, const FiniteTree& b) : a_(a), b_(b) {}

  bool can(const Word& u, const Word& v) {
    auto key = std::make_pair(u, v);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    auto ka = a_.children(u);
    auto kb = b_.children(v);
    bool ok = ka.size() <= kb.size() && match(ka, kb).size() == ka.size();
    memo_[key] = ok;
    return ok;
  }

  void build(const Word& u, const Word& v, Embedding& out) {
    out[u] = v;
    auto ka = a_.children(u);
    auto kb = b_.children(v);
    auto m = match(ka, kb);
    for (std::size_t i = 0; i < ka.size(); ++i) build(ka[i], kb[m[i]], out);
  }

private:
  // maximum matching of ka into kb (Kuhn); result[i] = index into kb
  std::vector<std::size_t> match(const std::vector<Word>& ka, const std::vector<Word>& kb) {
    const std::size_t none = kb.size();
    std::vector<std::vector<char>> adj(ka.size(), std::vector<char>(kb.size()));
    for (std::size_t i = 0; i < ka.size(); ++i)
      for (std::size_t j = 0; j < kb.size(); ++j) adj[i][j] = can(ka[i], kb[j]);
    std::vector<std::size_t> owner(kb.size(), none);
    std::function<bool(std::size_t, std::vector<char>&)> augment = [&](std::size_t i, std::vector<char>& seen) {
      for (std::size_t j = 0; j < kb.size(); ++j) {
        if (!adj[i][j] || seen[j]) continue;
        seen[j] = 1;
        if (owner[j] == none || augment(owner[j], seen)) {
          owner[j] = i;
          return true;
        }
      }
      return false;
    };
    std::size_t matched = 0;
    for (std::size_t i = 0; i < ka.size(); ++i) {
      std::vector<char> seen(kb.size(), 0);
      if (augment(i, seen)) ++matched;
    }
    std::vector<std::size_t> res(ka.size(), none);
    for (std::size_t j = 0; j < kb.size(); ++j)
      if (owner[j] != none) res[owner[j]] = j;
    if (matched < ka.size()) res.resize(matched);
    return res;
  }

  const FiniteTree& a_;
  const FiniteTree& b_;
  std::map<std::pair<Word, Word>, bool> memo_;
};

}  // namespace

bool verify_embedding(const FiniteTree& a, const FiniteTree& b, const Embedding& m) {
  if (m.size() != a.size()) return false;
  std::set<Word> image;
  for (const auto& [u, v] : m) {
    if (!a.contains(u) || !b.contains(v)) return false;
    if (!image.insert(v).second) return false;
    if (u.empty() != v.empty()) return false;
    if (!u.empty()) {
      auto pu = m.find(u.substr(0, u.size() - 1));
      if (pu == m.end() || pu->second != v.substr(0, v.size() - 1)) return false;
    }
  }
  return true;
}

std::optional<Embedding> root_embed(const FiniteTree& a, const FiniteTree& b) {
  Embedder e(a, b);
  if (!e.can("", "")) return std::nullopt;
  Embedding m;
  e.build("", "", m);
  if (!verify_embedding(a, b, m)) throw Error(Errc::precondition_violated, "embedding witness failed verification");
  return m;
}

bool iso_to_depth(const TreeLanguage& e, const TreeLanguage& i, Nat d, std::size_t node_cap) {
  for (Nat k = 0; k <= d; ++k)
    if (!iso_finite(truncate(e, k, node_cap), truncate(i, k, node_cap))) return false;
  return true;
}

bool embed_to_depth(const TreeLanguage& e, const TreeLanguage& i, Nat d, std::size_t node_cap) {
  for (Nat k = 0; k <= d; ++k)
    if (!root_embed(truncate(e, k, node_cap), truncate(i, k, node_cap))) return false;
  return true;
}

namespace {

// w = 1^x 0^j ?
std::optional<std::pair<Nat, Nat>> spine_shape(const Word& w) {
  std::size_t x = w.find_first_not_of('1');
  if (x == Word::npos) return std::pair<Nat, Nat>(w.size(), 0);
  if (w.find_first_not_of('0', x) != Word::npos) return std::nullopt;
  return std::pair<Nat, Nat>(x, w.size() - x);
}

}  // namespace

TreeLanguage tree_from_function(NatFunction f) {
  return TreeLanguage(
      [f = std::move(f)](const Word& w) -> std::optional<bool> {
        auto s = spine_shape(w);
        if (!s) return false;
        if (s->second == 0) return true;
        auto v = f(s->first);
        if (!v) return std::nullopt;
        return s->second <= *v;
      },
      1);
}

NatFunction function_table(std::vector<Nat> values) {
  return [v = std::move(values)](Nat x) -> std::optional<Nat> { return x < v.size() ? v[x] : 0; };
}

TreeLanguage tree_from_set(NatSet x) {
  return TreeLanguage(
      [x = std::move(x)](const Word& w) -> std::optional<bool> {
        auto s = spine_shape(w);
        if (!s || s->second > 1) return false;
        if (s->second == 0) return true;
        return x(s->first);
      },
      1);
}

NatSet finite_set(std::set<Nat> members) {
  return [m = std::move(members)](Nat v) -> std::optional<bool> { return m.count(v) != 0; };
}

std::vector<Nat> figure_one_values() { return {3, 0, 1}; }

BiEmbedReport bi_embed_iso_finite(const FiniteTree& a, const FiniteTree& b) {
  BiEmbedReport r;
  r.a_into_b = root_embed(a, b).has_value();
  r.b_into_a = root_embed(b, a).has_value();
  r.isomorphic = iso_finite(a, b);
  r.violation = r.a_into_b && r.b_into_a && !r.isomorphic;
  return r;
}

std::string to_dot(const FiniteTree& t) {
  auto name = [](const Word& w) { return w.empty() ? std::string("ε") : w; };
  std::ostringstream os;
  os << "digraph T {\n";
  std::function<void(const Word&)> walk = [&](const Word& w) {
    auto kids = t.children(w);
    std::stable_sort(kids.begin(), kids.end(), [&](const Word& p, const Word& q) {
      return canonical_code(t, p) < canonical_code(t, q);
    });
    for (const auto& k : kids) os << "  \"" << name(w) << "\" -> \"" << name(k) << "\";\n";
    for (const auto& k : kids) walk(k);
  };
  os << "  \"ε\";\n";
  walk("");
  os << "}\n";
  return os.str();
}

TreeLanguage language_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(Errc::bad_input, "tree spec must be an object");
  if (j.contains("words")) {
    std::set<Word> words;
    for (const auto& w : j["words"]) words.insert(w.get<std::string>());
    return language_of_tree(FiniteTree::from_words(std::move(words)));
  }
  const std::string kind = j.value("kind", "");
  if (kind == "function") return tree_from_function(function_table(j.at("values").get<std::vector<Nat>>()));
  if (kind == "set") {
    auto m = j.at("members").get<std::vector<Nat>>();
    return tree_from_set(finite_set({m.begin(), m.end()}));
  }
  if (kind == "full") return full_language(j.value("c", 1u));
  if (kind == "spine") return spine_language();
  throw Error(Errc::bad_input, "unknown tree kind '" + kind + "'");
}

nlohmann::json tree_to_json(const FiniteTree& t) {
  nlohmann::json j;
  j["words"] = std::vector<std::string>(t.nodes().begin(), t.nodes().end());
  j["size"] = t.size();
  j["code"] = canonical_code(t);
  return j;
}

}  // namespace crel
