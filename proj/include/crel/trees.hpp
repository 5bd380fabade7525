#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "crel/core.hpp"

namespace crel {

// words over the digits '0'..'9'; the root is the empty word
using Word = std::string;

class FiniteTree {
public:
  FiniteTree() : nodes_{""} {}
  // throws bad_input unless the set contains "" and is prefix-closed
  static FiniteTree from_words(std::set<Word> words);

  const std::set<Word>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  bool contains(const Word& w) const { return nodes_.count(w) != 0; }
  std::vector<Word> children(const Word& w) const;
  unsigned alphabet_bound() const;  // largest digit used, 0 for a bare root
  bool operator==(const FiniteTree& o) const { return nodes_ == o.nodes_; }

private:
  std::set<Word> nodes_;
};

// raw decider answer; nullopt = decider ran out of budget
using WordDecider = std::function<std::optional<bool>(const Word&)>;

class TreeLanguage {
public:
  TreeLanguage(WordDecider raw, unsigned c) : raw_(std::move(raw)), c_(c) {}
  // accepts iff the raw decider accepts every prefix, including "" and w
  bool member(const Word& w) const;
  unsigned alphabet_bound() const { return c_; }
  const WordDecider& raw() const { return raw_; }

private:
  WordDecider raw_;
  unsigned c_;
};

TreeLanguage language_of_words(std::set<Word> accepted, unsigned c);
TreeLanguage full_language(unsigned c);
TreeLanguage spine_language();
TreeLanguage language_of_tree(const FiniteTree& t);

constexpr std::size_t default_node_cap = 10000;
FiniteTree truncate(const TreeLanguage& lang, Nat d, std::size_t node_cap = default_node_cap);

// AHU canonical code with sorted child codes
std::string canonical_code(const FiniteTree& t, const Word& at = "");
bool iso_finite(const FiniteTree& a, const FiniteTree& b);

using Embedding = std::map<Word, Word>;
std::optional<Embedding> root_embed(const FiniteTree& a, const FiniteTree& b);
bool verify_embedding(const FiniteTree& a, const FiniteTree& b, const Embedding& m);

bool iso_to_depth(const TreeLanguage& e, const TreeLanguage& i, Nat d,
                  std::size_t node_cap = default_node_cap);
bool embed_to_depth(const TreeLanguage& e, const TreeLanguage& i, Nat d,
                    std::size_t node_cap = default_node_cap);

// f(x) as a step-bounded function; nullopt = out of budget
using NatFunction = std::function<std::optional<Nat>(Nat)>;
using NatSet = std::function<std::optional<bool>(Nat)>;

// prefix closure of {1^x 0^f(x)} together with the spine 1^*
TreeLanguage tree_from_function(NatFunction f);
// table values, f(x) = 0 past the end
NatFunction function_table(std::vector<Nat> values);
// the spine 1^* plus 1^x 0 for x in X
TreeLanguage tree_from_set(NatSet x);
NatSet finite_set(std::set<Nat> members);

// f(0)=3, f(1)=0, f(2)=1, 0 elsewhere
std::vector<Nat> figure_one_values();

struct BiEmbedReport {
  bool a_into_b = false;
  bool b_into_a = false;
  bool isomorphic = false;
  bool violation = false;  // bi-embeddable but not isomorphic
};
BiEmbedReport bi_embed_iso_finite(const FiniteTree& a, const FiniteTree& b);

std::string to_dot(const FiniteTree& t);

// {"words":[...]} | {"kind":"function","values":[...]} | {"kind":"set","members":[...]}
// | {"kind":"full","c":1} | {"kind":"spine"}
TreeLanguage language_from_json(const nlohmann::json& j);
nlohmann::json tree_to_json(const FiniteTree& t);

}  // namespace crel
