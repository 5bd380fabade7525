#include "suites.hpp"

#include <chrono>
#include <functional>
#include <random>
#include <sstream>

#include "corpus.hpp"
#include "crel/diag.hpp"
#include "crel/fol.hpp"
#include "crel/kernel.hpp"
#include "crel/qgroup.hpp"
#include "crel/sigma2.hpp"
#include "crel/tptp.hpp"
#include "crel/trees.hpp"
#include "oracles.hpp"

namespace crel::suites {

namespace o = crel::oracle;

namespace {

class Tally {
public:
  template <typename Msg>
  void check(bool ok, Msg&& msg) {
    ++n_;
    if (!ok && first_.empty()) first_ = msg();
    bad_ += !ok;
  }
  void fail(const std::string& why) { check(false, [&] { return why; }); }
  bool ok() const { return bad_ == 0; }
  std::size_t checks() const { return n_; }
  std::string detail() const {
    if (ok()) return std::to_string(n_) + " checks";
    return std::to_string(bad_) + "/" + std::to_string(n_) + " failed; first: " + first_;
  }

private:
  std::size_t n_ = 0, bad_ = 0;
  std::string first_;
};

template <typename... T>
std::string cat(const T&... parts) {
  std::ostringstream s;
  (s << ... << parts);
  return s.str();
}

// ---------------------------------------------------------------- Pi1 corpus

struct Pi1Case {
  std::string label;
  ProgramTable complement;
};

std::vector<Pi1Case> pi1_corpus() {
  return {
      {"equality", ProgramTable::builtin("co-eq")},
      {"full", ProgramTable::builtin("co-all")},
      {"mod 2", ProgramTable::builtin("co-id-mod", {2})},
      {"mod 3", ProgramTable::builtin("co-id-mod", {3})},
      {"mod 5", ProgramTable::builtin("co-id-mod", {5})},
      {"labelled", ProgramTable::builtin("co-classes", {0, 1, 0, 1, 2, 2, 0, 3, 3, 4, 4, 4, 1})},
  };
}

constexpr Nat kernel_budget = 400000;

void c1(Tally& t) {
  auto corpus = pi1_corpus();
  t.check(corpus.size() >= 5, [] { return std::string("corpus too small"); });
  for (const auto& c : corpus) {
    Pi1Approximation approx({c.complement, Mode::pi1_equivalence}, 1000);
    t.check(approx.window(20).steps <= 1000, [&] { return c.label + ": window 20 settles late"; });
    auto naive = o::naive_settle(c.complement, false, 20, 1000);
    if (!naive) {
      t.fail(c.label + ": no settled window within 1000 steps");
      continue;
    }
    auto ctx = make_kernel_context(c.complement, kernel_budget);
    for (Nat x = 0; x <= 20; ++x)
      for (Nat y = 0; y <= 20; ++y)
        t.check(kernel_equiv(ctx, x, y, 64) == naive->window[x][y],
                [&] { return cat(c.label, ": kernel_equiv(", x, ",", y, ")"); });
  }
}

void c2(Tally& t) {
  for (const auto& c : pi1_corpus()) {
    auto ctx = make_kernel_context(c.complement, kernel_budget);
    for (Nat n = 1; n <= 30; ++n) {
      auto naive = o::naive_settle(c.complement, false, n, kernel_budget);
      if (!naive) {
        t.fail(cat(c.label, ": window ", n, " unsettled"));
        continue;
      }
      for (Nat x = 0; x < n; ++x)
        t.check(kernel_f(ctx, x, n) == o::class_min(naive->window, x),
                [&] { return cat(c.label, ": f(", x, ",", n, ")"); });
    }
  }
}

void c3(Tally& t) {
  for (const auto& c : pi1_corpus()) {
    auto ctx = make_kernel_context(c.complement, kernel_budget);
    auto naive = o::naive_settle(c.complement, false, 20, kernel_budget);
    if (!naive) {
      t.fail(c.label + ": unsettled");
      continue;
    }
    auto minima = o::class_minima(naive->window);
    std::set<Nat> expect(minima.begin(), minima.end());
    t.check(least_elements(ctx, 20) == expect, [&] { return c.label + ": least elements differ"; });
  }
}

void c4(Tally& t, Nat seed) {
  std::mt19937_64 rng(seed);
  for (const auto& c : pi1_corpus()) {
    auto ctx = make_kernel_context(c.complement, kernel_budget);
    std::vector<std::string> p;
    for (Nat x = 0; x <= 12; ++x) p.push_back(pad_p(ctx, x));
    for (Nat x = 0; x <= 8; ++x)
      for (Nat n = 0; n <= 8; ++n)
        t.check(padded_g(ctx, p[x], p[n]) == kernel_f(ctx, x, n),
                [&] { return cat(c.label, ": g(p(", x, "),p(", n, "))"); });

    // image test: the leading ones of p(x) spell x
    auto in_image = [&](const std::string& s) {
      Nat ones = 0;
      while (ones < s.size() && s[ones] == '1') ++ones;
      if (ones <= 12) return s == p[ones];
      // p(x) = 1^x 0 1^h(x); avoid building it for large x
      if (ones == s.size() || s.find('0', ones + 1) != std::string::npos) return false;
      auto h = step_count_h_bounded(ctx, ones, s.size());
      return h && *h == s.size() - ones - 1;
    };
    int made = 0;
    while (made < 100) {
      std::string s;
      const std::string& base = p[rng() % 9];
      switch (rng() % 5) {
        case 0:
          for (int k = rng() % 40; k > 0; --k) s += "01"[rng() % 2];
          break;
        case 1:
          s = base;
          s[rng() % s.size()] ^= 1;
          break;
        case 2: s = base.substr(0, rng() % base.size()); break;
        case 3: s = base + "01"[rng() % 2]; break;
        default: s = base + "2"; break;
      }
      if (in_image(s)) continue;
      ++made;
      const std::string& good = p[rng() % 9];
      t.check(padded_g(ctx, s, good) == 0 && padded_g(ctx, good, s) == 0 && padded_g(ctx, s, s) == 0,
              [&] { return c.label + ": g nonzero on malformed '" + s.substr(0, 40) + "'"; });
    }
  }
}

// ---------------------------------------------------------------- trees

struct TreeCorpus {
  std::vector<o::ParentArray> parents;
  std::vector<FiniteTree> trees;
};

TreeCorpus tree_corpus() {
  TreeCorpus c;
  c.parents = o::rooted_trees_up_to(7);
  for (const auto& p : c.parents) c.trees.push_back(o::to_tree(p));
  return c;
}

std::string parent_word(const Word& w) { return w.substr(0, w.size() - 1); }

// injective, root to root, children to children
bool witness_holds(const FiniteTree& a, const FiniteTree& b, const Embedding& m) {
  std::set<Word> image;
  for (const auto& w : a.nodes()) {
    auto it = m.find(w);
    if (it == m.end() || !b.contains(it->second) || !image.insert(it->second).second) return false;
    if (w.empty()) {
      if (!it->second.empty()) return false;
      continue;
    }
    const Word& img = it->second;
    if (img.empty() || m.at(parent_word(w)) != parent_word(img)) return false;
  }
  return m.size() == a.size();
}

void c5(Tally& t) {
  auto c = tree_corpus();
  t.check(c.trees.size() == 85, [&] { return cat("corpus has ", c.trees.size(), " trees"); });
  for (std::size_t i = 0; i < c.trees.size(); ++i)
    for (std::size_t j = 0; j < c.trees.size(); ++j)
      t.check(iso_finite(c.trees[i], c.trees[j]) == o::brute_iso(c.parents[i], c.parents[j]),
              [&] { return cat("iso(", i, ",", j, ")"); });
}

void c6(Tally& t) {
  auto c = tree_corpus();
  for (std::size_t i = 0; i < c.trees.size(); ++i)
    for (std::size_t j = 0; j < c.trees.size(); ++j) {
      auto w = root_embed(c.trees[i], c.trees[j]);
      t.check(w.has_value() == o::brute_embed(c.parents[i], c.parents[j]),
              [&] { return cat("embed(", i, ",", j, ")"); });
      if (w) t.check(witness_holds(c.trees[i], c.trees[j], *w), [&] { return cat("witness(", i, ",", j, ")"); });
    }
}

void c7(Tally& t) {
  auto c = tree_corpus();
  for (std::size_t i = 0; i < c.trees.size(); ++i)
    for (std::size_t j = 0; j < c.trees.size(); ++j) {
      auto r = bi_embed_iso_finite(c.trees[i], c.trees[j]);
      t.check(!r.violation, [&] { return cat("violation at (", i, ",", j, ")"); });
      bool both = o::brute_embed(c.parents[i], c.parents[j]) && o::brute_embed(c.parents[j], c.parents[i]);
      t.check(!both || o::brute_iso(c.parents[i], c.parents[j]),
              [&] { return cat("brute bi-embedding without iso at (", i, ",", j, ")"); });
      t.check(r.a_into_b == o::brute_embed(c.parents[i], c.parents[j]) && r.isomorphic == both,
              [&] { return cat("report fields at (", i, ",", j, ")"); });
    }
}

void c8(Tally& t) {
  const std::vector<Nat> drawn{3, 0, 1};  // branch lengths below 0, 1, 11
  auto values = figure_one_values();
  t.check(values == drawn, [] { return std::string("figure values"); });
  auto fig = tree_from_function(function_table(values));
  auto f = [&](Nat x) { return x < drawn.size() ? drawn[x] : 0; };
  auto expected = [&](const Word& w) {
    Nat ones = 0;
    while (ones < w.size() && w[ones] == '1') ++ones;
    for (Nat k = ones; k < w.size(); ++k)
      if (w[k] != '0') return false;
    return w.size() - ones <= f(ones);
  };
  std::vector<Word> layer{""};
  for (int len = 0; len <= 5; ++len) {
    std::vector<Word> next;
    for (const auto& w : layer) {
      t.check(fig.member(w) == expected(w), [&] { return "membership of '" + w + "'"; });
      for (char ch : {'0', '1', '2'}) next.push_back(w + ch);
    }
    layer = std::move(next);
  }
}

// ---------------------------------------------------------------- subgroups

const std::vector<Nat>& small_primes() {
  static const std::vector<Nat> ps = [] {
    std::vector<Nat> v;
    for (Nat p = 2; p <= 100; ++p) {
      bool prime = true;
      for (Nat d = 2; d * d <= p; ++d) prime &= p % d != 0;
      if (prime) v.push_back(p);
    }
    return v;
  }();
  return ps;
}

PrimePowerProfile random_profile(std::mt19937_64& rng) {
  const auto& ps = small_primes();
  std::map<Nat, Exponent> ex;
  for (int k = rng() % 11; k > 0; --k)
    ex[ps[rng() % ps.size()]] = rng() % 4 == 0 ? Exponent::inf() : Exponent::of(rng() % 6);
  return PrimePowerProfile(rng() % 4 == 0 ? Exponent::inf() : Exponent::of(0), ex);
}

PrimePowerProfile perturb(const PrimePowerProfile& a, std::mt19937_64& rng) {
  const auto& ps = small_primes();
  std::map<Nat, Exponent> ex;
  for (const auto& [p, e] : a.exceptions()) ex[p] = e;
  for (int k = 1 + rng() % 2; k > 0; --k) {
    Nat p = ps[rng() % ps.size()];
    Exponent cur = a.at(p);
    // finite tweaks keep almost-equality; toggling infinity breaks it
    ex[p] = rng() % 3 == 0 ? (cur.infinite ? Exponent::of(rng() % 6) : Exponent::inf()) : Exponent::of(rng() % 6);
  }
  ex.erase(0);
  std::map<Nat, Exponent> kept;
  for (const auto& [p, e] : ex)
    if (!(e == a.default_exponent())) kept[p] = e;
  return PrimePowerProfile(a.default_exponent(), kept);
}

Rational sample_member(const PrimePowerProfile& a, std::mt19937_64& rng) {
  static const Nat pool[] = {2, 3, 5, 7, 11, 13, 29, 53, 97, 101, 103};
  std::map<Nat, unsigned> pick;
  for (int k = rng() % 4; k > 0; --k) {
    Nat p = pool[rng() % std::size(pool)];
    Exponent e = a.at(p);
    unsigned top = e.infinite ? 5 : std::min(e.k, 5u);
    pick[p] = top ? rng() % (top + 1) : 0;
  }
  BigInt den = 1;
  for (auto [p, k] : pick)
    for (unsigned i = 0; i < k; ++i) den *= p;
  return Rational(BigInt(static_cast<long long>(rng() % 61) - 30), den);
}

void c9(Tally& t, Nat seed) {
  std::mt19937_64 rng(seed);
  int iso_seen = 0, emb_seen = 0;
  for (int i = 0; i < 120; ++i) {
    auto a = random_profile(rng);
    auto b = i % 2 ? perturb(a, rng) : random_profile(rng);
    bool ab = o::finite_difference(a, b), ba = o::finite_difference(b, a);
    auto im = iso_multiplier(a, b);
    auto em = embed_multiplier(a, b);
    t.check(im.has_value() == (ab && ba), [&] { return cat("iso multiplier presence, pair ", i); });
    t.check(em.has_value() == ab, [&] { return cat("embed multiplier presence, pair ", i); });
    t.check(almost_equal(a, b) == (ab && ba), [&] { return cat("almost_equal, pair ", i); });
    t.check(almost_included(a, b) == ab, [&] { return cat("almost_included, pair ", i); });
    t.check(bi_embeddable(a, b) == (ab && ba), [&] { return cat("bi_embeddable, pair ", i); });
    if (im) {
      ++iso_seen;
      for (int k = 0; k < 50; ++k) {
        Rational x = sample_member(a, rng), y = sample_member(b, rng);
        t.check(o::member_by_factoring(b, *im * x) && o::member_by_factoring(a, y / *im), [&] {
          return cat("iso multiplier ", to_string(*im), " on pair ", i, " ", profile_to_json(a).dump(), " ",
                     profile_to_json(b).dump(), " x=", to_string(x), " y=", to_string(y));
        });
      }
    }
    if (em) {
      ++emb_seen;
      t.check(boost::multiprecision::denominator(*em) == 1, [&] { return cat("non-integer multiplier, pair ", i); });
      for (int k = 0; k < 50; ++k) {
        Rational x = sample_member(a, rng);
        t.check(o::member_by_factoring(b, *em * x), [&] { return cat("embed multiplier on pair ", i); });
      }
    }
  }
  t.check(iso_seen > 10 && emb_seen > iso_seen, [&] { return cat("degenerate corpus: ", iso_seen, " iso, ", emb_seen, " embed"); });
}

// independent reading of a code: factor code+1 over the primes in order
struct CodeOracle {
  std::vector<Rational> w;
  std::vector<Rational> value;
  std::map<Rational, Nat> least;

  CodeOracle(const EnumeratedProfile& src, Nat stages, Nat budget) {
    std::vector<Nat> primes;
    for (Nat n = 2; primes.size() < 64; ++n) {
      bool prime = true;
      for (Nat p : primes) {
        if (p * p > n) break;
        prime &= n % p != 0;
      }
      if (prime) primes.push_back(n);
    }
    for (Nat s = 0; s < stages; ++s) {
      auto e = src.source.emit(s);
      if (!e || e->y == 0) {
        w.push_back(0);
        continue;
      }
      BigInt base = e->x == 0 ? 1 : primes.at(e->x - 1), den = 1;
      for (Nat k = 0; k < e->y; ++k) den *= base;
      w.push_back(Rational(BigInt(1), den));
    }
    for (Nat code = 0; code <= budget; ++code) {
      Nat m = code + 1;
      Rational sum = 0;
      for (std::size_t s = 0; m > 1 && s < primes.size(); ++s) {
        long long e = 0;
        while (m % primes[s] == 0) {
          m /= primes[s];
          ++e;
        }
        long long z = e % 2 ? (e + 1) / 2 : -e / 2;
        if (s < w.size()) sum += Rational(z) * w[s];
      }
      value.push_back(sum);
      least.emplace(sum, code);
    }
  }
  std::optional<Nat> code_of(const Rational& q) const {
    auto it = least.find(q);
    if (it == least.end()) return std::nullopt;
    return it->second;
  }
};

void c10(Tally& t, Nat seed) {
  std::mt19937_64 rng(seed);
  const Nat budget = 6000, stages = 6;
  std::vector<std::pair<std::string, EnumeratedProfile>> groups{
      {"Z", {ProgramTable::explicit_list({})}},
      {"Z[1/2] step", {ProgramTable::explicit_list({{1, 1}})}},
      {"mixed", {ProgramTable::explicit_list({{1, 1}, {1, 2}, {2, 1}, {0, 3}})}},
      {"enumerated", enumerate_profile(PrimePowerProfile(Exponent::of(0), {{5, Exponent::inf()}, {7, Exponent::of(1)}}), stages)},
  };
  for (const auto& [label, src] : groups) {
    EncodedGroup g(src, stages, budget);
    CodeOracle ref(src, stages, budget);
    const std::string& name = label;
    t.check(g.stage_elements() == ref.w, [&] { return name + ": stage elements"; });
    auto sum = [&](Nat a, Nat b) -> std::optional<Nat> {
      auto got = g.oplus(a, b);
      auto want = ref.code_of(ref.value[a] + ref.value[b]);
      t.check(got == want, [&] { return cat(name, ": oplus(", a, ",", b, ")"); });
      return got;
    };
    t.check(g.is_identity(0) && ref.value[0] == 0, [&] { return name + ": code 0 is not the identity"; });
    for (int k = 0; k < 200; ++k) {
      Nat a = rng() % (budget + 1), b = rng() % (budget + 1), c = rng() % (budget + 1);
      t.check(g.interp(a) == ref.value[a], [&] { return cat(name, ": I(", a, ")"); });
      // identity
      auto a0 = sum(a, 0);
      t.check(a0 && ref.value[*a0] == ref.value[a], [&] { return cat(name, ": identity at ", a); });
      // inverse
      auto inv = g.ominus(a);
      t.check(inv == ref.code_of(-ref.value[a]), [&] { return cat(name, ": ominus(", a, ")"); });
      if (inv) {
        auto z = sum(a, *inv);
        t.check(z && g.is_identity(*z), [&] { return cat(name, ": inverse at ", a); });
      }
      // additivity, then associativity through I
      auto ab = sum(a, b);
      if (ab) t.check(ref.value[*ab] == ref.value[a] + ref.value[b], [&] { return cat(name, ": additivity at ", a, ",", b); });
      auto bc = sum(b, c);
      if (ab && bc) {
        auto l = sum(*ab, c), r = sum(a, *bc);
        t.check(l == r, [&] { return cat(name, ": associativity at ", a, ",", b, ",", c); });
      }
    }
  }
}

// ---------------------------------------------------------------- fol

std::vector<fol::Config> corruptions(const fol::Config& c, const fol::NDTM& m) {
  std::vector<fol::Config> out;
  fol::Config a = c;
  a.h0 += 1;
  out.push_back(a);
  fol::Config b = c;
  b.h1 += 1;
  out.push_back(b);
  for (const auto& s : m.states)
    if (s != c.state) {
      fol::Config d = c;
      d.state = s;
      out.push_back(d);
      break;
    }
  fol::Config e = c;
  Nat cell = 1;
  while (e.work.count(cell)) ++cell;
  e.work.insert(cell);
  out.push_back(e);
  return out;
}

void c11(Tally& t) {
  for (const auto& toy : corpus::toy_machines()) {
    const auto& m = toy.machine;
    auto nat = fol::nat_axioms(m.states);
    t.check(nat.size() == 12 + fol::fixed_predicates().size() + m.states.size(),
            [&] { return m.name + ": NAT size"; });
    for (std::size_t i = 0; i < 12 && i < nat.size(); ++i)
      t.check(nat[i].name == cat("nat", i + 1), [&] { return m.name + ": NAT order"; });
    for (std::size_t i = 12; i < nat.size(); ++i)
      t.check(nat[i].name.rfind("nat_ind_", 0) == 0, [&] { return m.name + ": indiscernibility names"; });

    for (Nat x = 0; x <= 4; ++x) {
      auto named = fol::reduce_named(m, x);
      auto back = fol::parse_tptp_file(fol::to_tptp_file(named));
      bool same = back.size() == named.size();
      for (std::size_t i = 0; same && i < named.size(); ++i)
        same = back[i].name == named[i].name && fol::equal(back[i].formula, named[i].formula);
      t.check(same, [&] { return cat(m.name, ": round trip at x=", x); });
      auto whole = fol::reduce_formula(m, x);
      t.check(fol::equal(fol::parse_tptp_formula(fol::to_tptp(whole)), whole),
              [&] { return cat(m.name, ": whole-formula round trip at x=", x); });
    }

    for (Nat x = 0; x <= 2; ++x) {
      auto r = fol::simulate(m, x, 20, 100000);
      for (const auto& [y, tr] : r.reached) {
        if (tr.steps.size() > 21) continue;
        for (Nat s = 0; s + 1 < tr.steps.size(); ++s) {
          Nat d = fol::trace_domain_bound(tr, s);
          t.check(d <= 30, [&] { return cat(m.name, ": domain ", d); });
          t.check(fol::ground_check(m, tr, s, d).ok, [&] { return cat(m.name, " x=", x, " y=", y, " step ", s); });
          for (const auto& bad : corruptions(tr.steps[s + 1], m)) {
            fol::Trace c = tr;
            c.steps[s + 1] = bad;
            t.check(!fol::ground_check(m, c, s, fol::trace_domain_bound(c, s)).ok,
                    [&] { return cat(m.name, " x=", x, " y=", y, ": corruption accepted at step ", s); });
          }
        }
      }
    }
  }
  t.check(fol::nat_holds_on(30), [] { return std::string("NAT fails on [0,30]"); });
}

void c12(Tally& t) {
  for (const auto& toy : corpus::toy_machines())
    for (Nat x = 0; x <= 4; ++x) {
      auto r = fol::simulate(toy.machine, x, 120, 200000);
      for (Nat y = 0; y <= 4; ++y)
        t.check((r.reached.count(y) != 0) == toy.intended(x, y),
                [&] { return cat(toy.machine.name, ": reach(", x, ",", y, ")"); });
    }
}

// ---------------------------------------------------------------- sigma2

void c13(Tally& t) {
  using namespace sigma2;
  auto le = r_predicate_from_json({{"kind", "x_le_y"}});
  for (Nat x = 0; x <= 10; ++x)
    for (Nat y = 0; y <= 10; ++y)
      t.check(v_enumerate(le, x, y, 10000).stalled == (x <= y), [&] { return cat("V(", x, ",", y, ")"); });

  auto reg = standard_oracles();
  std::vector<std::pair<std::string, VFamily>> fams{
      {"always", family_from_predicate(r_predicate_from_json({{"kind", "always"}}))},
      {"x<=y", family_from_predicate(le)},
      {"explicit", explicit_family({{{0, 1}, {0}}, {{1, 0}, {0, 7}}})},
      {"empty", empty_family()},
  };
  for (const auto& [label, fam] : fams) {
    auto run = run_sigma2(fam, 3, reg);
    auto bad = o::sigma2_log_violations(run, fam, reg);
    t.check(bad.empty(), [&] { return label + ": " + bad.front(); });
    t.check(recheck(run, reg).empty(), [&] { return label + ": a declared requirement broke"; });
  }

  // stage 4: lengths only, against plain big-integer arithmetic
  BigInt g = 1;
  for (int k = 0; k < 4; ++k) g = BigInt(1) << static_cast<unsigned>(g);
  auto run4 = run_sigma2(fams[0].second, 4, reg);
  t.check(run4.log.size() == 5 && run4.log[4].g == g, [] { return std::string("stage 4 tower value"); });
  auto bad4 = o::sigma2_log_violations(run4, fams[0].second, reg);
  t.check(bad4.empty(), [&] { return "stage 4 log: " + bad4.front(); });
  SuffixEntry e4{stage_tuple(4), Polynomial{{3, 0, 1}}};
  for (const BigInt& m : std::vector<BigInt>{g, g + 1, 3 * g + 17}) {
    auto out = reduction_fn(e4, RleString::zeros(m), {}, {});
    BigInt q = 3 + m * m;
    t.check(out.length() == m + g + q, [] { return std::string("stage 4 reduction length"); });
    BigInt blocks = 0;
    for (const auto& b : out.blocks()) blocks += b.len;
    t.check(blocks == m + g + q && out.blocks().size() == 3, [] { return std::string("stage 4 block sum"); });
  }
  // below g(4) the short case answers with a short string
  auto shortw = reduction_fn(e4, RleString::zeros(g - 1), {RleString::zeros(g - 1)}, {RleString::from_bits("1")});
  t.check(shortw == RleString::from_bits("1"), [] { return std::string("stage 4 short case"); });
}

// ---------------------------------------------------------------- diag

diag::Family scripted_family() {
  using diag::PhiResult;
  auto affine = [](Nat mul, Nat add, Nat steps) -> diag::Phi {
    return [=](Nat n) -> std::optional<PhiResult> { return PhiResult{mul * n + add, steps}; };
  };
  diag::Family f;
  f.phi = {
      affine(1, 0, 1),
      [](Nat) -> std::optional<PhiResult> { return std::nullopt; },
      [](Nat) -> std::optional<PhiResult> { return PhiResult{7, 4}; },
      affine(2, 0, 5),
      affine(1, 100, 2),
      affine(1, 0, 40),
      [](Nat n) -> std::optional<PhiResult> { return PhiResult{n % 4, 3}; },
      affine(3, 1, 9),
  };
  f.v = [](Nat a, Nat b, Nat c) {
    if (b == a + 1 || b == a + 2) return c % 400 == 0;  // (phi x, phi y) pairs of the identity-like machines
    return c % (3 + (a * b) % 7) == 0;
  };
  return f;
}

// replays the log without the library's report
void replay_diag(Tally& t, const diag::UFamily& u, Nat window) {
  for (const auto& [p, n] : u.u) {
    bool cross = (p.first % 3 == 1 && p.second % 3 == 2) || (p.first % 3 == 2 && p.second % 3 == 1);
    t.check(!(cross && n > 0), [&] { return cat("U_{", p.first, ",", p.second, "} = ", n); });
  }
  struct Live {
    diag::Phase phase = diag::Phase::waiting;
    std::optional<diag::Pair> last;
    Nat last_step = 0;
  };
  std::map<std::pair<Nat, Nat>, Live> live;
  std::map<diag::Pair, Nat> adds;
  std::set<std::tuple<Nat, Nat, Nat, std::string>> vs;
  for (const auto& ev : u.log) {
    auto& in = live[{ev.e, ev.z}];
    const Nat x = 3 * ev.e + 1, y = 3 * ev.e + 2;
    if (ev.kind == "v") vs.insert({ev.step, ev.e, ev.z, ev.role});
    if (ev.kind == "add") {
      diag::Pair p{ev.a, ev.b};
      ++adds[p];
      bool fits = (in.phase == diag::Phase::step3 && p == diag::upair(x, ev.z)) ||
                  (in.phase == diag::Phase::step4 && p == diag::upair(y, ev.z));
      t.check(fits, [&] { return cat("addition to (", ev.a, ",", ev.b, ") in phase ", diag::phase_name(in.phase)); });
      in.last = p;
      in.last_step = ev.step;
    }
    if (ev.kind == "phase") {
      t.check(ev.from == in.phase, [&] { return cat("phase log out of order at step ", ev.step); });
      const char* need = nullptr;
      if (ev.from == diag::Phase::step3 && ev.to == diag::Phase::step4) need = "xz";
      if (ev.from == diag::Phase::step4 && ev.to == diag::Phase::step3) need = "yz";
      if (ev.to == diag::Phase::restarted) need = "xy";
      if (need)
        t.check(vs.count({ev.step, ev.e, ev.z, need}) == 1,
                [&] { return cat("transition at step ", ev.step, " without a V event on ", need); });
      in.phase = ev.to;
    }
  }
  for (const auto& [p, n] : u.u)
    t.check(adds[p] == n, [&] { return cat("counter (", p.first, ",", p.second, ") disagrees with the log"); });

  // classes formed by pairs still growing at the end
  const Nat since = u.steps > window ? u.steps - window : 0;
  std::map<Nat, std::set<Nat>> adj;
  for (const auto& [key, in] : live)
    if (in.phase != diag::Phase::restarted && in.last && in.last_step > since) {
      adj[in.last->first].insert(in.last->second);
      adj[in.last->second].insert(in.last->first);
    }
  std::set<Nat> seen;
  for (const auto& [start, _] : adj) {
    if (seen.count(start)) continue;
    std::vector<Nat> stack{start};
    std::size_t size = 0;
    seen.insert(start);
    while (!stack.empty()) {
      Nat v = stack.back();
      stack.pop_back();
      ++size;
      for (Nat w : adj[v])
        if (seen.insert(w).second) stack.push_back(w);
    }
    t.check(size <= 2, [&] { return cat("class of ", start, " has ", size, " members"); });
  }
}

void c14(Tally& t) {
  auto fam = scripted_family();
  const Nat budget = 100000, window = 1000;
  auto u = diag::dovetail(fam, budget);
  t.check(u.steps == budget, [] { return std::string("dovetail stopped early"); });
  auto rep = diag::invariant_report(u, window);
  t.check(rep.ok(), [&] { return "report: " + rep.violations.front(); });
  replay_diag(t, u, window);
  std::size_t restarts = 0, alternations = 0;
  for (const auto& ev : u.log)
    if (ev.kind == "phase") {
      restarts += ev.to == diag::Phase::restarted;
      alternations += ev.from == diag::Phase::step4 && ev.to == diag::Phase::step3;
    }
  t.check(restarts > 0 && alternations > 0, [] { return std::string("scripted family never restarts or alternates"); });

  auto d2 = diag::run_delta2(fam, budget);
  Nat horizon = 0;
  for (const auto& [p, n] : d2.next_elem) horizon = std::max(horizon, n);
  auto pv = diag::partition_violations(d2, horizon + 10);
  t.check(pv.empty(), [&] { return "partition: " + pv.front(); });
  for (const auto& [p, n] : d2.next_elem) {
    const auto& us = d2.u_elems.count(p) ? d2.u_elems.at(p) : std::set<Nat>{};
    const auto& cs = d2.comp_elems.count(p) ? d2.comp_elems.at(p) : std::set<Nat>{};
    std::size_t overlap = 0;
    for (Nat i : us) overlap += cs.count(i);
    t.check(overlap == 0 && us.size() + cs.size() == n, [&] { return cat("pair (", p.first, ",", p.second, ") split"); });
  }
  replay_diag(t, d2, window);
}

// ---------------------------------------------------------------- preorders, sigma1, delta1

void c15(Tally& t) {
  for (const char* name : {"leq", "divides"}) {
    Pi1Approximation p({ProgramTable::builtin(std::string("co-") + name), Mode::pi1_preorder}, kernel_budget);
    const Nat horizon = 80;
    Nat stages = 0;
    for (Nat i = 0; i <= 6; ++i)
      for (Nat n = 0; n < horizon; ++n) stages = std::max(stages, stage_bound(i, n));
    auto fam = run_stages(p, stages);
    std::vector<std::set<Nat>> a(7);
    for (Nat i = 0; i <= 6; ++i)
      for (Nat n = 0; n < horizon; ++n) {
        bool in = a_member(p, i, n);
        t.check(in == (fam.sets[i].count(n) == 1), [&] { return cat(name, ": a_member(", i, ",", n, ")"); });
        if (in) a[i].insert(n);
      }
    for (Nat i = 0; i <= 6; ++i)
      for (Nat k = 0; k <= 6; ++k) {
        bool incl = std::includes(a[k].begin(), a[k].end(), a[i].begin(), a[i].end());
        t.check(incl == *named_predicate(name, {}, i, k), [&] { return cat(name, ": A_", i, " vs A_", k); });
      }
  }
}

void c16(Tally& t) {
  Registry reg;
  reg.add(0, ProgramTable::builtin("id-mod", {2}));
  reg.add(1, ProgramTable::builtin("id-mod", {3}));
  reg.add(2, ProgramTable::builtin("eq"));
  reg.add(3, ProgramTable::explicit_list({{0, 4}, {4, 9}, {2, 3}, {7, 20}, {20, 5}}));
  reg.add(4, ProgramTable::builtin("classes", {0, 0, 1, 1, 1, 2, 0}));
  reg.add(5, ProgramTable::explicit_list({}));
  const Nat steps = 2000;
  std::function<std::optional<bool>(const Nat&, const Nat&)> uni = [&](const Nat& a, const Nat& b) {
    return std::optional<bool>(universal_sigma1_member(reg, a, b, steps) == Sigma1Answer::yes);
  };
  for (Nat e : reg.ids()) {
    std::vector<Edge> got;
    for (Nat s = 0; s < steps; ++s)
      if (auto ed = reg.get(e).emit(s)) got.push_back(*ed);
    for (Nat w = 0; w <= 15; ++w) {
      auto m = o::closure_fixpoint(got, w, true);
      auto a = RelationWindow::from_predicate(w, [&](Nat x, Nat y) { return bool(m[x][y]); });
      std::function<Nat(Nat)> f = [e](Nat x) { return universal_sigma1_reduction(e, x); };
      auto v = check_reduction<Nat>(a, uni, f, w);
      t.check(v.ok, [&] { return cat("sigma1 reduction of program ", e, " fails at (", v.counterexample->x, ",", v.counterexample->y, ")"); });
    }
  }

  Registry dec;
  const char* names[] = {"leq", "eq", "divides", "all", "lt", "id-mod", "slow-leq"};
  for (Nat e = 0; e <= 6; ++e) dec.add(e, ProgramTable::decider(names[e], e == 5 ? std::vector<Nat>{3} : std::vector<Nat>{}));
  for (Nat e : {Nat{0}, Nat{1}, Nat{2}, Nat{3}, Nat{5}}) {
    for (Nat w = 0; w <= 15; ++w) {
      auto a = RelationWindow::from_predicate(w, [&](Nat x, Nat y) { return *named_predicate(names[e], e == 5 ? std::vector<Nat>{3} : std::vector<Nat>{}, x, y); });
      std::map<Nat, Delta1Triple> img;
      for (Nat x = 0; x <= w; ++x) img[x] = reduce_to_delta1(dec, e, x, 100000);
      std::function<Delta1Triple(Nat)> f = [&](Nat x) { return img.at(x); };
      std::function<std::optional<bool>(const Delta1Triple&, const Delta1Triple&)> leq =
          [&](const Delta1Triple& p, const Delta1Triple& q) { return std::optional<bool>(delta1_leq(dec, p, q)); };
      auto v = check_reduction<Delta1Triple>(a, leq, f, w);
      t.check(v.ok, [&] { return cat("delta1 reduction of ", names[e], " on [0,", w, "]"); });
    }
  }

  std::vector<Delta1Triple> all;
  for (Nat x = 0; x <= 6; ++x)
    for (Nat e = 0; e <= 6; ++e)
      for (Nat s = 0; s <= 6; ++s) all.push_back({x, e, s});
  const std::size_t n = all.size();
  std::vector<char> rel(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) rel[i * n + j] = delta1_leq(dec, all[i], all[j]);
  for (std::size_t i = 0; i < n; ++i) {
    t.check(rel[i * n + i], [&] { return cat("delta1 reflexivity at ", i); });
    for (std::size_t j = 0; j < n; ++j)
      if (rel[i * n + j])
        for (std::size_t k = 0; k < n; ++k)
          if (rel[j * n + k])
            t.check(rel[i * n + k], [&] {
              auto s = [](const Delta1Triple& d) { return cat("(", d.x, ",", d.e, ",", d.t, ")"); };
              return "delta1 transitivity " + s(all[i]) + " " + s(all[j]) + " " + s(all[k]);
            });
  }
}

struct Entry {
  const char* title;
  std::function<void(Tally&, Nat)> run;
  double time_limit;  // seconds; 0 = none
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> e{
      {"kernel_equiv matches settled windows", [](Tally& t, Nat) { c1(t); }, 10},
      {"f(x,n) is the window class minimum", [](Tally& t, Nat) { c2(t); }, 0},
      {"least_elements matches brute-force minima", [](Tally& t, Nat) { c3(t); }, 0},
      {"padded_g on the image of p and off it", c4, 0},
      {"tree isomorphism vs bijection search", [](Tally& t, Nat) { c5(t); }, 30},
      {"root embedding vs injection search", [](Tally& t, Nat) { c6(t); }, 0},
      {"finite bi-embeddable trees are isomorphic", [](Tally& t, Nat) { c7(t); }, 0},
      {"figure-one tree membership", [](Tally& t, Nat) { c8(t); }, 0},
      {"subgroup multipliers and almost-equality", c9, 0},
      {"encoded group axioms", c10, 0},
      {"first-order encoding and ground checks", [](Tally& t, Nat) { c11(t); }, 0},
      {"toy machine reachability", [](Tally& t, Nat) { c12(t); }, 0},
      {"sigma2 enumeration, stage log, stage-4 lengths", [](Tally& t, Nat) { c13(t); }, 0},
      {"diagonalization invariants and delta2 partition", [](Tally& t, Nat) { c14(t); }, 0},
      {"pi1 preorder sets reproduce the preorder", [](Tally& t, Nat) { c15(t); }, 0},
      {"universal sigma1 and delta1 preorder", [](Tally& t, Nat) { c16(t); }, 0},
  };
  return e;
}

}  // namespace

Outcome run_criterion(int id, Nat seed) {
  if (id < 1 || id > criterion_count) throw Error(Errc::index_out_of_range, "criterion " + std::to_string(id));
  const Entry& e = entries()[id - 1];
  Outcome out;
  out.id = id;
  out.title = e.title;
  Tally t;
  auto start = std::chrono::steady_clock::now();
  try {
    e.run(t, seed);
  } catch (const std::exception& ex) {
    t.fail(std::string("exception: ") + ex.what());
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (e.time_limit > 0 && out.seconds >= e.time_limit)
    t.fail(cat("took ", out.seconds, " s, limit ", e.time_limit, " s"));
  out.pass = t.ok();
  out.checks = t.checks();
  out.detail = t.detail();
  return out;
}

std::vector<std::string> suite_names() {
  return {"all", "relations", "kernel", "preorder", "trees", "qgroup", "fol", "sigma2", "diag"};
}

std::vector<int> suite_criteria(const std::string& suite) {
  if (suite == "all") {
    std::vector<int> v;
    for (int i = 1; i <= criterion_count; ++i) v.push_back(i);
    return v;
  }
  if (suite == "relations") return {16};
  if (suite == "kernel") return {1, 2, 3, 4};
  if (suite == "preorder") return {15};
  if (suite == "trees") return {5, 6, 7, 8};
  if (suite == "qgroup") return {9, 10};
  if (suite == "fol") return {11, 12};
  if (suite == "sigma2") return {13};
  if (suite == "diag") return {14};
  throw Error(Errc::bad_input, "unknown suite '" + suite + "'");
}

}  // namespace crel::suites
