#include "crel/qgroup.hpp"

#include <algorithm>
#include <set>

namespace crel {

Rational parse_rational(const std::string& s) {
  try {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(BigInt(s));
    BigInt num(s.substr(0, slash)), den(s.substr(slash + 1));
    if (den == 0) throw Error(Errc::bad_input, "zero denominator");
    return Rational(num, den);
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const Error*>(&e)) throw;
    throw Error(Errc::parse_error, "rational '" + s + "'");
  }
}

std::string to_string(const Rational& q) {
  auto n = boost::multiprecision::numerator(q), d = boost::multiprecision::denominator(q);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

bool operator<=(const Exponent& a, const Exponent& b) {
  if (b.infinite) return true;
  if (a.infinite) return false;
  return a.k <= b.k;
}

std::string to_string(const Exponent& e) { return e.infinite ? "inf" : std::to_string(e.k); }

PrimePowerProfile::PrimePowerProfile(Exponent dflt, const std::map<Nat, Exponent>& exceptions) : default_(dflt) {
  if (!dflt.infinite && dflt.k != 0) throw Error(Errc::bad_input, "default exponent must be 0 or inf");
  for (const auto& [p, e] : exceptions) {
    if (!is_prime(p)) throw Error(Errc::bad_input, std::to_string(p) + " is not prime");
    if (!(e == default_)) exceptions_[p] = e;
  }
}

Exponent PrimePowerProfile::at(Nat p) const {
  auto it = exceptions_.find(p);
  return it == exceptions_.end() ? default_ : it->second;
}

bool is_prime(Nat n) {
  if (n < 2) return false;
  for (Nat d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

Nat nth_prime(Nat i) {
  static std::mutex mu;
  static std::vector<Nat> primes;
  std::lock_guard<std::mutex> lock(mu);
  Nat c = primes.empty() ? 2 : primes.back() + 1;
  while (primes.size() <= i) {
    if (is_prime(c)) primes.push_back(c);
    ++c;
  }
  return primes[i];
}

Nat prime_of_index(Nat x) { return x == 0 ? 1 : nth_prime(x - 1); }

std::map<Nat, unsigned> factorize(const BigInt& n0) {
  BigInt n = boost::multiprecision::abs(n0);
  if (n == 0) throw Error(Errc::bad_input, "factorize(0)");
  std::map<Nat, unsigned> out;
  for (Nat d = 2; BigInt(d) * d <= n; ++d) {
    while (n % d == 0) {
      ++out[d];
      n /= d;
    }
    if (d > 10000000) throw Error(Errc::bad_input, "factor too large");
  }
  if (n > 1) {
    if (n > std::numeric_limits<Nat>::max()) throw Error(Errc::bad_input, "factor too large");
    ++out[static_cast<Nat>(n)];
  }
  return out;
}

namespace {

unsigned valuation(BigInt& n, Nat p) {
  unsigned v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

std::set<Nat> exception_primes(const PrimePowerProfile& a, const PrimePowerProfile& b) {
  std::set<Nat> ps;
  for (const auto& [p, e] : a.exceptions()) ps.insert(p);
  for (const auto& [p, e] : b.exceptions()) ps.insert(p);
  return ps;
}

BigInt ipow(Nat p, unsigned k) {
  BigInt r = 1;
  for (unsigned i = 0; i < k; ++i) r *= p;
  return r;
}

}  // namespace

bool member(const PrimePowerProfile& a, const Rational& q) {
  BigInt den = boost::multiprecision::denominator(q);
  for (const auto& [p, e] : a.exceptions()) {
    unsigned v = valuation(den, p);
    if (!e.covers(v)) return false;
  }
  // what is left consists of primes at the default exponent
  return den == 1 || a.default_exponent().infinite;
}

Normalized normalize_generators(const std::vector<Rational>& gens) {
  BigInt lcm = 1;
  bool nonzero = false;
  for (const auto& g : gens) {
    if (g != 0) nonzero = true;
    lcm = boost::multiprecision::lcm(lcm, BigInt(boost::multiprecision::denominator(g)));
  }
  if (!nonzero) throw Error(Errc::empty_generators, "need a nonzero generator");
  BigInt g = 0;
  for (const auto& q : gens) {
    BigInt n = boost::multiprecision::numerator(q) * (lcm / boost::multiprecision::denominator(q));
    g = boost::multiprecision::gcd(g, boost::multiprecision::abs(n));
  }
  // the generated group is c*Z
  Rational c(g, lcm);
  Rational scaling = boost::multiprecision::numerator(c) == 1 ? Rational(1) : Rational(1) / c;
  std::map<Nat, Exponent> ex;
  for (const auto& q : gens) {
    Rational s = q * scaling;
    for (auto [p, k] : factorize(boost::multiprecision::denominator(s)))
      if (!ex.count(p) || ex[p].k < k) ex[p] = Exponent::of(k);
  }
  return {PrimePowerProfile(Exponent::of(0), ex), scaling};
}

bool almost_equal(const PrimePowerProfile& a, const PrimePowerProfile& b) {
  if (!(a.default_exponent() == b.default_exponent())) return false;
  for (Nat p : exception_primes(a, b))
    if (a.at(p).infinite != b.at(p).infinite) return false;
  return true;
}

bool almost_included(const PrimePowerProfile& a, const PrimePowerProfile& b) {
  if (a.default_exponent().infinite && !b.default_exponent().infinite) return false;
  for (Nat p : exception_primes(a, b))
    if (a.at(p).infinite && !b.at(p).infinite) return false;
  return true;
}

std::optional<Rational> iso_multiplier(const PrimePowerProfile& a, const PrimePowerProfile& b) {
  if (!almost_equal(a, b)) return std::nullopt;
  Rational m = 1;
  for (Nat p : exception_primes(a, b)) {
    Exponent x = a.at(p), y = b.at(p);
    if (x.infinite || y.infinite || x.k == y.k) continue;
    if (x.k > y.k) m *= Rational(ipow(p, x.k - y.k));
    else m /= Rational(ipow(p, y.k - x.k));
  }
  return m;
}

std::optional<Rational> embed_multiplier(const PrimePowerProfile& a, const PrimePowerProfile& b) {
  if (!almost_included(a, b)) return std::nullopt;
  Rational m = 1;
  for (Nat p : exception_primes(a, b)) {
    Exponent x = a.at(p), y = b.at(p);
    if (x.infinite || y.infinite || x.k <= y.k) continue;
    m *= Rational(ipow(p, x.k - y.k));
  }
  return m;
}

bool bi_embeddable(const PrimePowerProfile& a, const PrimePowerProfile& b) {
  return embed_multiplier(a, b).has_value() && embed_multiplier(b, a).has_value();
}

PrimePowerProfile profile_from_enumeration(const EnumeratedProfile& src, Nat steps) {
  std::map<Nat, unsigned> top;  // prime index -> largest y so far
  for (Nat s = 0; s < steps; ++s) {
    auto e = src.source.emit(s);
    if (!e || e->x == 0 || e->y == 0) continue;
    unsigned have = top.count(e->x) ? top[e->x] : 0;
    if (e->y > have + 1)
      throw Error(Errc::downward_closure_violated,
                  "(" + std::to_string(e->x) + "," + std::to_string(e->y) + ") at step " + std::to_string(s));
    top[e->x] = std::max<unsigned>(have, static_cast<unsigned>(e->y));
  }
  std::map<Nat, Exponent> ex;
  for (auto [x, y] : top) ex[prime_of_index(x)] = Exponent::of(y);
  return PrimePowerProfile(Exponent::of(0), ex);
}

EnumeratedProfile enumerate_profile(const PrimePowerProfile& p, Nat stages, unsigned inf_cap) {
  std::vector<Edge> pairs;
  for (Nat s = 0; s < stages; ++s) {
    auto [x, y] = unpair(s);
    if (x == 0 || y == 0) continue;
    Exponent e = p.at(prime_of_index(x));
    if (y <= (e.infinite ? inf_cap : e.k)) pairs.push_back({x, y});
  }
  return {ProgramTable::explicit_list(std::move(pairs))};
}

namespace {

BigInt unzig(unsigned e) { return e % 2 ? BigInt((e + 1) / 2) : -BigInt(e / 2); }

}  // namespace

std::vector<BigInt> decode_sequence(Nat code) {
  std::vector<BigInt> out;
  Nat n = code + 1;
  for (Nat i = 0; n > 1; ++i) {
    Nat p = nth_prime(i);
    if (p * p > n) {
      // n itself is prime
      Nat j = i;
      while (nth_prime(j) != n) ++j;
      out.resize(j + 1, 0);
      out[j] = unzig(1);
      break;
    }
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.push_back(unzig(e));
  }
  while (!out.empty() && out.back() == 0) out.pop_back();
  return out;
}

Nat encode_sequence(const std::vector<long long>& seq) {
  Nat code = 1;
  for (std::size_t s = 0; s < seq.size(); ++s) {
    long long z = seq[s];
    Nat e = z > 0 ? 2 * static_cast<Nat>(z) - 1 : 2 * static_cast<Nat>(-z);
    for (Nat k = 0; k < e; ++k) {
      Nat p = nth_prime(s);
      if (code > std::numeric_limits<Nat>::max() / p) throw Error(Errc::bad_input, "sequence code overflows");
      code *= p;
    }
  }
  return code - 1;
}

EncodedGroup::EncodedGroup(EnumeratedProfile src, Nat stages, Nat code_budget) : budget_(code_budget) {
  for (Nat s = 0; s < stages; ++s) {
    auto e = src.source.emit(s);
    if (!e || e->y == 0) {
      w_.push_back(0);
      continue;
    }
    w_.push_back(Rational(BigInt(1), ipow(prime_of_index(e->x), static_cast<unsigned>(e->y))));
  }
}

Rational EncodedGroup::interp(Nat code) const {
  auto z = decode_sequence(code);
  Rational sum = 0;
  for (std::size_t s = 0; s < z.size() && s < w_.size(); ++s)
    if (z[s] != 0 && w_[s] != 0) sum += Rational(z[s]) * w_[s];
  return sum;
}

void EncodedGroup::build_table() const {
  std::call_once(built_, [this] {
    // smallest-prime-factor sieve over code+1
    const Nat n = budget_ + 2;
    std::vector<Nat> spf(n, 0);
    for (Nat i = 2; i < n; ++i)
      if (spf[i] == 0)
        for (Nat j = i; j < n; j += i)
          if (spf[j] == 0) spf[j] = i;
    std::map<Nat, std::size_t> index_of;
    for (std::size_t s = 0; s < w_.size(); ++s) index_of[nth_prime(s)] = s;
    for (Nat code = 0; code <= budget_; ++code) {
      Rational sum = 0;
      Nat m = code + 1;
      while (m > 1) {
        Nat p = spf[m];
        unsigned e = 0;
        while (m % p == 0) {
          m /= p;
          ++e;
        }
        auto it = index_of.find(p);
        if (it != index_of.end() && w_[it->second] != 0) sum += Rational(unzig(e)) * w_[it->second];
      }
      least_.emplace(std::move(sum), code);
    }
  });
}

std::optional<Nat> EncodedGroup::interp_inv(const Rational& q) const {
  build_table();
  auto it = least_.find(q);
  if (it == least_.end()) return std::nullopt;
  return it->second;
}

std::optional<Nat> EncodedGroup::oplus(Nat a, Nat b) const { return interp_inv(interp(a) + interp(b)); }
std::optional<Nat> EncodedGroup::ominus(Nat a) const { return interp_inv(-interp(a)); }

std::optional<Nat> computable_iso(const EncodedGroup& g1, const EncodedGroup& g2, const Rational& m, Nat code) {
  return g2.interp_inv(m * g1.interp(code));
}

namespace {

Exponent exponent_of(const nlohmann::json& v) {
  std::string s = v.is_string() ? v.get<std::string>() : std::to_string(v.get<long long>());
  if (s == "inf" || s == "∞") return Exponent::inf();
  try {
    long long k = std::stoll(s);
    if (k < 0) throw Error(Errc::bad_input, "negative exponent");
    return Exponent::of(static_cast<unsigned>(k));
  } catch (const std::logic_error&) {
    throw Error(Errc::parse_error, "exponent '" + s + "'");
  }
}

}  // namespace

PrimePowerProfile profile_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(Errc::bad_input, "profile must be an object");
  Exponent d = j.contains("default") ? exponent_of(j["default"]) : Exponent::of(0);
  std::map<Nat, Exponent> ex;
  if (j.contains("exceptions"))
    for (const auto& [k, v] : j["exceptions"].items()) ex[std::stoull(k)] = exponent_of(v);
  return PrimePowerProfile(d, ex);
}

nlohmann::json profile_to_json(const PrimePowerProfile& p) {
  nlohmann::json j;
  j["default"] = to_string(p.default_exponent());
  j["exceptions"] = nlohmann::json::object();
  for (const auto& [q, e] : p.exceptions()) j["exceptions"][std::to_string(q)] = to_string(e);
  return j;
}

}  // namespace crel
