#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "crel/core.hpp"

namespace crel {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;  // always in lowest terms

// "a/b" or "a"
Rational parse_rational(const std::string& s);
std::string to_string(const Rational& q);

struct Exponent {
  bool infinite = false;
  unsigned k = 0;

  static Exponent inf() { return {true, 0}; }
  static Exponent of(unsigned k) { return {false, k}; }
  bool covers(unsigned m) const { return infinite || k >= m; }
  bool operator==(const Exponent&) const = default;
};
bool operator<=(const Exponent& a, const Exponent& b);
std::string to_string(const Exponent& e);

class PrimePowerProfile {
public:
  PrimePowerProfile() = default;
  // default must be 0 or infinity; entries equal to the default are dropped
  PrimePowerProfile(Exponent dflt, const std::map<Nat, Exponent>& exceptions);

  static PrimePowerProfile integers() { return {}; }
  static PrimePowerProfile rationals() { return {Exponent::inf(), {}}; }

  Exponent at(Nat p) const;
  const Exponent& default_exponent() const { return default_; }
  const std::map<Nat, Exponent>& exceptions() const { return exceptions_; }
  bool operator==(const PrimePowerProfile&) const = default;

private:
  Exponent default_;
  std::map<Nat, Exponent> exceptions_;
};

bool is_prime(Nat n);
Nat nth_prime(Nat i);  // nth_prime(0) = 2
// prime -> multiplicity, for |n| >= 1
std::map<Nat, unsigned> factorize(const BigInt& n);

bool member(const PrimePowerProfile& a, const Rational& q);

struct Normalized {
  PrimePowerProfile profile;
  Rational scaling;
};
Normalized normalize_generators(const std::vector<Rational>& gens);

bool almost_equal(const PrimePowerProfile& a, const PrimePowerProfile& b);
bool almost_included(const PrimePowerProfile& a, const PrimePowerProfile& b);
// m with m*group(a) = group(b)
std::optional<Rational> iso_multiplier(const PrimePowerProfile& a, const PrimePowerProfile& b);
// positive integer m with m*group(a) inside group(b)
std::optional<Rational> embed_multiplier(const PrimePowerProfile& a, const PrimePowerProfile& b);
bool bi_embeddable(const PrimePowerProfile& a, const PrimePowerProfile& b);

// pairs (x,y) meaning 1/p_x^y is a standard generator; index 0 is the
// prime "1" and contributes nothing, index i >= 1 is the i-th prime
struct EnumeratedProfile {
  ProgramTable source;
};
Nat prime_of_index(Nat x);  // 0 -> 1, 1 -> 2, 2 -> 3, ...
PrimePowerProfile profile_from_enumeration(const EnumeratedProfile& src, Nat steps);
// enumerator for a closed profile, Cantor order, stages below `stages`
EnumeratedProfile enumerate_profile(const PrimePowerProfile& p, Nat stages, unsigned inf_cap = 6);

// sequence codes: x+1 = prod_s p_s^{e_s}, entry s is zigzag(e_s)
std::vector<BigInt> decode_sequence(Nat code);
Nat encode_sequence(const std::vector<long long>& seq);  // throws if it overflows

class EncodedGroup {
public:
  // w_s is taken from the first `stages` steps of the source
  EncodedGroup(EnumeratedProfile src, Nat stages, Nat code_budget);

  const std::vector<Rational>& stage_elements() const { return w_; }
  Nat code_budget() const { return budget_; }
  Rational interp(Nat code) const;
  // least code <= budget with the given value
  std::optional<Nat> interp_inv(const Rational& q) const;
  std::optional<Nat> oplus(Nat a, Nat b) const;
  std::optional<Nat> ominus(Nat a) const;
  bool is_identity(Nat a) const { return interp(a) == 0; }

private:
  void build_table() const;
  std::vector<Rational> w_;
  Nat budget_;
  mutable std::once_flag built_;
  mutable std::map<Rational, Nat> least_;
};

std::optional<Nat> computable_iso(const EncodedGroup& g1, const EncodedGroup& g2, const Rational& m, Nat code);

// {"default":"0"|"inf","exceptions":{"2":"3","5":"inf"}}
PrimePowerProfile profile_from_json(const nlohmann::json& j);
nlohmann::json profile_to_json(const PrimePowerProfile& p);

}  // namespace crel
