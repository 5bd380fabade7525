#pragma once

#include <stdexcept>
#include <string>

namespace crel {

enum class Errc {
  budget_exhausted,
  precondition_violated,
  unregistered_program,
  oracle_budget_exhausted,
  decider_diverges,
  node_cap_exceeded,
  empty_generators,
  downward_closure_violated,
  malformed_machine,
  index_out_of_range,
  parse_error,
  cycle_detected,
  short_case_unresolvable,
  bad_input,
  decider_budget_exhausted,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

private:
  Errc code_;
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::budget_exhausted: return "budget-exhausted";
    case Errc::precondition_violated: return "precondition-violated";
    case Errc::unregistered_program: return "unregistered-program-id";
    case Errc::oracle_budget_exhausted: return "oracle-budget-exhausted";
    case Errc::decider_diverges: return "decider-diverges-within-budget";
    case Errc::node_cap_exceeded: return "node-cap-exceeded";
    case Errc::empty_generators: return "empty-or-zero-generators";
    case Errc::downward_closure_violated: return "downward-closure-violated";
    case Errc::malformed_machine: return "malformed-machine";
    case Errc::index_out_of_range: return "index-out-of-range";
    case Errc::parse_error: return "parse-error";
    case Errc::cycle_detected: return "cycle-detected";
    case Errc::short_case_unresolvable: return "short-case-unresolvable";
    case Errc::bad_input: return "bad-input";
    case Errc::decider_budget_exhausted: return "decider-budget-exhausted";
  }
  return "error";
}

}  // namespace crel
