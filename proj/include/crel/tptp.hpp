#pragma once

#include <string>
#include <vector>

#include "crel/fol.hpp"

namespace crel::fol {

// FOF syntax; variables print with an upper-case first letter
std::string to_tptp(const F& f);
std::string to_tptp_line(const Named& n);  // fof(name, axiom, F).
std::string to_tptp_file(const std::vector<Named>& ns);

F parse_tptp_formula(const std::string& text);
std::vector<Named> parse_tptp_file(const std::string& text);

}  // namespace crel::fol
