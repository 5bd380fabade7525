#pragma once

#include <functional>
#include <string>
#include <vector>

#include "crel/fol.hpp"

namespace crel::corpus {

struct ToyMachine {
  fol::NDTM machine;
  std::function<bool(Nat, Nat)> intended;  // x reaches y
  bool preorder;
};

// leq, eq, parity-leq, succ, silent
std::vector<ToyMachine> toy_machines();
const ToyMachine& toy_machine(const std::string& name);

}  // namespace crel::corpus
