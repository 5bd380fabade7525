#pragma once

#include <json.hpp>

#include "crel/core.hpp"

namespace crel {

// {"kind":"explicit","pairs":[[0,1]]} | {"kind":"builtin","name":"id-mod","n":3}
// | {"kind":"decider","name":"leq"} | {"kind":"decider","accept":[[0,0]]}
ProgramTable program_from_json(const nlohmann::json& j);
nlohmann::json program_to_json(const ProgramTable& p);

nlohmann::json window_to_json(const RelationWindow& w);

}  // namespace crel
