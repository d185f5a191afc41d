#pragma once

#include "formula.hpp"

#include <json.hpp>

namespace mw {

nlohmann::json to_json(const TermPtr& t);
nlohmann::json to_json(const FormulaPtr& f);

// Throws std::runtime_error on malformed input.
TermPtr term_from_json(const nlohmann::json& j);
FormulaPtr formula_from_json(const nlohmann::json& j);

}  // namespace mw
