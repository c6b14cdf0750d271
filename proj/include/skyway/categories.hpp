#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace skyway {

enum class PayloadClass { None, Light, Heavy };
enum class SeparationCategory { Close, Moderate, Wide };
enum class FormationClass { None, SideBySide, TopDown, FrontBack };
enum class PositionClass { None, Top, Down, Left, Right, Front, Back };
enum class WindCondition { None, LightHeadwind, LightTailwind, IntenseHeadwind, IntenseTailwind };

// The five regressors of the segment-level model, in canonical order.
enum class Variable { Position, Separation, Formation, Wind, Payload };
inline constexpr std::size_t kVariableCount = 5;
inline constexpr std::array<Variable, kVariableCount> kAllVariables = {
    Variable::Position, Variable::Separation, Variable::Formation, Variable::Wind,
    Variable::Payload};

std::string_view to_string(PayloadClass v);
std::string_view to_string(SeparationCategory v);
std::string_view to_string(FormationClass v);
std::string_view to_string(PositionClass v);
std::string_view to_string(WindCondition v);
std::string_view to_string(Variable v);

// Parsers throw InputError naming the valid labels.
PayloadClass parse_payload(std::string_view label);
FormationClass parse_formation(std::string_view label);
PositionClass parse_position(std::string_view label);
WindCondition parse_wind(std::string_view label);
Variable parse_variable(std::string_view label);

inline constexpr std::size_t index_of(Variable v) { return static_cast<std::size_t>(v); }

}  // namespace skyway
