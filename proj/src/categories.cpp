#include "skyway/categories.hpp"

#include <utility>

#include "skyway/error.hpp"

namespace skyway {
namespace {

template <typename E, std::size_t N>
using LabelTable = std::array<std::pair<E, std::string_view>, N>;

constexpr LabelTable<PayloadClass, 3> kPayloadLabels{{
    {PayloadClass::None, "none"},
    {PayloadClass::Light, "light"},
    {PayloadClass::Heavy, "heavy"},
}};

constexpr LabelTable<SeparationCategory, 3> kSeparationLabels{{
    {SeparationCategory::Close, "close"},
    {SeparationCategory::Moderate, "moderate"},
    {SeparationCategory::Wide, "wide"},
}};

constexpr LabelTable<FormationClass, 4> kFormationLabels{{
    {FormationClass::None, "none"},
    {FormationClass::SideBySide, "side-by-side"},
    {FormationClass::TopDown, "top-down"},
    {FormationClass::FrontBack, "front-back"},
}};

constexpr LabelTable<PositionClass, 7> kPositionLabels{{
    {PositionClass::None, "none"},
    {PositionClass::Top, "top"},
    {PositionClass::Down, "down"},
    {PositionClass::Left, "left"},
    {PositionClass::Right, "right"},
    {PositionClass::Front, "front"},
    {PositionClass::Back, "back"},
}};

constexpr LabelTable<WindCondition, 5> kWindLabels{{
    {WindCondition::None, "none"},
    {WindCondition::LightHeadwind, "light-headwind"},
    {WindCondition::LightTailwind, "light-tailwind"},
    {WindCondition::IntenseHeadwind, "intense-headwind"},
    {WindCondition::IntenseTailwind, "intense-tailwind"},
}};

constexpr LabelTable<Variable, 5> kVariableLabels{{
    {Variable::Position, "position"},
    {Variable::Separation, "separation"},
    {Variable::Formation, "formation"},
    {Variable::Wind, "wind"},
    {Variable::Payload, "payload"},
}};

template <typename E, std::size_t N>
std::string_view lookup(const LabelTable<E, N>& table, E value) {
  for (const auto& [e, label] : table) {
    if (e == value) return label;
  }
  return "?";
}

template <typename E, std::size_t N>
E parse(const LabelTable<E, N>& table, std::string_view label, std::string_view kind) {
  for (const auto& [e, name] : table) {
    if (name == label) return e;
  }
  std::string msg = "unknown " + std::string(kind) + " label '" + std::string(label) +
                    "' (valid: ";
  for (std::size_t i = 0; i < N; ++i) {
    if (i > 0) msg += ", ";
    msg += table[i].second;
  }
  msg += ")";
  throw InputError(msg);
}

}  // namespace

std::string_view to_string(PayloadClass v) { return lookup(kPayloadLabels, v); }
std::string_view to_string(SeparationCategory v) { return lookup(kSeparationLabels, v); }
std::string_view to_string(FormationClass v) { return lookup(kFormationLabels, v); }
std::string_view to_string(PositionClass v) { return lookup(kPositionLabels, v); }
std::string_view to_string(WindCondition v) { return lookup(kWindLabels, v); }
std::string_view to_string(Variable v) { return lookup(kVariableLabels, v); }

PayloadClass parse_payload(std::string_view label) {
  return parse(kPayloadLabels, label, "payload");
}
FormationClass parse_formation(std::string_view label) {
  return parse(kFormationLabels, label, "formation");
}
PositionClass parse_position(std::string_view label) {
  return parse(kPositionLabels, label, "position");
}
WindCondition parse_wind(std::string_view label) { return parse(kWindLabels, label, "wind"); }
Variable parse_variable(std::string_view label) {
  return parse(kVariableLabels, label, "variable");
}

}  // namespace skyway
