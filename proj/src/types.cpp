#include "lectometer/types.hpp"

#include <array>
#include <utility>

namespace lecto {

namespace {

constexpr std::array<std::pair<ExpressionLabel, std::string_view>, 8> kExpressions{{
    {ExpressionLabel::anger, "anger"},
    {ExpressionLabel::disgust, "disgust"},
    {ExpressionLabel::fear, "fear"},
    {ExpressionLabel::happy, "happy"},
    {ExpressionLabel::neutral, "neutral"},
    {ExpressionLabel::sad, "sad"},
    {ExpressionLabel::surprise, "surprise"},
    {ExpressionLabel::none, "none"},
}};

constexpr std::array<std::pair<ActivityLabel, std::string_view>, 8> kActivities{{
    {ActivityLabel::absent, "absent"},
    {ActivityLabel::attending, "attending"},
    {ActivityLabel::hand_raising, "hand_raising"},
    {ActivityLabel::writing, "writing"},
    {ActivityLabel::telephone_call, "telephone_call"},
    {ActivityLabel::texting, "texting"},
    {ActivityLabel::looking_elsewhere, "looking_elsewhere"},
    {ActivityLabel::none, "none"},
}};

}  // namespace

std::string_view to_string(ExpressionLabel v) {
    for (const auto& [label, name] : kExpressions)
        if (label == v) return name;
    return "none";
}

std::string_view to_string(ActivityLabel v) {
    for (const auto& [label, name] : kActivities)
        if (label == v) return name;
    return "none";
}

std::optional<ExpressionLabel> expression_from_string(std::string_view s) {
    for (const auto& [label, name] : kExpressions)
        if (name == s) return label;
    return std::nullopt;
}

std::optional<ActivityLabel> activity_from_string(std::string_view s) {
    for (const auto& [label, name] : kActivities)
        if (name == s) return label;
    return std::nullopt;
}

}  // namespace lecto
