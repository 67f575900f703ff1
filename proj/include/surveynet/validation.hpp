#pragma once

#include <string>
#include <vector>

#include <optional>

#include <surveynet/formula.hpp>
#include <surveynet/model.hpp>

namespace surveynet {

/// One violated rule. `element` names the offending element, `rule` is a stable rule id.
struct Finding {
    std::string element;
    std::string rule;
    std::string message;

    bool operator==(const Finding&) const = default;
};

std::vector<Finding> validate_question(const Question& question);

/// Range of scoreable values an answer can take; nullopt for numeric, free-text and relational items.
std::optional<ValueRange> question_value_range(const Question& question);

/// Checks ordering, disjointness and contiguity (next.lower == prev.upper + step). When
/// `coverage` is given, the table must span it exactly.
std::vector<Finding> validate_band_table(const std::string& element, const BandTable& table,
                                         const Rational* coverage_lower = nullptr,
                                         const Rational* coverage_upper = nullptr);

} // namespace surveynet
