#include <surveynet/bands.hpp>
#include <surveynet/error.hpp>
#include <surveynet/role.hpp>
#include <surveynet/validation.hpp>

#include <algorithm>
#include <set>

namespace surveynet {

std::string_view to_string(Role role) {
    switch (role) {
    case Role::SuperAdmin: return "super-admin";
    case Role::Interviewer: return "interviewer";
    case Role::Respondent: return "respondent";
    }
    return "respondent";
}

Role role_from_string(std::string_view text) {
    for (auto role : {Role::SuperAdmin, Role::Interviewer, Role::Respondent})
        if (to_string(role) == text)
            return role;
    throw Error(ErrorCode::InvalidArgument, "unknown role '" + std::string(text) + "'");
}

std::vector<Finding> validate_question(const Question& q) {
    std::vector<Finding> out;
    if (q.id.empty())
        out.push_back({q.id, "empty-id", "question without id"});
    if (is_choice(q.kind)) {
        if (q.options.size() < 2)
            out.push_back({q.id, "too-few-options", "question " + q.id + " needs at least 2 options"});
        std::set<std::string> labels;
        for (const auto& option : q.options)
            if (!labels.insert(option.label).second)
                out.push_back({q.id, "duplicate-option-label",
                               "question " + q.id + " repeats option label '" + option.label + "'"});
    } else if (!q.options.empty()) {
        out.push_back({q.id, "options-not-allowed",
                       "question " + q.id + " of kind " + std::string(to_string(q.kind)) + " cannot have options"});
    }
    return out;
}

std::optional<ValueRange> question_value_range(const Question& q) {
    if (!is_choice(q.kind) || q.options.empty())
        return std::nullopt;
    ValueRange r{q.options.front().value, q.options.front().value};
    Rational positive_sum;
    Rational negative_sum;
    for (const auto& o : q.options) {
        r.lower = std::min(r.lower, o.value);
        r.upper = std::max(r.upper, o.value);
        if (o.value > 0)
            positive_sum += o.value;
        else
            negative_sum += o.value;
    }
    if (q.kind == QuestionKind::MultiChoice) {
        if (negative_sum < 0)
            r.lower = negative_sum;
        if (positive_sum > 0)
            r.upper = positive_sum;
    }
    return r;
}

std::vector<Finding> validate_band_table(const std::string& element, const BandTable& table,
                                         const Rational* coverage_lower, const Rational* coverage_upper) {
    std::vector<Finding> out;
    if (table.bands.empty()) {
        out.push_back({element, "band-table-empty", element + " has an empty band table"});
        return out;
    }
    if (table.step <= 0)
        out.push_back({element, "band-step", element + " band step must be positive"});
    for (std::size_t i = 0; i < table.bands.size(); ++i) {
        const auto& band = table.bands[i];
        if (band.lower > band.upper)
            out.push_back({element, "band-inverted", element + " band '" + band.label + "' has lower > upper"});
        if (i > 0) {
            const auto& prev = table.bands[i - 1];
            if (band.lower <= prev.upper)
                out.push_back({element, "band-overlap",
                               element + " bands '" + prev.label + "' and '" + band.label + "' overlap or are unsorted"});
            else if (band.lower != prev.upper + table.step)
                out.push_back({element, "band-gap",
                               element + " gap between bands '" + prev.label + "' and '" + band.label + "'"});
        }
    }
    if (coverage_lower != nullptr && table.bands.front().lower > *coverage_lower)
        out.push_back({element, "band-coverage",
                       element + " bands start at " + to_string(table.bands.front().lower) +
                           " but scores reach " + to_string(*coverage_lower)});
    if (coverage_upper != nullptr && table.bands.back().upper < *coverage_upper)
        out.push_back({element, "band-coverage",
                       element + " bands end at " + to_string(table.bands.back().upper) +
                           " but scores reach " + to_string(*coverage_upper)});
    return out;
}

const Band& band_of(const BandTable& table, const Rational& score) {
    for (const auto& band : table.bands)
        if (band.lower <= score && score <= band.upper)
            return band;
    throw Error(ErrorCode::OutOfRange, "score " + to_string(score) + " is outside the band table");
}

} // namespace surveynet
