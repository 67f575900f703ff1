#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <surveynet/bands.hpp>
#include <surveynet/catalog.hpp>
#include <surveynet/error.hpp>
#include <surveynet/formula.hpp>

namespace surveynet {

struct ScoreEntry {
    std::string scale; // "<instrument>.<scale>" or the group id
    Rational score;
    std::optional<std::string> band;
    std::optional<std::string> guidance;

    bool operator==(const ScoreEntry&) const = default;
};

struct ScoreReport {
    std::string wave_id;
    std::string respondent_id;
    std::vector<ScoreEntry> entries;
    std::string questionnaire_id; // provenance: the questionnaire version whose formulas were used
    std::int64_t questionnaire_version = 0;

    const ScoreEntry* find(const std::string& scale) const;

    bool operator==(const ScoreReport&) const = default;
};

/// A formula failure tagged with the scale being scored.
class ScoringError : public Error {
public:
    ScoringError(ErrorCode code, std::string scale, std::string item, const std::string& detail);

    const std::string& scale() const noexcept { return scale_; }
    const std::string& item() const noexcept { return item_; } // empty unless MissingAnswer

private:
    std::string scale_;
    std::string item_;
};

/// Every scale of every embedded instrument and group, in element order. Relational answers
/// are ignored here. Requires a submitted response.
ScoreReport score_response(const PublishedQuestionnaire& published, const ResponseSet& response);

} // namespace surveynet
