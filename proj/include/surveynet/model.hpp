#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <surveynet/rational.hpp>

namespace surveynet {

enum class QuestionKind { SingleChoice, MultiChoice, Numeric, FreeText, RelationalTemplate };

std::string_view to_string(QuestionKind kind);
QuestionKind question_kind_from_string(std::string_view text);

inline bool is_choice(QuestionKind kind) {
    return kind == QuestionKind::SingleChoice || kind == QuestionKind::MultiChoice;
}

struct AnswerOption {
    std::string label;
    Rational value;

    bool operator==(const AnswerOption&) const = default;
};

struct Question {
    std::string id;
    std::string prompt;
    QuestionKind kind = QuestionKind::SingleChoice;
    std::vector<AnswerOption> options;
    bool anonymize = false;
    bool required = true;

    bool operator==(const Question&) const = default;
};

/// Inclusive interval [lower, upper] mapped to a qualitative band.
struct Band {
    Rational lower;
    Rational upper;
    std::string label;
    std::string guidance;

    bool operator==(const Band&) const = default;
};

/// Bands sorted ascending; consecutive bands satisfy next.lower == prev.upper + step.
struct BandTable {
    std::vector<Band> bands;
    Rational step{1};

    bool operator==(const BandTable&) const = default;
};

struct QuestionGroup {
    std::string id;
    std::vector<std::string> members;
    std::string formula;
    std::optional<BandTable> bands;

    bool operator==(const QuestionGroup&) const = default;
};

enum class ElementKind { Instrument, Question, Group, RelationalTemplate };

std::string_view to_string(ElementKind kind);
ElementKind element_kind_from_string(std::string_view text);

struct ElementRef {
    ElementKind kind = ElementKind::Question;
    std::string id;

    bool operator==(const ElementRef&) const = default;
};

/// version 0 is an unpublished draft; published versions start at 1.
struct QuestionnaireDef {
    std::string id;
    std::string title;
    std::string description;
    std::vector<ElementRef> elements;
    std::int64_t version = 0;

    bool operator==(const QuestionnaireDef&) const = default;
};

struct Respondent {
    std::string id;
    std::string display_name;
    std::map<std::string, std::string> attributes;

    bool operator==(const Respondent&) const = default;
};

struct RespondentGroup {
    std::string id;
    std::string name;
    std::vector<std::string> members;

    bool operator==(const RespondentGroup&) const = default;
};

struct Wave {
    std::string id;
    std::string questionnaire_id;
    std::int64_t questionnaire_version = 0;
    std::string group_id;
    std::vector<std::string> roster;
    std::int64_t timestamp = 0;
    std::string label;
    bool closed = false;

    bool operator==(const Wave&) const = default;
};

/// Selected option indexes for choice and relational questions, a number, or free text.
struct Answer {
    std::variant<std::vector<std::size_t>, Rational, std::string> value;

    static Answer choice(std::vector<std::size_t> selected) { return Answer{std::move(selected)}; }
    static Answer choice(std::size_t selected) { return Answer{std::vector<std::size_t>{selected}}; }
    static Answer numeric(Rational number) { return Answer{std::move(number)}; }
    static Answer text(std::string text) { return Answer{std::move(text)}; }

    const std::vector<std::size_t>* selected() const { return std::get_if<0>(&value); }
    const Rational* number() const { return std::get_if<1>(&value); }
    const std::string* free_text() const { return std::get_if<2>(&value); }

    bool operator==(const Answer&) const = default;
};

enum class CompletionStatus { Partial, Submitted };

std::string_view to_string(CompletionStatus status);
CompletionStatus completion_status_from_string(std::string_view text);

struct ResponseSet {
    std::string wave_id;
    std::string respondent_id;
    std::map<std::string, Answer> answers;
    CompletionStatus status = CompletionStatus::Partial;

    bool operator==(const ResponseSet&) const = default;
};

/// Scoreable value of an answer to `question`: option value, sum of selected values, or the number.
/// Returns nullopt for free text or an answer that does not match the question kind.
std::optional<Rational> answer_value(const Question& question, const Answer& answer);

} // namespace surveynet
