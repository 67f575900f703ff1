#include <surveynet/model.hpp>

#include <surveynet/error.hpp>

namespace surveynet {

std::string_view to_string(QuestionKind kind) {
    switch (kind) {
    case QuestionKind::SingleChoice: return "single-choice";
    case QuestionKind::MultiChoice: return "multi-choice";
    case QuestionKind::Numeric: return "numeric";
    case QuestionKind::FreeText: return "free-text";
    case QuestionKind::RelationalTemplate: return "relational-template";
    }
    return "single-choice";
}

QuestionKind question_kind_from_string(std::string_view text) {
    for (auto kind : {QuestionKind::SingleChoice, QuestionKind::MultiChoice, QuestionKind::Numeric,
                      QuestionKind::FreeText, QuestionKind::RelationalTemplate})
        if (to_string(kind) == text)
            return kind;
    throw Error(ErrorCode::InvalidArgument, "unknown question kind '" + std::string(text) + "'");
}

std::string_view to_string(ElementKind kind) {
    switch (kind) {
    case ElementKind::Instrument: return "instrument";
    case ElementKind::Question: return "question";
    case ElementKind::Group: return "group";
    case ElementKind::RelationalTemplate: return "relational-template";
    }
    return "question";
}

ElementKind element_kind_from_string(std::string_view text) {
    for (auto kind : {ElementKind::Instrument, ElementKind::Question, ElementKind::Group,
                      ElementKind::RelationalTemplate})
        if (to_string(kind) == text)
            return kind;
    throw Error(ErrorCode::InvalidArgument, "unknown element kind '" + std::string(text) + "'");
}

std::string_view to_string(CompletionStatus status) {
    return status == CompletionStatus::Submitted ? "submitted" : "partial";
}

CompletionStatus completion_status_from_string(std::string_view text) {
    if (text == "submitted")
        return CompletionStatus::Submitted;
    if (text == "partial")
        return CompletionStatus::Partial;
    throw Error(ErrorCode::InvalidArgument, "unknown completion status '" + std::string(text) + "'");
}

std::optional<Rational> answer_value(const Question& question, const Answer& answer) {
    switch (question.kind) {
    case QuestionKind::SingleChoice:
    case QuestionKind::MultiChoice: {
        const auto* selected = answer.selected();
        if (selected == nullptr || selected->empty())
            return std::nullopt;
        if (question.kind == QuestionKind::SingleChoice && selected->size() != 1)
            return std::nullopt;
        Rational total;
        for (auto index : *selected) {
            if (index >= question.options.size())
                return std::nullopt;
            total += question.options[index].value;
        }
        return total;
    }
    case QuestionKind::Numeric:
        if (const auto* number = answer.number())
            return *number;
        return std::nullopt;
    case QuestionKind::FreeText:
    case QuestionKind::RelationalTemplate:
        return std::nullopt;
    }
    return std::nullopt;
}

} // namespace surveynet
