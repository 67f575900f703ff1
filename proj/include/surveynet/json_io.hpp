#pragma once

// Questionnaire definition document format and the JSON forms of every stored value.
// Rationals serialize as JSON integers when integral and as "p/q" strings otherwise; readers also
// accept decimal strings ("2.5") and JSON numbers.

#include <json.hpp>

#include <surveynet/catalog.hpp>
#include <surveynet/instruments.hpp>
#include <surveynet/model.hpp>
#include <surveynet/relational.hpp>
#include <surveynet/scoring.hpp>
#include <surveynet/sna.hpp>
#include <surveynet/validation.hpp>

namespace surveynet {

using Json = nlohmann::json;

Json rational_to_json(const Rational& value);
Rational rational_from_json(const Json& j);

void to_json(Json& j, const AnswerOption& v);
void from_json(const Json& j, AnswerOption& v);
void to_json(Json& j, const Question& v);
void from_json(const Json& j, Question& v);
void to_json(Json& j, const Band& v);
void from_json(const Json& j, Band& v);
void to_json(Json& j, const BandTable& v);
void from_json(const Json& j, BandTable& v);
void to_json(Json& j, const QuestionGroup& v);
void from_json(const Json& j, QuestionGroup& v);
void to_json(Json& j, const ElementRef& v);
void from_json(const Json& j, ElementRef& v);
void to_json(Json& j, const QuestionnaireDef& v);
void from_json(const Json& j, QuestionnaireDef& v);
void to_json(Json& j, const Respondent& v);
void from_json(const Json& j, Respondent& v);
void to_json(Json& j, const RespondentGroup& v);
void from_json(const Json& j, RespondentGroup& v);
void to_json(Json& j, const Wave& v);
void from_json(const Json& j, Wave& v);
void to_json(Json& j, const Answer& v);
void from_json(const Json& j, Answer& v);
void to_json(Json& j, const ResponseSet& v);
void from_json(const Json& j, ResponseSet& v);

void to_json(Json& j, const InstrumentScale& v);
void from_json(const Json& j, InstrumentScale& v);
void to_json(Json& j, const Instrument& v);
void from_json(const Json& j, Instrument& v);

void to_json(Json& j, const Entity& v);
void from_json(const Json& j, Entity& v);
void to_json(Json& j, const RelationalTemplate& v);
void from_json(const Json& j, RelationalTemplate& v);
void to_json(Json& j, const AlterItem& v);
void from_json(const Json& j, AlterItem& v);
void to_json(Json& j, const RelationalInstance& v);
void from_json(const Json& j, RelationalInstance& v);
void to_json(Json& j, const Edge& v);
void from_json(const Json& j, Edge& v);
void to_json(Json& j, const EdgeList& v);
void from_json(const Json& j, EdgeList& v);

void to_json(Json& j, const Catalog& v);
void from_json(const Json& j, Catalog& v);
void to_json(Json& j, const PublishedQuestionnaire& v);
void from_json(const Json& j, PublishedQuestionnaire& v);
void to_json(Json& j, const Finding& v);
void from_json(const Json& j, Finding& v);

void to_json(Json& j, const ScoreEntry& v);
void from_json(const Json& j, ScoreEntry& v);
void to_json(Json& j, const ScoreReport& v);
void from_json(const Json& j, ScoreReport& v);

void to_json(Json& j, const CentralityVector& v);
void from_json(const Json& j, CentralityVector& v);
void to_json(Json& j, const Partition& v);
void from_json(const Json& j, Partition& v);
void to_json(Json& j, const AnalysisResult& v);
void from_json(const Json& j, AnalysisResult& v);
void to_json(Json& j, const ChurnReport& v);

/// A self-contained definition document: the questionnaire plus any custom elements it defines.
struct DefinitionDocument {
    QuestionnaireDef questionnaire;
    Catalog elements; // custom questions, groups, templates and extra instruments
};

DefinitionDocument parse_definition_document(const std::string& text);
std::string write_definition_document(const DefinitionDocument& doc);

} // namespace surveynet
