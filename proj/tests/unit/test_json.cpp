#include <doctest.h>

#include <surveynet/json_io.hpp>

using namespace surveynet;

TEST_CASE("rationals serialize as integers or fractions") {
    CHECK(rational_to_json(Rational(4)) == Json(4));
    CHECK(rational_to_json(Rational(1) / 3) == Json("1/3"));
    CHECK(rational_from_json(Json("2.5")) == Rational(5) / 2);
    CHECK(rational_from_json(Json(7)) == 7);
}

TEST_CASE("definition documents round-trip") {
    DefinitionDocument doc;
    doc.questionnaire = QuestionnaireDef{"school", "School survey", "Wave study",
                                         {{ElementKind::Instrument, "AUDIT"},
                                          {ElementKind::Question, "name"},
                                          {ElementKind::Group, "g"},
                                          {ElementKind::RelationalTemplate, "F"}},
                                         0};
    doc.elements.questions["name"] = Question{"name", "Your name", QuestionKind::FreeText, {}, true, true};
    doc.elements.questions["c1"] =
        Question{"c1", "C1", QuestionKind::MultiChoice, {{"a", 1}, {"b", Rational(1) / 2}}, false, false};
    doc.elements.groups["g"] =
        QuestionGroup{"g", {"c1"}, "sum(c1) * 2", BandTable{{{0, 1, "low", "x"}, {2, 3, "high", "y"}}, 1}};
    doc.elements.templates["F"] = RelationalTemplate{"F", "Is {alter} your friend?", "friendship",
                                                     default_tie_scale(), NetworkMode::OneMode, {}};
    const std::string text = write_definition_document(doc);
    const DefinitionDocument back = parse_definition_document(text);
    CHECK(back.questionnaire == doc.questionnaire);
    CHECK(back.elements == doc.elements);
    CHECK(write_definition_document(back) == text);
    CHECK_THROWS_AS(parse_definition_document("{"), Error);
}

TEST_CASE("response sets and waves round-trip") {
    ResponseSet r{"w1", "R1",
                  {{"AUDIT.Q1", Answer::choice(2)},
                   {"age", Answer::numeric(Rational(31) / 2)},
                   {"name", Answer::text("María")},
                   {"multi", Answer::choice(std::vector<std::size_t>{0, 2})}},
                  CompletionStatus::Submitted};
    CHECK(Json(r).get<ResponseSet>() == r);
    Wave w{"w1", "q", 2, "g", {"R1", "R2"}, 1700000000, "T1", true};
    CHECK(Json(w).get<Wave>() == w);
}
