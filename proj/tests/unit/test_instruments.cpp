#include <doctest.h>

#include <surveynet/bands.hpp>
#include <surveynet/catalog.hpp>
#include <surveynet/instruments.hpp>
#include <surveynet/scoring.hpp>

using namespace surveynet;

namespace {

struct ZoneRow {
    int lower, upper;
    const char* zone;
    const char* intervention;
};

// Risk zones and interventions of the AUDIT manual.
const ZoneRow kAuditTable[] = {
    {0, 7, "Zone I", "Alcohol education"},
    {8, 15, "Zone II", "Simple advice"},
    {16, 19, "Zone III", "Simple advice plus brief counseling and continued monitoring"},
    {20, 40, "Zone IV", "Referral to specialist for diagnostic evaluation and treatment"},
};

ResponseSet all_items(const std::string& instrument, int count, long long option, bool submitted = true) {
    ResponseSet r{"w1", "R1", {}, submitted ? CompletionStatus::Submitted : CompletionStatus::Partial};
    for (int i = 1; i <= count; ++i)
        r.answers[instrument + ".Q" + std::to_string(i)] = Answer::choice(static_cast<std::size_t>(option));
    return r;
}

PublishedQuestionnaire publish_with(std::vector<ElementRef> elements, Catalog catalog = Catalog::with_builtins()) {
    QuestionnaireRegistry registry;
    QuestionnaireDef def{"q", "Q", "", std::move(elements), 0};
    registry.publish(def, catalog);
    return *registry.find("q", 1);
}

} // namespace

TEST_CASE("audit zones follow the manual table at every integer total") {
    for (const auto& row : kAuditTable)
        for (int t = row.lower; t <= row.upper; ++t) {
            const auto advice = audit_zone(Rational(t));
            CHECK(advice.zone == row.zone);
            CHECK(advice.intervention == row.intervention);
        }
    for (auto [a, b] : {std::pair{7, 8}, {15, 16}, {19, 20}})
        CHECK(audit_zone(Rational(a)).zone != audit_zone(Rational(b)).zone);
    CHECK_THROWS_AS(audit_zone(Rational(-1)), Error);
    CHECK_THROWS_AS(audit_zone(Rational(41)), Error);
}

TEST_CASE("band lookup and band table validation") {
    const BandTable audit = audit_band_table();
    CHECK(validate_band_table("AUDIT", audit).empty());
    CHECK(band_of(audit, 12).label == "Zone II");
    CHECK_THROWS_AS(band_of(audit, Rational(15) / 2), Error);

    BandTable gap{{{0, 3, "a", ""}, {5, 9, "b", ""}}, 1};
    auto findings = validate_band_table("g", gap);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].rule == "band-gap");

    BandTable overlap{{{0, 5, "a", ""}, {4, 9, "b", ""}}, 1};
    CHECK(validate_band_table("g", overlap).at(0).rule == "band-overlap");

    const Rational lo = 0, hi = 10;
    BandTable short_table{{{0, 4, "a", ""}, {5, 9, "b", ""}}, 1};
    CHECK(validate_band_table("g", short_table, &lo, &hi).at(0).rule == "band-coverage");
}

TEST_CASE("builtin catalog") {
    InstrumentLibrary library;
    const auto list = library.list();
    REQUIRE(list.size() == 5);
    CHECK(list[0]->id == kAuditId);
    for (const auto* inst : list) {
        CHECK_FALSE(inst->citation.empty());
        CHECK_NOTHROW(check_instrument(*inst));
    }
    CHECK(library.find(kAuditId)->items.size() == 10);
    CHECK(library.find(kKidscreenId)->items.size() == 27);
    CHECK(library.find(kKidscreenId)->scales.size() == 5);
    CHECK(library.find(kFasId)->items.size() == 4);
    CHECK(library.find(kSelfEfficacyId)->items.size() == 10);
    CHECK(library.find("nope") == nullptr);
}

TEST_CASE("only super-admins register instruments") {
    InstrumentLibrary library;
    Instrument custom = *library.find(kSelfEfficacyId);
    custom.id = "GSE-SHORT";
    CHECK_THROWS_AS(library.register_instrument(custom, Role::Interviewer), Error);
    CHECK(library.register_instrument(custom, Role::SuperAdmin) == "GSE-SHORT");
    CHECK_THROWS_AS(library.register_instrument(custom, Role::SuperAdmin), Error);

    Instrument uncited = custom;
    uncited.id = "X";
    uncited.citation.clear();
    try {
        library.register_instrument(uncited, Role::SuperAdmin);
        FAIL("expected MissingCitation");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingCitation);
    }

    Instrument bad_formula = custom;
    bad_formula.id = "Y";
    bad_formula.scales = {{"total", "sum(Q1..Q11)", std::nullopt}};
    try {
        library.register_instrument(bad_formula, Role::SuperAdmin);
        FAIL("expected UnknownItem");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownItem);
    }
}

TEST_CASE("questionnaire validation findings") {
    Catalog catalog = Catalog::with_builtins();
    catalog.questions["age"] = Question{"age", "Age", QuestionKind::Numeric, {}, false, true};
    catalog.questions["name"] = Question{"name", "Name", QuestionKind::FreeText, {}, true, true};
    catalog.questions["c1"] =
        Question{"c1", "C1", QuestionKind::SingleChoice, {{"no", 0}, {"yes", 1}}, false, true};
    catalog.questions["c2"] =
        Question{"c2", "C2", QuestionKind::SingleChoice, {{"no", 0}, {"yes", 1}}, false, true};
    catalog.groups["g"] = QuestionGroup{"g", {"c1", "c2"}, "c1 + c3", std::nullopt};
    catalog.groups["t"] = QuestionGroup{"t", {"c1", "name"}, "c1 + name", std::nullopt};

    auto rules = [&](std::vector<ElementRef> elements) {
        std::vector<std::string> out;
        for (const auto& f : validate_questionnaire({"q", "", "", elements, 0}, catalog))
            out.push_back(f.rule);
        return out;
    };
    CHECK(rules({{ElementKind::Instrument, kAuditId}, {ElementKind::Question, "age"}}).empty());
    CHECK(rules({{ElementKind::Question, "missing"}}) == std::vector<std::string>{"unresolved-element"});
    CHECK(rules({{ElementKind::Group, "g"}}) == std::vector<std::string>{"formula-non-member"});
    CHECK(rules({{ElementKind::Group, "t"}}) == std::vector<std::string>{"formula-free-text"});
    CHECK(rules({{ElementKind::Question, "age"}, {ElementKind::Question, "age"}}) ==
          std::vector<std::string>{"duplicate-element"});

    QuestionnaireRegistry registry;
    try {
        registry.publish({"q", "", "", {{ElementKind::Group, "g"}}, 0}, catalog);
        FAIL("expected PublishRejected");
    } catch (const PublishRejected& e) {
        REQUIRE(e.findings().size() == 1);
        CHECK(std::string(e.what()).find("non-member") != std::string::npos);
    }
    CHECK(registry.latest_version("q") == 0);
}

TEST_CASE("published versions are immutable snapshots") {
    Catalog catalog = Catalog::with_builtins();
    catalog.questions["c1"] =
        Question{"c1", "C1", QuestionKind::SingleChoice, {{"no", 0}, {"yes", 1}}, false, true};
    QuestionnaireRegistry registry;
    QuestionnaireDef def{"q", "Survey", "", {{ElementKind::Question, "c1"}}, 0};
    CHECK(registry.publish(def, catalog) == 1);
    catalog.questions["c1"].prompt = "Changed";
    CHECK(registry.publish(def, catalog) == 2);
    CHECK(registry.find("q", 1)->elements.questions.at("c1").prompt == "C1");
    CHECK(registry.find("q", 2)->elements.questions.at("c1").prompt == "Changed");
    CHECK(registry.find("q", 3) == nullptr);
    CHECK(registry.latest_version("q") == 2);
}

TEST_CASE("scoring AUDIT with bands") {
    const auto published = publish_with({{ElementKind::Instrument, kAuditId}});
    const ScoreReport ones = score_response(published, all_items(kAuditId, 10, 1));
    REQUIRE(ones.entries.size() == 1);
    CHECK(ones.entries[0].scale == "AUDIT.total");
    CHECK(ones.entries[0].score == 10);
    CHECK(ones.entries[0].band == "Zone II");
    CHECK(ones.entries[0].guidance == "Simple advice");

    const ScoreReport zeros = score_response(published, all_items(kAuditId, 10, 0));
    CHECK(zeros.entries[0].band == "Zone I");

    auto partial = all_items(kAuditId, 10, 1);
    partial.answers.erase("AUDIT.Q4");
    try {
        score_response(published, partial);
        FAIL("expected MissingAnswer");
    } catch (const ScoringError& e) {
        CHECK(e.code() == ErrorCode::MissingAnswer);
        CHECK(e.item() == "Q4");
        CHECK(e.scale() == "AUDIT.total");
    }
    CHECK_THROWS_AS(score_response(published, all_items(kAuditId, 10, 1, false)), Error);
}

TEST_CASE("scoring KIDSCREEN transforms to 0..100") {
    const auto published = publish_with({{ElementKind::Instrument, kKidscreenId}});
    const auto low = score_response(published, all_items(kKidscreenId, 27, 0));
    const auto high = score_response(published, all_items(kKidscreenId, 27, 4));
    REQUIRE(low.entries.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(low.entries[i].score == 0);
        CHECK(high.entries[i].score == 100);
    }
}

TEST_CASE("group formulas with mean skip unanswered members") {
    Catalog catalog = Catalog::with_builtins();
    for (auto id : {"a", "b", "c"})
        catalog.questions[id] =
            Question{id, id, QuestionKind::SingleChoice, {{"0", 0}, {"1", 1}, {"2", 2}}, false, false};
    catalog.groups["g"] = QuestionGroup{"g", {"a", "b", "c"}, "mean(a, b, c)",
                                        BandTable{{{0, 1, "low", "ok"}, {Rational(4) / 3, 2, "high", "check"}},
                                                  Rational(1) / 3}};
    auto published = publish_with({{ElementKind::Group, "g"}}, catalog);
    ResponseSet r{"w1", "R1", {{"a", Answer::choice(2)}, {"c", Answer::choice(1)}}, CompletionStatus::Submitted};
    const auto report = score_response(published, r);
    CHECK(report.entries.at(0).score == Rational(3) / 2);
    CHECK(report.entries.at(0).band == "high");
}
