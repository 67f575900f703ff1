#include <doctest.h>

#include <regex>

#include <surveynet/graph_export.hpp>
#include <surveynet/report.hpp>

using namespace surveynet;

namespace {

struct Cohort {
    Sociomatrix matrix;
    AnalysisResult analysis;
    std::vector<ScoreReport> scores;
};

ScoreReport score(const std::string& id, long long audit, long long fas, long long gse) {
    ScoreReport r;
    r.wave_id = "w1";
    r.respondent_id = id;
    const auto zone = audit_zone(Rational(audit));
    r.entries.push_back({"AUDIT.total", Rational(audit), zone.zone, zone.intervention});
    r.entries.push_back({"FAS-II.total", Rational(fas), std::nullopt, std::nullopt});
    r.entries.push_back({"GSE.total", Rational(gse), std::nullopt, std::nullopt});
    return r;
}

// Star into "hub" plus a separate pair, so hub is the sole most-nominated node.
Cohort cohort() {
    Cohort c;
    EdgeList e{"friendship", "w1", {}};
    for (auto s : {"a", "b", "c", "d"})
        e.edges.push_back({s, "hub", 1});
    e.edges.push_back({"hub", "a", 1});
    e.edges.push_back({"x", "y", 1});
    e.edges.push_back({"y", "x", 1});
    const std::vector<std::string> nodes{"hub", "a", "b", "c", "d", "x", "y"};
    c.matrix = build_matrix(e, nodes);
    c.analysis = analyze(c.matrix, "friendship", "w1");
    long long audit = 0;
    for (const auto& n : nodes) {
        c.scores.push_back(score(n, audit, audit / 3, 40 - audit));
        audit += 3;
    }
    return c;
}

} // namespace

TEST_CASE("templates fill placeholders and reject unknown ones") {
    const auto t = ReportTemplates::parse(R"({"en": {"hi": "Hello {name}!"}})");
    CHECK(t.render("hi", {{"name", "Ana"}}) == "Hello Ana!");
    CHECK_THROWS_AS(t.render("hi", {}), Error);
    CHECK_THROWS_AS(ReportTemplates::parse(R"({"es": {}})"), Error);
    CHECK_NOTHROW(ReportTemplates::defaults().get("network"));
}

TEST_CASE("percentile ranks and adjectives") {
    const std::vector<double> v{5, 1, 1, 3};
    CHECK(percentile_rank(v, 0) == 100);
    CHECK(percentile_rank(v, 1) == 0);
    CHECK(percentile_rank(v, 3) == 67);
    CHECK(percentile_rank({2}, 0) == 50);
    const PercentileBands b;
    CHECK(level_key(90, b) == "level.very_high");
    CHECK(level_key(89, b) == "level.high");
    CHECK(level_key(70, b) == "level.high");
    CHECK(level_key(30, b) == "level.moderate");
    CHECK(level_key(29, b) == "level.low");
}

TEST_CASE("individual report") {
    const Cohort c = cohort();
    const auto hub = individual_report(&c.scores[0], c.analysis, c.matrix, "hub");
    CHECK(hub.network_paragraph.find("a very high level of popularity") != std::string::npos);
    CHECK(hub.consumption_paragraph.find("Zone I") != std::string::npos);
    CHECK(hub.consumption_paragraph.find("Alcohol education") != std::string::npos);
    CHECK(hub.audit_score == Rational(0));
    CHECK(hub.community_size >= 2);
    CHECK(individual_report(&c.scores[0], c.analysis, c.matrix, "hub") == hub);

    // every percentile in the text equals a highlight field
    std::regex pct("percentile ([0-9]+)");
    std::vector<int> in_text;
    for (std::sregex_iterator it(hub.network_paragraph.begin(), hub.network_paragraph.end(), pct), end; it != end; ++it)
        in_text.push_back(std::stoi((*it)[1]));
    REQUIRE(in_text.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(in_text[i] == hub.highlights[i].percentile);

    CHECK_THROWS_AS(individual_report(nullptr, c.analysis, c.matrix, "hub"), Error);
    try {
        individual_report(nullptr, c.analysis, c.matrix, "a");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoData);
    }
}

TEST_CASE("report rendering round-trips the structured form") {
    const Cohort c = cohort();
    const auto report = individual_report(&c.scores[1], c.analysis, c.matrix, "a");
    const std::string json = render_report(report, ReportFormat::Structured);
    CHECK(parse_individual_report(json) == report);
    CHECK(render_report(parse_individual_report(json), ReportFormat::Structured) == json);
    CHECK_FALSE(render_report(report, ReportFormat::PlainText).empty());
    CHECK_THROWS_AS(report_format_from_string("pdf"), Error);

    const auto group = group_report(c.analysis, c.scores);
    const std::string gjson = render_report(group, report_format_from_string("json"));
    CHECK(parse_group_report(gjson) == group);
}

TEST_CASE("group report") {
    const Cohort c = cohort();
    const auto g = group_report(c.analysis, c.scores);
    std::size_t total = 0;
    for (const auto& row : g.communities)
        total += row.size;
    CHECK(total == 7);
    REQUIRE(g.correlations.size() == 2);
    CHECK(g.correlations[0].scale == "FAS-II.total");
    REQUIRE(g.correlations[0].spearman);
    CHECK(*g.correlations[0].spearman == doctest::Approx(1.0));
    CHECK(*g.correlations[1].spearman == doctest::Approx(-1.0));

    std::vector<ScoreReport> flat;
    for (const auto& s : c.scores)
        flat.push_back(score(s.respondent_id, 4, 2, 20));
    const auto f = group_report(c.analysis, flat);
    CHECK_FALSE(f.correlations[0].spearman);
    CHECK(f.summary.find("not computable") != std::string::npos);

    CHECK_THROWS_AS(group_report(c.analysis, {c.scores[0]}), Error);
}

TEST_CASE("spearman with ties") {
    CHECK(*spearman({1, 2, 3}, {10, 20, 30}) == doctest::Approx(1.0));
    CHECK(*spearman({1, 2, 2, 3}, {1, 2, 2, 3}) == doctest::Approx(1.0));
    CHECK_FALSE(spearman({1, 1, 1}, {1, 2, 3}));
}

TEST_CASE("graph exports encode zone as size and sex as colour") {
    const Cohort c = cohort();
    EdgeList e = matrix_edges(c.matrix, "friendship", "w1");
    GraphExportInput input{&c.analysis, &e, {}, {}};
    input.nodes["hub"] = NodeInfo{"R-00000001", "female", "Zone I", Rational(0)};
    input.nodes["a"] = NodeInfo{"a", "male", "Zone IV", Rational(30)};
    input.exported_id["hub"] = "R-00000001";
    const auto doc = node_link_document(input);
    REQUIRE(doc["nodes"].size() == 7);
    CHECK(doc["nodes"][0]["id"] == "R-00000001");
    CHECK(doc["nodes"][0]["size"] == node_size(1));
    CHECK(doc["nodes"][1]["size"] == node_size(4));
    CHECK(doc["nodes"][0]["color"] == sex_color("female"));
    CHECK(sex_color("F") != sex_color("M"));
    CHECK(doc["links"].size() == e.edges.size());
    const std::string gexf = write_gexf(input);
    CHECK(gexf.find("<gexf") != std::string::npos);
    CHECK(gexf.find("R-00000001") != std::string::npos);
    CHECK(gexf.find("\"hub\"") == std::string::npos);
    CHECK(write_gexf(input) == gexf);
}
