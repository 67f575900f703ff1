#include <doctest.h>

#include <random>

#include <surveynet/relational.hpp>

#include "roster_property.hpp"

using namespace surveynet;

namespace {

Wave make_wave(std::vector<std::string> roster) {
    return Wave{"w1", "q", 1, "g", std::move(roster), 0, "T1", false};
}

} // namespace

TEST_CASE("instantiation gives every respondent the roster minus self") {
    const auto tmpl = roster_property::friendship();
    const auto inst = instantiate(tmpl, make_wave({"S01", "S02", "S03"}), {{"S02", "Ana"}});
    REQUIRE(inst.items.at("S01").size() == 2);
    CHECK(inst.items.at("S01")[0].alter_id == "S02");
    CHECK(inst.items.at("S01")[0].instance_id == "F[S02]");
    CHECK(render_prompt(tmpl, inst, "S02") == "How close are you to Ana?");
    CHECK(render_prompt(tmpl, inst, "S03") == "How close are you to S03?");
    CHECK_THROWS_AS(instantiate(tmpl, make_wave({"S01"})), Error);
}

TEST_CASE("relational item ids parse back") {
    CHECK(relational_item_id("F12", "S03") == "F12[S03]");
    const auto parsed = parse_relational_item_id("F12[S03]");
    REQUIRE(parsed);
    CHECK(parsed->first == "F12");
    CHECK(parsed->second == "S03");
    CHECK_FALSE(parse_relational_item_id("AUDIT.Q1"));
    CHECK_FALSE(parse_relational_item_id("F[]"));
}

TEST_CASE("template validation") {
    auto tmpl = roster_property::friendship();
    CHECK(validate_template(tmpl).empty());
    tmpl.tie_scale = {{"none", 0}, {"some", 2}, {"more", 1}};
    CHECK_FALSE(validate_template(tmpl).empty());
}

TEST_CASE("edge extraction uses submitted answers with positive ties") {
    const auto tmpl = roster_property::friendship();
    const auto inst = instantiate(tmpl, make_wave({"A", "B", "C"}));
    std::map<std::string, ResponseSet> responses;
    responses["A"] = ResponseSet{"w1", "A", {{"F[B]", Answer::choice(3)}, {"F[C]", Answer::choice(0)}},
                                 CompletionStatus::Submitted};
    responses["B"] = ResponseSet{"w1", "B", {{"F[C]", Answer::choice(1)}}, CompletionStatus::Submitted};
    responses["C"] = ResponseSet{"w1", "C", {{"F[A]", Answer::choice(2)}}, CompletionStatus::Partial};
    const EdgeList edges = extract_edges(tmpl, inst, responses);
    REQUIRE(edges.edges.size() == 2);
    CHECK(edges.edges[0] == Edge{"A", "B", 3});
    CHECK(edges.edges[1] == Edge{"B", "C", 1});
    CHECK(edges.relation == "friendship");

    const std::string csv = edges_to_csv(edges);
    CHECK(csv.rfind("source,target,weight,relation,wave\n", 0) == 0);
    CHECK(edges_from_csv(csv) == edges);
}

TEST_CASE("roster edits on a closed wave are refused") {
    const auto tmpl = roster_property::friendship();
    const auto inst = instantiate(tmpl, make_wave({"A", "B", "C"}));
    CHECK_THROWS_AS(apply_roster_edit(tmpl, inst, {}, RosterEdit::add("D"), true), Error);
    CHECK_THROWS_AS(apply_roster_edit(tmpl, inst, {}, RosterEdit::remove("Z"), false), Error);
}

TEST_CASE("removing a person drops answers about them and retires their response") {
    const auto tmpl = roster_property::friendship();
    const auto inst = instantiate(tmpl, make_wave({"A", "B", "C"}));
    std::map<std::string, ResponseSet> responses;
    responses["A"] = ResponseSet{"w1", "A", {{"F[B]", Answer::choice(3)}, {"F[C]", Answer::choice(1)}},
                                 CompletionStatus::Submitted};
    responses["C"] = ResponseSet{"w1", "C", {{"F[A]", Answer::choice(2)}}, CompletionStatus::Submitted};
    const auto result = apply_roster_edit(tmpl, inst, responses, RosterEdit::remove("C"), false);
    CHECK(result.instance.roster == std::vector<std::string>{"A", "B"});
    CHECK(result.responses.at("A").answers.size() == 1);
    CHECK(result.responses.at("A").answers.count("F[B]") == 1);
    REQUIRE(result.retired.size() == 1);
    CHECK(result.retired[0].respondent_id == "C");
}

TEST_CASE("random roster edit sequences keep alters in step") {
    std::mt19937_64 rng(7);
    for (int run = 0; run < 50; ++run)
        CHECK(roster_property::run(rng, 20, 30) == "");
}
