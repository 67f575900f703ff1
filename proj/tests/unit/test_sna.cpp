#include <doctest.h>

#include <cmath>
#include <random>
#include <thread>

#include <surveynet/error.hpp>
#include <surveynet/sna.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace surveynet;

namespace {

EdgeList edges(std::initializer_list<std::tuple<const char*, const char*, long long>> list) {
    EdgeList out{"friendship", "w1", {}};
    for (const auto& [s, t, w] : list)
        out.edges.push_back({s, t, Rational(w)});
    return out;
}

} // namespace

TEST_CASE("matrix construction") {
    const auto m = build_matrix(edges({{"a", "b", 3}, {"b", "c", 1}}), {"a", "b", "c"});
    CHECK(m.size() == 3);
    CHECK(m.at(0, 1) == 3);
    CHECK(m.tie(1, 2));
    CHECK_FALSE(m.tie(2, 1));
    CHECK(matrix_edges(m, "friendship", "w1").edges.size() == 2);
    CHECK_THROWS_AS(build_matrix(edges({{"a", "z", 1}}), {"a", "b"}), Error);
    CHECK_THROWS_AS(build_matrix(edges({{"a", "a", 1}}), {"a", "b"}), Error);

    const auto two = build_matrix(edges({{"a", "club", 1}}), {"a", "b"}, {"club", "team"});
    CHECK(two.mode() == NetworkMode::TwoMode);
    CHECK_THROWS_AS(popularity(two), Error);
    CHECK_THROWS_AS(louvain(two), Error);
}

TEST_CASE("path graph centralities") {
    const auto m = build_matrix(edges({{"a", "b", 1}, {"b", "c", 1}}), {"a", "b", "c"});
    const auto med = mediation(m);
    CHECK(med.values[1] == doctest::Approx(0.5));
    CHECK(med.values[0] == 0.0);
    const auto pop = popularity(m);
    CHECK(pop.values == std::vector<double>{0, 1, 1});
    const auto inf = influence(m);
    double sum = 0;
    for (double v : inf.values)
        sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(inf.values[2] > inf.values[1]);
}

TEST_CASE("centralities agree with the reference implementations") {
    std::mt19937_64 rng(99);
    for (int g = 0; g < 120; ++g) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 7)(rng);
        const auto w = oracle::random_digraph(rng, n, std::uniform_real_distribution<double>(0.1, 0.7)(rng), g % 2);
        const auto m = fixtures::to_matrix(w);
        CHECK(popularity(m).values == oracle::in_degree(w));
        const auto med = mediation(m).values;
        const auto expected = oracle::betweenness(w);
        const auto inf = influence(m).values;
        const auto pr = oracle::pagerank(w);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(med[i] - expected[i]) <= 1e-9);
            CHECK(std::abs(inf[i] - pr[i]) <= 1e-6);
        }
        for (std::size_t t = 0; t < n; ++t)
            CHECK(mediator_counts(m, t) == oracle::mediator_counts(w, t));
    }
}

TEST_CASE("louvain on the barbell finds the two triangles") {
    const auto w = fixtures::barbell();
    const auto p = louvain(fixtures::to_matrix(w));
    CHECK(p.community == std::vector<std::size_t>{0, 0, 0, 1, 1, 1});
    CHECK(p.community_count() == 2);
    CHECK(std::abs(p.modularity - oracle::modularity(w, p.community)) <= 1e-12);
}

TEST_CASE("louvain is near the exhaustive optimum on small graphs") {
    std::mt19937_64 rng(5);
    int checked = 0;
    while (checked < 40) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(3, 7)(rng);
        const auto w = oracle::random_digraph(rng, n, 0.35, true);
        if (!oracle::weakly_connected(w))
            continue;
        ++checked;
        const auto m = fixtures::to_matrix(w);
        const auto p = louvain(m);
        const double best = oracle::best_modularity(w);
        CHECK(p.modularity >= 0.95 * best - 1e-12);
        CHECK(std::abs(p.modularity - oracle::modularity(w, p.community)) <= 1e-12);
        CHECK(std::abs(modularity(m, p.community) - p.modularity) <= 1e-12);
        CHECK(louvain(m).community == p.community);
    }
}

TEST_CASE("graph without ties") {
    const auto m = build_matrix(edges({}), {"a", "b", "c"});
    const auto p = louvain(m);
    CHECK(p.modularity == 0.0);
    CHECK(p.community_count() == 3);
    for (double v : influence(m).values)
        CHECK(v == doctest::Approx(1.0 / 3));
}

TEST_CASE("suggestions") {
    // a names b and c; c is the more influential because d also names it.
    const auto m = build_matrix(edges({{"a", "b", 1}, {"a", "c", 1}, {"d", "c", 1}, {"b", "e", 1}, {"e", "d", 1}}),
                                {"a", "b", "c", "d", "e"});
    const auto inf = suggest_influencers(m, "a", 2);
    REQUIRE(inf.size() == 2);
    CHECK(inf[0] == "c");
    CHECK(inf[1] == "b");
    // shortest paths into d: a->b->e->d, b->e->d, e->d; e mediates for a and b, b for a.
    const auto med = suggest_mediators(m, "d", 3);
    REQUIRE(med.size() == 2);
    CHECK(med[0] == "e");
    CHECK(med[1] == "b");
}

TEST_CASE("wave churn") {
    const auto t1 = edges({{"a", "b", 1}, {"b", "c", 2}});
    const auto t2 = edges({{"a", "b", 3}, {"c", "a", 1}});
    const auto churn = wave_churn(t1, t2);
    CHECK(churn.jaccard == Rational(1) / 3);
    CHECK(churn.added.size() == 1);
    CHECK(churn.removed.size() == 1);
    CHECK(wave_churn(edges({}), edges({})).jaccard == 1);
    auto other = t2;
    other.relation = "advice";
    CHECK_THROWS_AS(wave_churn(t1, other), Error);
}

TEST_CASE("analysis can be cancelled") {
    std::mt19937_64 rng(3);
    const auto m = fixtures::to_matrix(oracle::random_digraph(rng, 60, 0.2, false));
    std::stop_source source;
    source.request_stop();
    try {
        analyze(m, "friendship", "w1", source.get_token());
        FAIL("expected Cancelled");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Cancelled);
    }
    const auto result = analyze(m, "friendship", "w1");
    CHECK(result.nodes.size() == 60);
    CHECK(result.index_of("n5") == 5u);
}
