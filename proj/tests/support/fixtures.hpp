#pragma once

#include <string>
#include <vector>

#include <surveynet/sna.hpp>

#include "oracles.hpp"

namespace fixtures {

inline std::vector<std::string> node_names(std::size_t n) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i)
        names.push_back("n" + std::to_string(i));
    return names;
}

inline surveynet::Sociomatrix to_matrix(const oracle::Dense& w) {
    const auto names = node_names(w.size());
    surveynet::EdgeList edges{"friendship", "w1", {}};
    for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = 0; j < w.size(); ++j)
            if (w[i][j] > 0)
                edges.edges.push_back({names[i], names[j], surveynet::Rational(static_cast<long long>(w[i][j]))});
    return surveynet::build_matrix(edges, names);
}

/// Two triangles {0,1,2} and {3,4,5} joined by the single bridge 2 -> 3.
inline oracle::Dense barbell() {
    oracle::Dense w(6, std::vector<double>(6, 0.0));
    auto tie = [&](int a, int b) { w[a][b] = w[b][a] = 1.0; };
    tie(0, 1);
    tie(1, 2);
    tie(0, 2);
    tie(3, 4);
    tie(4, 5);
    tie(3, 5);
    w[2][3] = 1.0;
    return w;
}

} // namespace fixtures
