#pragma once

// Reference implementations used by the unit and acceptance tests. They share no code with the
// library beyond the Rational type.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <surveynet/rational.hpp>

namespace oracle {

using surveynet::Rational;

// ---------------------------------------------------------------- formulas

enum class Fn { Sum, Mean, Min, Max, Count };

struct Node {
    enum class Kind { Num, Ref, Bin, Call } kind = Kind::Num;
    long long num = 0;
    std::string ref;
    char op = '+';
    std::unique_ptr<Node> lhs, rhs;
    Fn fn = Fn::Sum;
    std::vector<std::string> refs;
};

/// Outcome of one evaluation: a value or an error tag ("missing:<item>" or "div0").
struct Outcome {
    std::optional<Rational> value;
    std::string error;

    bool operator==(const Outcome&) const = default;
};

struct Failure {
    std::string tag;
};

inline Rational interpret(const Node& n, const std::map<std::string, Rational>& answers) {
    switch (n.kind) {
    case Node::Kind::Num:
        return Rational(n.num);
    case Node::Kind::Ref: {
        auto it = answers.find(n.ref);
        if (it == answers.end())
            throw Failure{"missing:" + n.ref};
        return it->second;
    }
    case Node::Kind::Bin: {
        Rational a = interpret(*n.lhs, answers);
        Rational b = interpret(*n.rhs, answers);
        if (n.op == '+')
            return a + b;
        if (n.op == '-')
            return a - b;
        if (n.op == '*')
            return a * b;
        if (b == 0)
            throw Failure{"div0"};
        return a / b;
    }
    case Node::Kind::Call: {
        std::vector<Rational> present;
        for (const auto& r : n.refs) {
            auto it = answers.find(r);
            if (it != answers.end())
                present.push_back(it->second);
            else if (n.fn == Fn::Sum || n.fn == Fn::Min || n.fn == Fn::Max)
                throw Failure{"missing:" + r};
        }
        switch (n.fn) {
        case Fn::Count:
            return Rational(static_cast<long long>(present.size()));
        case Fn::Mean: {
            if (present.empty())
                throw Failure{"missing:" + n.refs.front()};
            Rational s = 0;
            for (const auto& v : present)
                s += v;
            return s / Rational(static_cast<long long>(present.size()));
        }
        case Fn::Sum: {
            Rational s = 0;
            for (const auto& v : present)
                s += v;
            return s;
        }
        case Fn::Min:
            return *std::min_element(present.begin(), present.end());
        case Fn::Max:
            return *std::max_element(present.begin(), present.end());
        }
    }
    }
    return 0;
}

inline Outcome run(const Node& n, const std::map<std::string, Rational>& answers) {
    try {
        return {interpret(n, answers), {}};
    } catch (const Failure& f) {
        return {std::nullopt, f.tag};
    }
}

inline const char* fn_name(Fn fn) {
    switch (fn) {
    case Fn::Sum: return "sum";
    case Fn::Mean: return "mean";
    case Fn::Min: return "min";
    case Fn::Max: return "max";
    case Fn::Count: return "count_answered";
    }
    return "";
}

/// Fully parenthesised text with random extra whitespace.
inline std::string to_source(const Node& n, std::mt19937_64& rng) {
    auto space = [&] { return std::uniform_int_distribution<int>(0, 3)(rng) == 0 ? " " : ""; };
    switch (n.kind) {
    case Node::Kind::Num:
        return std::to_string(n.num);
    case Node::Kind::Ref:
        return n.ref;
    case Node::Kind::Bin:
        return "(" + to_source(*n.lhs, rng) + space() + n.op + space() + to_source(*n.rhs, rng) + ")";
    case Node::Kind::Call: {
        std::string s = std::string(fn_name(n.fn)) + "(";
        for (std::size_t i = 0; i < n.refs.size(); ++i)
            s += (i ? "," + std::string(space()) : "") + n.refs[i];
        return s + ")";
    }
    }
    return {};
}

struct FormulaGen {
    std::mt19937_64& rng;
    std::vector<std::string> items;
    int max_depth = 5;
    std::vector<bool> used_fn = std::vector<bool>(5, false);

    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

    std::unique_ptr<Node> leaf() {
        auto n = std::make_unique<Node>();
        const int r = pick(0, 2);
        if (r == 0) {
            n->kind = Node::Kind::Num;
            n->num = pick(0, 9);
        } else if (r == 1) {
            n->kind = Node::Kind::Ref;
            n->ref = items[pick(0, static_cast<int>(items.size()) - 1)];
        } else {
            n->kind = Node::Kind::Call;
            n->fn = static_cast<Fn>(pick(0, 4));
            used_fn[static_cast<int>(n->fn)] = true;
            const int count = pick(1, 4);
            for (int i = 0; i < count; ++i)
                n->refs.push_back(items[pick(0, static_cast<int>(items.size()) - 1)]);
        }
        return n;
    }

    std::unique_ptr<Node> make(int depth) {
        if (depth >= max_depth || pick(0, 3) == 0)
            return leaf();
        auto n = std::make_unique<Node>();
        n->kind = Node::Kind::Bin;
        n->op = "+-*/"[pick(0, 3)];
        n->lhs = make(depth + 1);
        n->rhs = make(depth + 1);
        return n;
    }

    /// Answers with small values (zeros included to provoke division by zero) and random gaps.
    std::map<std::string, Rational> answers() {
        std::map<std::string, Rational> out;
        for (const auto& id : items)
            if (pick(0, 4) != 0)
                out[id] = Rational(pick(-2, 4));
        return out;
    }
};

// ---------------------------------------------------------------- graphs

/// Dense weight matrix, w[i][j] > 0 is a tie i -> j.
using Dense = std::vector<std::vector<double>>;

inline Dense random_digraph(std::mt19937_64& rng, std::size_t n, double density, bool weighted) {
    Dense w(n, std::vector<double>(n, 0.0));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> wd(1, 3);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && u(rng) < density)
                w[i][j] = weighted ? wd(rng) : 1.0;
    return w;
}

inline std::vector<double> in_degree(const Dense& w) {
    std::vector<double> out(w.size(), 0.0);
    for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = 0; j < w.size(); ++j)
            if (w[i][j] > 0)
                out[j] += 1.0;
    return out;
}

/// Floyd-Warshall hop distances; -1 means unreachable.
inline std::vector<std::vector<int>> hop_distances(const Dense& w) {
    const std::size_t n = w.size();
    const int inf = std::numeric_limits<int>::max() / 4;
    std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
    for (std::size_t i = 0; i < n; ++i) {
        d[i][i] = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (w[i][j] > 0)
                d[i][j] = 1;
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    for (auto& row : d)
        for (auto& x : row)
            if (x >= inf)
                x = -1;
    return d;
}

/// Every shortest s -> t path, enumerated by depth-first search.
inline void all_shortest_paths(const Dense& w, std::size_t s, std::size_t t, int length,
                               std::vector<std::vector<std::size_t>>& out) {
    std::vector<std::size_t> path{s};
    std::function<void()> go = [&] {
        if (static_cast<int>(path.size()) - 1 == length) {
            if (path.back() == t)
                out.push_back(path);
            return;
        }
        for (std::size_t next = 0; next < w.size(); ++next) {
            if (w[path.back()][next] > 0 && std::find(path.begin(), path.end(), next) == path.end()) {
                path.push_back(next);
                go();
                path.pop_back();
            }
        }
    };
    go();
}

/// Directed betweenness by explicit path enumeration, divided by (n-1)(n-2).
inline std::vector<double> betweenness(const Dense& w) {
    const std::size_t n = w.size();
    std::vector<double> b(n, 0.0);
    if (n < 3)
        return b;
    const auto d = hop_distances(w);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t t = 0; t < n; ++t) {
            if (s == t || d[s][t] <= 0)
                continue;
            std::vector<std::vector<std::size_t>> paths;
            all_shortest_paths(w, s, t, d[s][t], paths);
            for (const auto& p : paths)
                for (std::size_t k = 1; k + 1 < p.size(); ++k)
                    b[p[k]] += 1.0 / static_cast<double>(paths.size());
        }
    }
    const double norm = static_cast<double>((n - 1) * (n - 2));
    for (auto& x : b)
        x /= norm;
    return b;
}

/// Nodes w that lie strictly inside some shortest s -> target path, counted per source s.
inline std::vector<std::size_t> mediator_counts(const Dense& w, std::size_t target) {
    const std::size_t n = w.size();
    std::vector<std::size_t> counts(n, 0);
    const auto d = hop_distances(w);
    for (std::size_t s = 0; s < n; ++s) {
        if (s == target || d[s][target] <= 0)
            continue;
        std::vector<std::vector<std::size_t>> paths;
        all_shortest_paths(w, s, target, d[s][target], paths);
        std::vector<bool> seen(n, false);
        for (const auto& p : paths)
            for (std::size_t k = 1; k + 1 < p.size(); ++k)
                seen[p[k]] = true;
        for (std::size_t v = 0; v < n; ++v)
            if (seen[v])
                ++counts[v];
    }
    return counts;
}

/// Dense Google-matrix power iteration run to a fixed large number of steps.
inline std::vector<double> pagerank(const Dense& w, double d = 0.85, int steps = 5000) {
    const std::size_t n = w.size();
    if (n == 0)
        return {};
    std::vector<std::vector<double>> g(n, std::vector<double>(n, 0.0)); // g[j][i]: i -> j
    for (std::size_t i = 0; i < n; ++i) {
        double out = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            out += w[i][j];
        for (std::size_t j = 0; j < n; ++j) {
            const double follow = out > 0 ? w[i][j] / out : 1.0 / static_cast<double>(n);
            g[j][i] = d * follow + (1.0 - d) / static_cast<double>(n);
        }
    }
    std::vector<double> x(n, 1.0 / static_cast<double>(n)), y(n);
    for (int step = 0; step < steps; ++step) {
        for (std::size_t j = 0; j < n; ++j) {
            y[j] = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                y[j] += g[j][i] * x[i];
        }
        x.swap(y);
    }
    return x;
}

/// Newman modularity on the symmetrised matrix (W + W^T)/2 with the diagonal ignored.
inline double modularity(const Dense& w, const std::vector<std::size_t>& community) {
    const std::size_t n = w.size();
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    double two_m = 0.0;
    std::vector<double> k(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) {
                a[i][j] = (w[i][j] + w[j][i]) / 2.0;
                k[i] += a[i][j];
                two_m += a[i][j];
            }
    if (two_m <= 0.0)
        return 0.0;
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (community[i] == community[j])
                q += a[i][j] - k[i] * k[j] / two_m;
    return q / two_m;
}

/// Best modularity over every set partition (restricted growth strings).
inline double best_modularity(const Dense& w) {
    const std::size_t n = w.size();
    std::vector<std::size_t> label(n, 0);
    double best = -1.0;
    std::function<void(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t used) {
        if (i == n) {
            best = std::max(best, modularity(w, label));
            return;
        }
        for (std::size_t c = 0; c <= used && c < n; ++c) {
            label[i] = c;
            go(i + 1, std::max(used, c + 1));
        }
    };
    if (n == 0)
        return 0.0;
    go(0, 0);
    return best;
}

inline bool weakly_connected(const Dense& w) {
    const std::size_t n = w.size();
    if (n == 0)
        return true;
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (std::size_t u = 0; u < n; ++u)
            if (!seen[u] && (w[v][u] > 0 || w[u][v] > 0)) {
                seen[u] = true;
                stack.push_back(u);
            }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

} // namespace oracle
