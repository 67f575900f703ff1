#include <surveynet/sna.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include <surveynet/error.hpp>

namespace surveynet {

namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

void require_one_mode(const Sociomatrix& matrix, const char* what) {
    if (matrix.mode() != NetworkMode::OneMode)
        throw Error(ErrorCode::TwoModeInput, std::string(what) + " needs a one-mode sociomatrix");
}

void check_stop(const std::stop_token& stop) {
    if (stop.stop_requested())
        throw Error(ErrorCode::Cancelled, "analysis cancelled");
}

std::map<std::string, std::size_t> index_map(const std::vector<std::string>& ids, const char* what) {
    std::map<std::string, std::size_t> out;
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (!out.emplace(ids[i], i).second)
            throw Error(ErrorCode::InvalidArgument, std::string("duplicate ") + what + " id " + ids[i]);
    return out;
}

/// Hop distances from `source` following `adjacency`.
std::vector<std::size_t> bfs(const std::vector<std::vector<std::size_t>>& adjacency, std::size_t source) {
    std::vector<std::size_t> dist(adjacency.size(), kUnreached);
    std::queue<std::size_t> frontier;
    dist[source] = 0;
    frontier.push(source);
    while (!frontier.empty()) {
        auto u = frontier.front();
        frontier.pop();
        for (auto w : adjacency[u]) {
            if (dist[w] == kUnreached) {
                dist[w] = dist[u] + 1;
                frontier.push(w);
            }
        }
    }
    return dist;
}

std::vector<std::string> top_k(const Sociomatrix& matrix, std::vector<std::size_t> candidates,
                               const std::vector<double>& score, std::size_t k) {
    const auto& ids = matrix.rows();
    std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
        if (score[a] != score[b])
            return score[a] > score[b];
        return ids[a] < ids[b];
    });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < candidates.size() && i < k; ++i)
        out.push_back(ids[candidates[i]]);
    return out;
}

} // namespace

std::optional<std::size_t> Sociomatrix::row_index(const std::string& id) const {
    for (std::size_t i = 0; i < rows_.size(); ++i)
        if (rows_[i] == id)
            return i;
    return std::nullopt;
}

std::vector<std::vector<std::size_t>> Sociomatrix::successors() const {
    std::vector<std::vector<std::size_t>> out(rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i)
        for (std::size_t j = 0; j < columns_.size(); ++j)
            if (tie(i, j))
                out[i].push_back(j);
    return out;
}

Sociomatrix build_matrix(const EdgeList& edges, const std::vector<std::string>& nodes) {
    Sociomatrix m;
    m.mode_ = NetworkMode::OneMode;
    m.rows_ = nodes;
    m.columns_ = nodes;
    const auto index = index_map(nodes, "node");
    const std::size_t n = nodes.size();
    m.weights_.assign(n * n, Rational(0));
    m.dense_.assign(n * n, 0.0);
    for (const auto& e : edges.edges) {
        auto s = index.find(e.source);
        auto t = index.find(e.target);
        if (s == index.end() || t == index.end())
            throw Error(ErrorCode::UnknownEndpoint, "edge " + e.source + "->" + e.target + " has an unknown endpoint");
        if (s->second == t->second)
            throw Error(ErrorCode::SelfLoop, "self-loop on " + e.source + " in a one-mode matrix");
        if (e.weight < 0)
            throw Error(ErrorCode::InvalidArgument, "negative tie weight on " + e.source + "->" + e.target);
        m.weights_[s->second * n + t->second] = e.weight;
        m.dense_[s->second * n + t->second] = to_double(e.weight);
    }
    return m;
}

Sociomatrix build_matrix(const EdgeList& edges, const std::vector<std::string>& rows,
                         const std::vector<std::string>& columns) {
    Sociomatrix m;
    m.mode_ = NetworkMode::TwoMode;
    m.rows_ = rows;
    m.columns_ = columns;
    const auto row_index = index_map(rows, "row");
    const auto column_index = index_map(columns, "column");
    const std::size_t width = columns.size();
    m.weights_.assign(rows.size() * width, Rational(0));
    m.dense_.assign(rows.size() * width, 0.0);
    for (const auto& e : edges.edges) {
        auto s = row_index.find(e.source);
        auto t = column_index.find(e.target);
        if (s == row_index.end() || t == column_index.end())
            throw Error(ErrorCode::UnknownEndpoint, "edge " + e.source + "->" + e.target + " has an unknown endpoint");
        if (e.weight < 0)
            throw Error(ErrorCode::InvalidArgument, "negative tie weight on " + e.source + "->" + e.target);
        m.weights_[s->second * width + t->second] = e.weight;
        m.dense_[s->second * width + t->second] = to_double(e.weight);
    }
    return m;
}

EdgeList matrix_edges(const Sociomatrix& matrix, const std::string& relation, const std::string& wave_id) {
    EdgeList out;
    out.relation = relation;
    out.wave_id = wave_id;
    for (std::size_t i = 0; i < matrix.rows().size(); ++i)
        for (std::size_t j = 0; j < matrix.columns().size(); ++j)
            if (matrix.at(i, j) > 0)
                out.edges.push_back({matrix.rows()[i], matrix.columns()[j], matrix.at(i, j)});
    return out;
}

CentralityVector popularity(const Sociomatrix& matrix) {
    require_one_mode(matrix, "popularity");
    const std::size_t n = matrix.size();
    CentralityVector out{"popularity", std::vector<double>(n, 0.0), "unweighted in-degree"};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (matrix.tie(i, j))
                out.values[j] += 1.0;
    return out;
}

CentralityVector mediation(const Sociomatrix& matrix, std::stop_token stop) {
    require_one_mode(matrix, "mediation");
    const std::size_t n = matrix.size();
    CentralityVector out{"mediation", std::vector<double>(n, 0.0),
                         "directed betweenness / ((n-1)(n-2)), unweighted hops"};
    if (n < 3)
        return out;
    const auto adjacency = matrix.successors();
    std::vector<std::size_t> order;
    std::vector<std::vector<std::size_t>> preds(n);
    std::vector<double> sigma(n);
    std::vector<double> delta(n);
    std::vector<std::size_t> dist(n);
    for (std::size_t s = 0; s < n; ++s) {
        check_stop(stop);
        order.clear();
        for (auto& p : preds)
            p.clear();
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        std::fill(dist.begin(), dist.end(), kUnreached);
        sigma[s] = 1.0;
        dist[s] = 0;
        std::queue<std::size_t> frontier;
        frontier.push(s);
        while (!frontier.empty()) {
            auto v = frontier.front();
            frontier.pop();
            order.push_back(v);
            for (auto w : adjacency[v]) {
                if (dist[w] == kUnreached) {
                    dist[w] = dist[v] + 1;
                    frontier.push(w);
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                    preds[w].push_back(v);
                }
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const auto w = *it;
            for (auto v : preds[w])
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            if (w != s)
                out.values[w] += delta[w];
        }
    }
    const double scale = static_cast<double>((n - 1) * (n - 2));
    for (auto& v : out.values)
        v /= scale;
    return out;
}

CentralityVector influence(const Sociomatrix& matrix, const InfluenceOptions& options) {
    require_one_mode(matrix, "influence");
    const std::size_t n = matrix.size();
    CentralityVector out{"influence", {}, "damped nomination flow, d = " + std::to_string(options.damping) + ", sum 1"};
    if (n == 0)
        return out;
    std::vector<double> out_weight(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out_weight[i] += matrix.weight(i, j);
    const double uniform = 1.0 / static_cast<double>(n);
    std::vector<double> x(n, uniform);
    std::vector<double> next(n);
    for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
        double dangling = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (out_weight[i] == 0.0)
                dangling += x[i];
        const double base = (1.0 - options.damping) * uniform + options.damping * dangling * uniform;
        std::fill(next.begin(), next.end(), base);
        for (std::size_t i = 0; i < n; ++i) {
            if (out_weight[i] == 0.0)
                continue;
            const double share = options.damping * x[i] / out_weight[i];
            for (std::size_t j = 0; j < n; ++j)
                if (matrix.tie(i, j))
                    next[j] += share * matrix.weight(i, j);
        }
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            change += std::abs(next[i] - x[i]);
        x.swap(next);
        if (change < options.tolerance)
            break;
    }
    const double total = std::accumulate(x.begin(), x.end(), 0.0);
    for (auto& v : x)
        v /= total;
    out.values = std::move(x);
    return out;
}

std::size_t Partition::community_count() const {
    return std::set<std::size_t>(community.begin(), community.end()).size();
}

std::vector<std::string> suggest_influencers(const Sociomatrix& matrix, const std::string& node, std::size_t k,
                                             const CentralityVector* influence_scores) {
    require_one_mode(matrix, "suggest_influencers");
    auto v = matrix.row_index(node);
    if (!v)
        throw Error(ErrorCode::NotFound, "node " + node + " is not in the graph");
    CentralityVector computed;
    if (influence_scores == nullptr) {
        computed = influence(matrix);
        influence_scores = &computed;
    }
    std::vector<std::size_t> named;
    for (std::size_t j = 0; j < matrix.size(); ++j)
        if (matrix.tie(*v, j))
            named.push_back(j);
    return top_k(matrix, std::move(named), influence_scores->values, k);
}

std::vector<std::size_t> mediator_counts(const Sociomatrix& matrix, std::size_t target) {
    require_one_mode(matrix, "mediator_counts");
    const std::size_t n = matrix.size();
    std::vector<std::size_t> counts(n, 0);
    const auto forward = matrix.successors();
    std::vector<std::vector<std::size_t>> backward(n);
    for (std::size_t u = 0; u < n; ++u)
        for (auto w : forward[u])
            backward[w].push_back(u);
    const auto to_target = bfs(backward, target);
    for (std::size_t s = 0; s < n; ++s) {
        if (s == target || to_target[s] == kUnreached)
            continue;
        const auto from_source = bfs(forward, s);
        for (std::size_t w = 0; w < n; ++w) {
            if (w == s || w == target || from_source[w] == kUnreached || to_target[w] == kUnreached)
                continue;
            if (from_source[w] + to_target[w] == to_target[s])
                ++counts[w];
        }
    }
    return counts;
}

std::vector<std::string> suggest_mediators(const Sociomatrix& matrix, const std::string& node, std::size_t k) {
    require_one_mode(matrix, "suggest_mediators");
    auto v = matrix.row_index(node);
    if (!v)
        throw Error(ErrorCode::NotFound, "node " + node + " is not in the graph");
    if (matrix.size() < 3)
        return {};
    const auto counts = mediator_counts(matrix, *v);
    std::vector<std::size_t> candidates;
    std::vector<double> score(counts.size());
    for (std::size_t w = 0; w < counts.size(); ++w) {
        score[w] = static_cast<double>(counts[w]);
        if (counts[w] > 0)
            candidates.push_back(w);
    }
    return top_k(matrix, std::move(candidates), score, k);
}

ChurnReport wave_churn(const EdgeList& before, const EdgeList& after) {
    if (before.relation != after.relation)
        throw Error(ErrorCode::RelationMismatch,
                    "cannot compare relation '" + before.relation + "' with '" + after.relation + "'");
    using Pair = std::pair<std::string, std::string>;
    std::set<Pair> a;
    std::set<Pair> b;
    for (const auto& e : before.edges)
        a.emplace(e.source, e.target);
    for (const auto& e : after.edges)
        b.emplace(e.source, e.target);
    ChurnReport out;
    std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(out.added));
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out.removed));
    std::vector<Pair> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    const auto united = a.size() + b.size() - common.size();
    out.jaccard = united == 0 ? Rational(1)
                              : Rational(static_cast<long>(common.size())) / Rational(static_cast<long>(united));
    return out;
}

std::optional<std::size_t> AnalysisResult::index_of(const std::string& node) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i] == node)
            return i;
    return std::nullopt;
}

AnalysisResult analyze(const Sociomatrix& matrix, const std::string& relation, const std::string& wave_id,
                       std::stop_token stop) {
    AnalysisResult result;
    result.relation = relation;
    result.wave_id = wave_id;
    result.nodes = matrix.rows();
    result.popularity = popularity(matrix);
    result.mediation = mediation(matrix, stop);
    result.influence = influence(matrix);
    result.partition = louvain(matrix, stop);
    return result;
}

} // namespace surveynet
