#include <surveynet/sna.hpp>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <map>
#include <random>
#include <stdexcept>

#include <surveynet/error.hpp>

namespace surveynet {

namespace {

constexpr double kMinGain = 1e-12;
constexpr std::uint64_t kStarts = 8;
constexpr int kPerturbations = 32;
constexpr std::size_t kThoroughLimit = 64; // KL passes and perturbation only up to this many nodes
constexpr std::uint64_t kPerturbationSeed = 0x5eed;

/// Weighted undirected graph used at every aggregation level. `loop[a]` holds the weight inside
/// node a counted over ordered pairs; `adjacency` excludes loops.
struct LevelGraph {
    std::vector<std::map<std::size_t, double>> adjacency;
    std::vector<double> loop;
    std::vector<double> degree; // loop[a] + sum of adjacency weights
    double total = 0.0;         // sum of degrees (2m)

    std::size_t size() const { return adjacency.size(); }
};

LevelGraph symmetrised(const Sociomatrix& matrix) {
    const std::size_t n = matrix.size();
    LevelGraph g;
    g.adjacency.resize(n);
    g.loop.assign(n, 0.0);
    g.degree.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j)
                continue;
            const double w = (matrix.weight(i, j) + matrix.weight(j, i)) / 2.0;
            if (w > 0.0) {
                g.adjacency[i][j] = w;
                g.degree[i] += w;
            }
        }
        g.total += g.degree[i];
    }
    return g;
}

double level_modularity(const LevelGraph& g, const std::vector<std::size_t>& community) {
    if (g.total <= 0.0)
        return 0.0;
    std::map<std::size_t, double> inside;
    std::map<std::size_t, double> tot;
    for (std::size_t a = 0; a < g.size(); ++a) {
        inside[community[a]] += g.loop[a];
        tot[community[a]] += g.degree[a];
        for (const auto& [b, w] : g.adjacency[a])
            if (community[a] == community[b])
                inside[community[a]] += w;
    }
    double q = 0.0;
    for (const auto& [c, t] : tot)
        q += inside[c] / g.total - (t / g.total) * (t / g.total);
    return q;
}

/// Local moving phase. Returns true when at least one node changed community. With
/// `allow_isolation` a node may also move to an empty community.
bool move_nodes(const LevelGraph& g, std::vector<std::size_t>& community, const std::vector<std::size_t>& order,
                const std::stop_token& stop, bool allow_isolation = false) {
    const std::size_t n = g.size();
    std::vector<double> tot(n, 0.0);
    std::vector<std::size_t> members(n, 0);
    for (std::size_t a = 0; a < n; ++a) {
        tot[community[a]] += g.degree[a];
        ++members[community[a]];
    }
    bool any_move = false;
    for (bool moved = true; moved;) {
        moved = false;
        for (const std::size_t a : order) {
            if (stop.stop_requested())
                throw Error(ErrorCode::Cancelled, "analysis cancelled");
            const std::size_t current = community[a];
            std::map<std::size_t, double> links; // community -> weight from a
            for (const auto& [b, w] : g.adjacency[a])
                links[community[b]] += w;
            tot[current] -= g.degree[a];
            --members[current];
            auto gain = [&](std::size_t c) {
                auto it = links.find(c);
                const double k_in = it == links.end() ? 0.0 : it->second;
                return k_in - tot[c] * g.degree[a] / g.total;
            };
            std::size_t best = current;
            double best_gain = gain(current);
            for (const auto& [c, w] : links) { // ascending community id
                if (c == current)
                    continue;
                const double candidate = gain(c);
                if (candidate > best_gain + kMinGain) {
                    best = c;
                    best_gain = candidate;
                }
            }
            if (allow_isolation && members[current] > 0) {
                const auto empty = std::find(members.begin(), members.end(), 0) - members.begin();
                if (gain(static_cast<std::size_t>(empty)) > best_gain + kMinGain)
                    best = static_cast<std::size_t>(empty);
            }
            tot[best] += g.degree[a];
            ++members[best];
            if (best != current) {
                community[a] = best;
                moved = true;
                any_move = true;
            }
        }
    }
    return any_move;
}

/// Kernighan-Lin style pass: moves every node once, each time taking the best single move (even a
/// losing one), then keeps the best prefix of the sequence. Returns true when Q improved.
bool kl_refine(const LevelGraph& g, std::vector<std::size_t>& community, const std::stop_token& stop) {
    const std::size_t n = g.size();
    std::vector<std::size_t> current = community;
    std::vector<double> tot(n, 0.0);
    std::vector<std::size_t> members(n, 0);
    for (std::size_t a = 0; a < n; ++a) {
        tot[current[a]] += g.degree[a];
        ++members[current[a]];
    }
    std::vector<bool> moved(n, false);
    double delta = 0.0;
    double best_delta = 0.0;
    std::vector<std::size_t> best = community;
    for (std::size_t step = 0; step < n; ++step) {
        if (stop.stop_requested())
            throw Error(ErrorCode::Cancelled, "analysis cancelled");
        bool found = false;
        double move_gain = 0.0;
        std::size_t move_node = 0;
        std::size_t move_target = 0;
        const auto empty = static_cast<std::size_t>(std::find(members.begin(), members.end(), 0) - members.begin());
        for (std::size_t a = 0; a < n; ++a) {
            if (moved[a])
                continue;
            const std::size_t own = current[a];
            std::map<std::size_t, double> links;
            for (const auto& [b, w] : g.adjacency[a])
                links[current[b]] += w;
            auto value = [&](std::size_t c) {
                auto it = links.find(c);
                const double k_in = it == links.end() ? 0.0 : it->second;
                const double t = c == own ? tot[c] - g.degree[a] : tot[c];
                return k_in - t * g.degree[a] / g.total;
            };
            const double stay = value(own);
            std::vector<std::size_t> targets;
            for (const auto& [c, w] : links)
                if (c != own)
                    targets.push_back(c);
            if (members[own] > 1 && empty < n)
                targets.push_back(empty);
            std::sort(targets.begin(), targets.end());
            for (const std::size_t c : targets) {
                const double gain = (value(c) - stay) * 2.0 / g.total;
                if (!found || gain > move_gain + kMinGain) {
                    found = true;
                    move_gain = gain;
                    move_node = a;
                    move_target = c;
                }
            }
        }
        if (!found)
            break;
        const std::size_t from = current[move_node];
        tot[from] -= g.degree[move_node];
        --members[from];
        tot[move_target] += g.degree[move_node];
        ++members[move_target];
        current[move_node] = move_target;
        moved[move_node] = true;
        delta += move_gain;
        if (delta > best_delta + kMinGain) {
            best_delta = delta;
            best = current;
        }
    }
    if (best_delta <= kMinGain)
        return false;
    community = std::move(best);
    return true;
}

/// Relabels communities 0..k-1 by first appearance; returns k.
std::size_t renumber(std::vector<std::size_t>& community) {
    std::map<std::size_t, std::size_t> relabel;
    for (auto& c : community) {
        auto [it, inserted] = relabel.emplace(c, relabel.size());
        c = it->second;
    }
    return relabel.size();
}

LevelGraph aggregate(const LevelGraph& g, const std::vector<std::size_t>& community, std::size_t count) {
    LevelGraph out;
    out.adjacency.resize(count);
    out.loop.assign(count, 0.0);
    out.degree.assign(count, 0.0);
    out.total = g.total;
    for (std::size_t a = 0; a < g.size(); ++a) {
        const auto ca = community[a];
        out.loop[ca] += g.loop[a];
        out.degree[ca] += g.degree[a];
        for (const auto& [b, w] : g.adjacency[a]) {
            const auto cb = community[b];
            if (ca == cb)
                out.loop[ca] += w;
            else
                out.adjacency[ca][cb] += w;
        }
    }
    return out;
}

} // namespace

double modularity(const Sociomatrix& matrix, const std::vector<std::size_t>& community) {
    if (matrix.mode() != NetworkMode::OneMode)
        throw Error(ErrorCode::TwoModeInput, "modularity needs a one-mode sociomatrix");
    if (community.size() != matrix.size())
        throw Error(ErrorCode::InvalidArgument, "partition size does not match the graph");
    return level_modularity(symmetrised(matrix), community);
}

namespace {

/// Visiting order for a level of `size` nodes: index order for start 0, reversed for start 1,
/// then fixed pseudo-random permutations.
std::vector<std::size_t> visit_order(std::size_t size, std::uint64_t start) {
    std::vector<std::size_t> order(size);
    for (std::size_t i = 0; i < size; ++i)
        order[i] = i;
    if (start == 1) {
        std::reverse(order.begin(), order.end());
    } else if (start > 1) {
        std::mt19937_64 rng(start);
        for (std::size_t i = size; i > 1; --i)
            std::swap(order[i - 1], order[rng() % i]);
    }
    return order;
}

/// Levels, single-node refinement and Kernighan-Lin passes from `initial` until Q stops improving.
Partition optimise(const LevelGraph& original, std::vector<std::size_t> initial, std::uint64_t start,
                   const std::stop_token& stop) {
    Partition result;
    result.community = std::move(initial);
    double quality = level_modularity(original, result.community);
    auto accept = [&](std::vector<std::size_t> candidate) {
        const double next_quality = level_modularity(original, candidate);
        if (next_quality < quality - kMinGain)
            throw std::logic_error("louvain: modularity decreased between passes");
        if (next_quality - quality <= kMinGain)
            return false;
        result.community = std::move(candidate);
        quality = next_quality;
        return true;
    };

    for (bool improved = true; improved;) {
        improved = false;
        // Levels: aggregate the current partition, then move super-nodes.
        for (;;) {
            std::vector<std::size_t> base = result.community;
            const std::size_t count = renumber(base);
            const LevelGraph graph = aggregate(original, base, count);
            std::vector<std::size_t> level(count);
            for (std::size_t a = 0; a < count; ++a)
                level[a] = a;
            if (!move_nodes(graph, level, visit_order(count, start), stop))
                break;
            renumber(level);
            for (auto& c : base)
                c = level[c];
            if (!accept(std::move(base)))
                break;
            improved = true;
        }
        // Refinement: single nodes of the original graph, including moves to an empty community.
        std::vector<std::size_t> refined = result.community;
        renumber(refined);
        if (move_nodes(original, refined, visit_order(original.size(), start), stop, true) &&
            accept(std::move(refined)))
            improved = true;
        if (!improved && original.size() <= kThoroughLimit) {
            std::vector<std::size_t> swept = result.community;
            renumber(swept);
            if (kl_refine(original, swept, stop) && accept(std::move(swept)))
                improved = true;
        }
    }
    renumber(result.community);
    result.modularity = level_modularity(original, result.community);
    return result;
}

} // namespace

Partition louvain(const Sociomatrix& matrix, std::stop_token stop) {
    if (matrix.mode() != NetworkMode::OneMode)
        throw Error(ErrorCode::TwoModeInput, "louvain needs a one-mode sociomatrix");
    const std::size_t n = matrix.size();
    std::vector<std::size_t> singletons(n);
    for (std::size_t i = 0; i < n; ++i)
        singletons[i] = i;
    const LevelGraph original = symmetrised(matrix);
    if (original.total <= 0.0)
        return Partition{singletons, 0.0};

    Partition best = optimise(original, singletons, 0, stop);
    for (std::uint64_t start = 1; start < kStarts; ++start) {
        Partition candidate = optimise(original, singletons, start, stop);
        if (candidate.modularity > best.modularity + kMinGain)
            best = std::move(candidate);
    }
    // Perturbation: move a few nodes to a neighbour's community or a new one, then re-optimise.
    std::mt19937_64 rng(kPerturbationSeed);
    const int rounds = n <= kThoroughLimit ? kPerturbations : 0;
    for (int round = 0; round < rounds; ++round) {
        std::vector<std::size_t> shaken = best.community;
        const std::size_t moves = 1 + rng() % 3;
        for (std::size_t k = 0; k < moves; ++k) {
            const std::size_t a = rng() % n;
            const auto& nbrs = original.adjacency[a];
            const std::size_t pick = rng() % (nbrs.size() + 1);
            if (pick == nbrs.size()) {
                shaken[a] = n; // a label no node uses; renumbered below
            } else {
                auto it = nbrs.begin();
                std::advance(it, static_cast<std::ptrdiff_t>(pick));
                shaken[a] = shaken[it->first];
            }
        }
        renumber(shaken);
        Partition candidate = optimise(original, std::move(shaken), 0, stop);
        if (candidate.modularity > best.modularity + kMinGain)
            best = std::move(candidate);
    }
    return best;
}

} // namespace surveynet
