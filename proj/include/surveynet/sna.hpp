#pragma once

#include <cstddef>
#include <optional>
#include <stop_token>
#include <string>
#include <utility>
#include <vector>

#include <surveynet/rational.hpp>
#include <surveynet/relational.hpp>

namespace surveynet {

/// Square (one-mode) or rectangular (two-mode) tie matrix, row-major.
class Sociomatrix {
public:
    Sociomatrix() = default;

    NetworkMode mode() const noexcept { return mode_; }
    const std::vector<std::string>& rows() const noexcept { return rows_; }
    const std::vector<std::string>& columns() const noexcept { return columns_; }
    std::size_t size() const noexcept { return rows_.size(); }

    const Rational& at(std::size_t row, std::size_t column) const { return weights_[row * columns_.size() + column]; }
    double weight(std::size_t row, std::size_t column) const { return dense_[row * columns_.size() + column]; }
    bool tie(std::size_t row, std::size_t column) const { return dense_[row * columns_.size() + column] > 0.0; }

    std::optional<std::size_t> row_index(const std::string& id) const;

    /// Out-neighbours (tie > 0) of every row, ascending column index. One-mode only.
    std::vector<std::vector<std::size_t>> successors() const;

    friend Sociomatrix build_matrix(const EdgeList& edges, const std::vector<std::string>& nodes);
    friend Sociomatrix build_matrix(const EdgeList& edges, const std::vector<std::string>& rows,
                                    const std::vector<std::string>& columns);

private:
    NetworkMode mode_ = NetworkMode::OneMode;
    std::vector<std::string> rows_;
    std::vector<std::string> columns_;
    std::vector<Rational> weights_;
    std::vector<double> dense_;
};

/// One-mode n x n matrix. Unknown endpoints and self-loops are errors; repeated edges keep the last weight.
Sociomatrix build_matrix(const EdgeList& edges, const std::vector<std::string>& nodes);

/// Two-mode rows x columns matrix.
Sociomatrix build_matrix(const EdgeList& edges, const std::vector<std::string>& rows,
                         const std::vector<std::string>& columns);

/// Positive cells in row-major order.
EdgeList matrix_edges(const Sociomatrix& matrix, const std::string& relation, const std::string& wave_id);

struct CentralityVector {
    std::string measure;
    std::vector<double> values;
    std::string normalization;
};

/// Unweighted in-degree.
CentralityVector popularity(const Sociomatrix& matrix);

/// Directed shortest-path betweenness over unweighted hops, divided by (n-1)(n-2).
CentralityVector mediation(const Sociomatrix& matrix, std::stop_token stop = {});

struct InfluenceOptions {
    double damping = 0.85;
    double tolerance = 1e-9; // L1 change between iterations
    int max_iterations = 1000;
};

/// Damped nomination flow: mass moves along out-ties in proportion to tie weight; rows without
/// out-ties spread their mass uniformly. Sums to 1.
CentralityVector influence(const Sociomatrix& matrix, const InfluenceOptions& options = {});

struct Partition {
    std::vector<std::size_t> community; // per node, renumbered by first appearance
    double modularity = 0.0;

    std::size_t community_count() const;
};

/// Modularity of `community` on the symmetrised graph (W + W^T)/2. Zero when the graph has no ties.
double modularity(const Sociomatrix& matrix, const std::vector<std::size_t>& community);

/// Louvain on the symmetrised graph: local moving and aggregation, followed by single-node
/// refinement. The first start visits nodes in index order; seven more fixed visiting orders are
/// tried and the best Q kept. Graphs of at most 64 nodes also get Kernighan-Lin passes and 32
/// seeded perturbation rounds. Ties go to the lowest community id, so the result is deterministic.
Partition louvain(const Sociomatrix& matrix, std::stop_token stop = {});

/// People `node` names, ranked by influence (descending, then id). At most `k`.
std::vector<std::string> suggest_influencers(const Sociomatrix& matrix, const std::string& node, std::size_t k,
                                             const CentralityVector* influence_scores = nullptr);

/// Nodes ranked by how many sources reach `node` through them on some shortest path. At most `k`.
std::vector<std::string> suggest_mediators(const Sociomatrix& matrix, const std::string& node, std::size_t k);

/// Per-node mediator counts toward `node`; index-aligned with the matrix rows.
std::vector<std::size_t> mediator_counts(const Sociomatrix& matrix, std::size_t target);

struct ChurnReport {
    Rational jaccard;
    std::vector<std::pair<std::string, std::string>> added;
    std::vector<std::pair<std::string, std::string>> removed;
};

/// Edge-set change between two waves of one relation, weights ignored. Two empty lists give Jaccard 1.
ChurnReport wave_churn(const EdgeList& before, const EdgeList& after);

struct AnalysisResult {
    std::string relation;
    std::string wave_id;
    std::vector<std::string> nodes;
    CentralityVector popularity;
    CentralityVector mediation;
    CentralityVector influence;
    Partition partition;

    std::optional<std::size_t> index_of(const std::string& node) const;
};

AnalysisResult analyze(const Sociomatrix& matrix, const std::string& relation, const std::string& wave_id,
                       std::stop_token stop = {});

} // namespace surveynet
