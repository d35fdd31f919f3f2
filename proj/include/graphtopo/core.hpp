#pragma once
#include <Eigen/Dense>
#include <cstdint>
#include <graphtopo/errors.hpp>

namespace graphtopo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Default magnitude below which a weight is treated as absent.
inline constexpr double default_weight_tol = 1e-6;

/**
 * N x T matrix of nodal observations. Column t is the network-wide
 * snapshot y_t, row i collects every measurement taken at node i.
 * Entries are finite and N >= 2; T may be zero.
 */
class SignalMatrix
{
public:
    explicit SignalMatrix(Matrix data);

    Index n_nodes() const { return data_.rows(); }
    Index n_samples() const { return data_.cols(); }
    const Matrix& data() const { return data_; }

private:
    Matrix data_;
};

/**
 * Weighted graph stored as a dense adjacency matrix.
 *
 * For directed graphs W(i, j) != 0 encodes an edge from node j into node i
 * (row = target), matching y = W y + ... in structural models. Undirected
 * graphs are symmetric with nonnegative weights. The diagonal is always zero.
 */
class Graph
{
public:
    Graph(Matrix weights, bool directed);

    static Graph undirected(Matrix weights) { return Graph(std::move(weights), false); }
    static Graph directed(Matrix weights) { return Graph(std::move(weights), true); }
    static Graph empty(Index n_nodes, bool directed);

    const Matrix& weights() const { return w_; }
    bool is_directed() const { return directed_; }
    Index n_nodes() const { return w_.rows(); }

    /// Number of edges with |weight| > tol (unordered pairs when undirected).
    Index edge_count(double tol = default_weight_tol) const;

private:
    Matrix w_;
    bool directed_;
};

/// Number of unordered node pairs, N(N-1)/2.
inline Index n_pairs(Index n_nodes) { return n_nodes * (n_nodes - 1) / 2; }

/// Calls fn(k, i, j) for every pair i < j in column-major upper-triangular order.
template <class F>
void for_each_pair(Index n_nodes, F&& fn)
{
    Index k = 0;
    for (Index j = 1; j < n_nodes; ++j) {
        for (Index i = 0; i < j; ++i) {
            fn(k++, i, j);
        }
    }
}

/// Recovers N from a pair count m = N(N-1)/2; throws ShapeError when m is not triangular.
Index nodes_from_pairs(Index n_pairs);

/// Packs the strict upper triangle of a symmetric matrix in shared pair order.
Vector pack_upper(const Matrix& symmetric);

/// Inverse of pack_upper: symmetric, zero-diagonal N x N matrix.
Matrix unpack_upper(const Vector& packed, Index n_nodes);

/// Nonnegative edge weights w = vec(triu(W)) of an undirected graph.
class EdgeVector
{
public:
    EdgeVector(Vector w, Index n_nodes);

    const Vector& values() const { return w_; }
    Index n_nodes() const { return n_; }

private:
    Vector w_;
    Index n_;
};

/**
 * The edge-to-degree map S, kept implicit. Column k of S has unit entries
 * at the two endpoints of pair k, so S w is the degree vector and
 * S^T lambda sums lambda over the endpoints of each pair.
 */
class DegreeOperator
{
public:
    explicit DegreeOperator(Index n_nodes);

    Index n_nodes() const { return n_; }
    Index n_pairs() const { return graphtopo::n_pairs(n_); }

    Vector apply(const Vector& w) const;
    Vector adjoint(const Vector& lambda) const;
    Matrix materialize() const;

    /// ||S||_2^2 = 2(N - 1).
    double squared_norm() const { return 2.0 * static_cast<double>(n_ - 1); }

private:
    Index n_;
};

EdgeVector edge_vector_from_graph(const Graph& g);
Graph graph_from_edge_vector(const EdgeVector& w);
Vector degree_map(const EdgeVector& w);

/// Combinatorial Laplacian diag(W1) - W of an undirected graph.
Matrix laplacian(const Graph& g);

enum class SyntheticKind { erdos_renyi, chain, random_dag };

struct SyntheticParams
{
    Index n_nodes = 10;
    double edge_prob = 0.3;
    double weight_low = 1.0;
    double weight_high = 1.0;
    /// random_dag only: flip each weight's sign with probability 1/2.
    bool signed_weights = false;
};

/**
 * Reproducible synthetic graphs.
 *  - erdos_renyi: undirected, each pair present with probability edge_prob.
 *  - chain: undirected path 1-2-...-N with unit weights.
 *  - random_dag: directed, a random topological order, each forward pair
 *    present with probability edge_prob.
 * Weights are uniform in [weight_low, weight_high].
 */
Graph generate_synthetic(SyntheticKind kind, const SyntheticParams& params, std::uint64_t seed);

/// Columns drawn i.i.d. from Normal(0, (L + delta I)^{-1}).
SignalMatrix generate_smooth_signals(const Graph& g, Index n_samples, double delta, std::uint64_t seed);

/// Columns y = (I - W)^{-1} e with e ~ Normal(0, noise_scale^2 I); W directed.
SignalMatrix generate_sem_signals(const Graph& g, Index n_samples, double noise_scale, std::uint64_t seed);

struct RecoveryReport
{
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double frobenius_error = 0.0;
    Index true_positives = 0;
    Index false_positives = 0;
    Index false_negatives = 0;
};

/// Support recovery after zeroing |W_ij| <= weight_tol; Frobenius error on raw weights.
RecoveryReport score_recovery(const Graph& estimated, const Graph& truth,
                              double weight_tol = default_weight_tol);

} // namespace graphtopo
