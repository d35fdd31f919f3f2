#include <graphtopo/core.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace graphtopo {

SignalMatrix::SignalMatrix(Matrix data)
    : data_(std::move(data))
{
    if (data_.rows() < 2) {
        throw InvalidInput("signal matrix needs at least 2 nodes, got " + std::to_string(data_.rows()));
    }
    if (!data_.allFinite()) {
        throw InvalidInput("signal matrix contains non-finite entries");
    }
}

Graph::Graph(Matrix weights, bool directed)
    : w_(std::move(weights)), directed_(directed)
{
    if (w_.rows() != w_.cols()) {
        throw ShapeError("adjacency matrix must be square");
    }
    if (!w_.allFinite()) {
        throw InvalidInput("adjacency matrix contains non-finite entries");
    }
    if (w_.size() > 0 && w_.diagonal().cwiseAbs().maxCoeff() > 0.0) {
        throw InvalidInput("adjacency matrix must have a zero diagonal");
    }
    if (!directed_) {
        const double scale = std::max(1.0, w_.cwiseAbs().maxCoeff());
        if ((w_ - w_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
            throw InvalidInput("undirected adjacency matrix must be symmetric");
        }
        if (w_.size() > 0 && w_.minCoeff() < 0.0) {
            throw InvalidInput("undirected adjacency matrix must be nonnegative");
        }
        w_ = 0.5 * (w_ + w_.transpose()).eval();
    }
}

Graph Graph::empty(Index n_nodes, bool directed)
{
    return Graph(Matrix::Zero(n_nodes, n_nodes), directed);
}

Index Graph::edge_count(double tol) const
{
    Index count = 0;
    const Index n = n_nodes();
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            if (i == j) continue;
            if (!directed_ && i > j) continue;
            if (std::abs(w_(i, j)) > tol) ++count;
        }
    }
    return count;
}

Index nodes_from_pairs(Index m)
{
    // Solve N(N-1)/2 = m.
    const auto n = static_cast<Index>(std::llround((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(m))) / 2.0));
    if (n < 2 || n_pairs(n) != m) {
        throw ShapeError("length " + std::to_string(m) + " is not N(N-1)/2 for any N >= 2");
    }
    return n;
}

Vector pack_upper(const Matrix& symmetric)
{
    const Index n = symmetric.rows();
    Vector out(n_pairs(n));
    for_each_pair(n, [&](Index k, Index i, Index j) { out[k] = symmetric(i, j); });
    return out;
}

Matrix unpack_upper(const Vector& packed, Index n_nodes)
{
    if (packed.size() != n_pairs(n_nodes)) {
        throw ShapeError("packed vector length does not match node count");
    }
    Matrix out = Matrix::Zero(n_nodes, n_nodes);
    for_each_pair(n_nodes, [&](Index k, Index i, Index j) {
        out(i, j) = packed[k];
        out(j, i) = packed[k];
    });
    return out;
}

EdgeVector::EdgeVector(Vector w, Index n_nodes)
    : w_(std::move(w)), n_(n_nodes)
{
    if (n_ < 2) throw InvalidInput("edge vector needs at least 2 nodes");
    if (w_.size() != graphtopo::n_pairs(n_)) {
        throw ShapeError("edge vector length must be N(N-1)/2");
    }
    if (!w_.allFinite() || (w_.size() > 0 && w_.minCoeff() < 0.0)) {
        throw InvalidInput("edge weights must be finite and nonnegative");
    }
}

DegreeOperator::DegreeOperator(Index n_nodes)
    : n_(n_nodes)
{
    if (n_ < 2) throw InvalidInput("degree operator needs at least 2 nodes");
}

Vector DegreeOperator::apply(const Vector& w) const
{
    if (w.size() != n_pairs()) throw ShapeError("degree operator: edge vector has wrong length");
    Vector d = Vector::Zero(n_);
    for_each_pair(n_, [&](Index k, Index i, Index j) {
        d[i] += w[k];
        d[j] += w[k];
    });
    return d;
}

Vector DegreeOperator::adjoint(const Vector& lambda) const
{
    if (lambda.size() != n_) throw ShapeError("degree operator adjoint: vector has wrong length");
    Vector out(n_pairs());
    for_each_pair(n_, [&](Index k, Index i, Index j) { out[k] = lambda[i] + lambda[j]; });
    return out;
}

Matrix DegreeOperator::materialize() const
{
    Matrix s = Matrix::Zero(n_, n_pairs());
    for_each_pair(n_, [&](Index k, Index i, Index j) {
        s(i, k) = 1.0;
        s(j, k) = 1.0;
    });
    return s;
}

EdgeVector edge_vector_from_graph(const Graph& g)
{
    if (g.is_directed()) throw DirectedGraphError("edge vectors are defined for undirected graphs only");
    return EdgeVector(pack_upper(g.weights()), g.n_nodes());
}

Graph graph_from_edge_vector(const EdgeVector& w)
{
    return Graph::undirected(unpack_upper(w.values(), w.n_nodes()));
}

Vector degree_map(const EdgeVector& w)
{
    return DegreeOperator(w.n_nodes()).apply(w.values());
}

Matrix laplacian(const Graph& g)
{
    if (g.is_directed()) throw DirectedGraphError("laplacian requires an undirected graph");
    const Matrix& w = g.weights();
    Matrix l = -w;
    l.diagonal() = w.rowwise().sum();
    return l;
}

namespace {

double draw_weight(std::mt19937_64& rng, const SyntheticParams& p)
{
    if (p.weight_high == p.weight_low) return p.weight_low;
    std::uniform_real_distribution<double> u(p.weight_low, p.weight_high);
    return u(rng);
}

} // namespace

Graph generate_synthetic(SyntheticKind kind, const SyntheticParams& p, std::uint64_t seed)
{
    if (p.n_nodes < 2) throw ParamError("synthetic graphs need n_nodes >= 2");
    if (kind != SyntheticKind::chain && !(p.edge_prob >= 0.0 && p.edge_prob <= 1.0)) {
        throw ParamError("edge probability must lie in [0, 1], got " + std::to_string(p.edge_prob));
    }
    if (!(p.weight_low > 0.0) || p.weight_high < p.weight_low) {
        throw ParamError("weight range must satisfy 0 < weight_low <= weight_high");
    }

    const Index n = p.n_nodes;
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(kind == SyntheticKind::chain ? 0.0 : p.edge_prob);
    std::bernoulli_distribution sign_coin(0.5);
    Matrix w = Matrix::Zero(n, n);

    switch (kind) {
    case SyntheticKind::chain:
        for (Index i = 0; i + 1 < n; ++i) {
            w(i, i + 1) = w(i + 1, i) = 1.0;
        }
        return Graph::undirected(std::move(w));

    case SyntheticKind::erdos_renyi:
        for_each_pair(n, [&](Index, Index i, Index j) {
            if (coin(rng)) w(i, j) = w(j, i) = draw_weight(rng, p);
        });
        return Graph::undirected(std::move(w));

    case SyntheticKind::random_dag: {
        std::vector<Index> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), Index{0});
        std::shuffle(order.begin(), order.end(), rng);
        // order[a] precedes order[b] for a < b: edge order[a] -> order[b].
        for (Index b = 1; b < n; ++b) {
            for (Index a = 0; a < b; ++a) {
                if (!coin(rng)) continue;
                double v = draw_weight(rng, p);
                if (p.signed_weights && sign_coin(rng)) v = -v;
                w(order[static_cast<std::size_t>(b)], order[static_cast<std::size_t>(a)]) = v;
            }
        }
        return Graph::directed(std::move(w));
    }
    }
    throw ParamError("unknown synthetic graph kind");
}

namespace {

Matrix standard_normal(Index rows, Index cols, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix z(rows, cols);
    for (Index t = 0; t < cols; ++t) {
        for (Index i = 0; i < rows; ++i) z(i, t) = normal(rng);
    }
    return z;
}

} // namespace

SignalMatrix generate_smooth_signals(const Graph& g, Index n_samples, double delta, std::uint64_t seed)
{
    if (!(delta > 0.0)) throw ParamError("smooth signal generator needs delta > 0");
    if (n_samples < 0) throw ParamError("sample count must be nonnegative");
    const Index n = g.n_nodes();
    Matrix precision = laplacian(g);
    precision.diagonal().array() += delta;
    // precision = R R^T  =>  y = R^{-T} z has covariance precision^{-1}.
    Eigen::LLT<Matrix> llt(precision);
    if (llt.info() != Eigen::Success) throw DomainError("L + delta I is not positive definite");
    Matrix z = standard_normal(n, n_samples, seed);
    Matrix y = llt.matrixU().solve(z);
    return SignalMatrix(std::move(y));
}

SignalMatrix generate_sem_signals(const Graph& g, Index n_samples, double noise_scale, std::uint64_t seed)
{
    if (!(noise_scale > 0.0)) throw ParamError("noise scale must be positive");
    const Index n = g.n_nodes();
    Matrix a = Matrix::Identity(n, n) - g.weights();
    Eigen::PartialPivLU<Matrix> lu(a);
    Matrix e = noise_scale * standard_normal(n, n_samples, seed);
    return SignalMatrix(lu.solve(e));
}

RecoveryReport score_recovery(const Graph& estimated, const Graph& truth, double weight_tol)
{
    if (estimated.n_nodes() != truth.n_nodes()) {
        throw ShapeError("score_recovery: node counts differ");
    }
    if (estimated.is_directed() != truth.is_directed()) {
        throw ShapeError("score_recovery: directedness differs");
    }
    RecoveryReport r;
    const Index n = truth.n_nodes();
    const bool directed = truth.is_directed();
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            if (i == j || (!directed && i > j)) continue;
            const bool est = std::abs(estimated.weights()(i, j)) > weight_tol;
            const bool tru = std::abs(truth.weights()(i, j)) > weight_tol;
            if (est && tru) ++r.true_positives;
            else if (est) ++r.false_positives;
            else if (tru) ++r.false_negatives;
        }
    }
    const auto tp = static_cast<double>(r.true_positives);
    const Index predicted = r.true_positives + r.false_positives;
    const Index actual = r.true_positives + r.false_negatives;
    if (predicted == 0 && actual == 0) {
        r.precision = r.recall = r.f1 = 1.0;
    } else {
        r.precision = predicted > 0 ? tp / static_cast<double>(predicted) : 0.0;
        r.recall = actual > 0 ? tp / static_cast<double>(actual) : 0.0;
        const double s = r.precision + r.recall;
        r.f1 = s > 0.0 ? 2.0 * r.precision * r.recall / s : 0.0;
    }
    r.frobenius_error = (estimated.weights() - truth.weights()).norm();
    return r;
}

} // namespace graphtopo
