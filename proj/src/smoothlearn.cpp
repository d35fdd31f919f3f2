#include <graphtopo/smoothlearn.hpp>

#include <cmath>
#include <limits>

namespace graphtopo::smoothlearn {

DistanceVector::DistanceVector(Vector e, Index n_nodes)
    : e_(std::move(e)), n_(n_nodes)
{
    if (n_ < 2) throw InvalidInput("distance vector needs at least 2 nodes");
    if (e_.size() != n_pairs(n_)) throw ShapeError("distance vector length must be N(N-1)/2");
    if (!e_.allFinite()) throw InvalidInput("distance vector has non-finite entries");
}

DistanceVector distance_vector(const SignalMatrix& y)
{
    const Matrix& d = y.data();
    const Index n = y.n_nodes();
    Vector e(n_pairs(n));
    for_each_pair(n, [&](Index k, Index i, Index j) { e[k] = (d.row(i) - d.row(j)).squaredNorm(); });
    return DistanceVector(std::move(e), n);
}

Vector primal_from_dual(const DistanceVector& e, const Vector& lambda, double beta)
{
    const DegreeOperator s(e.n_nodes());
    return ((s.adjoint(lambda) - 2.0 * e.values()) / (2.0 * beta)).cwiseMax(0.0);
}

double primal_objective(const DistanceVector& e, const Vector& w, double alpha, double beta)
{
    const Vector d = DegreeOperator(e.n_nodes()).apply(w);
    if ((d.array() <= 0.0).any()) return std::numeric_limits<double>::infinity();
    return 2.0 * w.dot(e.values()) + beta * w.squaredNorm() - alpha * d.array().log().sum();
}

double dual_objective(const DistanceVector& e, const Vector& lambda, double alpha, double beta)
{
    if ((lambda.array() <= 0.0).any()) return std::numeric_limits<double>::infinity();
    const DegreeOperator s(e.n_nodes());
    const Vector w = primal_from_dual(e, lambda, beta);
    const double f_conj = s.adjoint(lambda).dot(w) - 2.0 * w.dot(e.values()) - beta * w.squaredNorm();
    const double g_conj = (-alpha + alpha * (alpha / lambda.array()).log()).sum();
    return f_conj + g_conj;
}

SmoothLearnResult learn_graph(const DistanceVector& e, double alpha, double beta, const SmoothLearnOptions& options)
{
    if (!(alpha > 0.0)) throw ParamError("learn_graph needs alpha > 0");
    if (!(beta > 0.0)) throw ParamError("learn_graph needs beta > 0");
    if (options.max_iter < 1) throw ParamError("learn_graph needs max_iter >= 1");
    if (!(options.tol >= 0.0)) throw ParamError("learn_graph needs tol >= 0");

    const Index n = e.n_nodes();
    const DegreeOperator s(n);
    const double lip = static_cast<double>(n - 1) / beta;
    const Vector two_e = 2.0 * e.values();

    Vector lambda0 = options.lambda0.value_or(Vector::Zero(n));
    if (lambda0.size() != n) throw ShapeError("lambda0 must have length N");

    DualState state;
    state.lambda = lambda0;
    state.omega = lambda0;
    state.t = 1.0;

    SmoothLearnResult result{EdgeVector(Vector::Zero(n_pairs(n)), n), {}, 0.0, 0.0, 0, false, {}};
    if (options.record_history) result.history.lambda0 = lambda0;

    Vector lambda_prev = lambda0;
    Vector u(n);
    for (Index k = 1; k <= options.max_iter; ++k) {
        const Vector wbar = ((s.adjoint(state.omega) - two_e) / (2.0 * beta)).cwiseMax(0.0);
        const Vector swbar = s.apply(wbar);
        const Vector v = swbar - lip * state.omega;
        for (Index i = 0; i < n; ++i) {
            // Positive root of u^2 - v u - alpha L = 0, written without cancellation.
            const double root = std::sqrt(v[i] * v[i] + 4.0 * alpha * lip);
            u[i] = v[i] >= 0.0 ? 0.5 * (v[i] + root) : 2.0 * alpha * lip / (root - v[i]);
        }
        state.lambda = state.omega - (swbar - u) / lip;

        const double t_next = 0.5 + std::sqrt(0.25 + state.t * state.t);
        state.omega = state.lambda + ((state.t - 1.0) / t_next) * (state.lambda - lambda_prev);
        state.t = t_next;
        state.k = k;

        if (options.record_history) {
            result.history.primal.push_back(primal_from_dual(e, state.lambda, beta));
            result.history.dual.push_back(state.lambda);
        }

        const double change = (state.lambda - lambda_prev).norm() / std::max(1.0, state.lambda.norm());
        lambda_prev = state.lambda;
        result.iterations = k;
        if (options.tol > 0.0 && change <= options.tol) {
            result.converged = true;
            break;
        }
    }

    const Vector w = primal_from_dual(e, state.lambda, beta);
    result.w = EdgeVector(w, n);
    result.primal_obj = primal_objective(e, w, alpha, beta);
    result.dual_obj = dual_objective(e, state.lambda, alpha, beta);
    result.dual = std::move(state);
    return result;
}

double envelope_bound(double lambda_gap, double beta, Index n_nodes, Index k)
{
    return std::sqrt(2.0 * static_cast<double>(n_nodes - 1)) * lambda_gap / (beta * static_cast<double>(k));
}

bool convergence_envelope(const IterationHistory& history, const Vector& lambda_star, const Vector& w_star,
                          double beta, Index n_nodes, double slack)
{
    if (history.empty()) throw EmptyInput("no iterates recorded");
    const double gap = (history.lambda0 - lambda_star).norm();
    for (std::size_t k = 1; k <= history.primal.size(); ++k) {
        const double err = (history.primal[k - 1] - w_star).norm();
        if (err > envelope_bound(gap, beta, n_nodes, static_cast<Index>(k)) + slack) return false;
    }
    return true;
}

DistanceVector discriminative_distances(std::span<const DistanceVector> class_distances, double gamma,
                                        std::size_t target_class)
{
    if (class_distances.empty()) throw EmptyInput("no classes");
    if (target_class >= class_distances.size()) throw ParamError("target class index out of range");
    if (!(gamma >= 0.0)) throw ParamError("gamma must be nonnegative");
    const Index n = class_distances[target_class].n_nodes();
    Vector eff = class_distances[target_class].values();
    for (std::size_t c = 0; c < class_distances.size(); ++c) {
        if (class_distances[c].n_nodes() != n) throw ShapeError("classes have different node counts");
        if (c != target_class) eff -= gamma * class_distances[c].values();
    }
    return DistanceVector(std::move(eff), n);
}

std::vector<Graph> learn_discriminative_graphs(std::span<const DistanceVector> class_distances, double alpha,
                                               double beta, double gamma, const SmoothLearnOptions& options)
{
    std::vector<Graph> graphs;
    graphs.reserve(class_distances.size());
    for (std::size_t c = 0; c < class_distances.size(); ++c) {
        const auto eff = discriminative_distances(class_distances, gamma, c);
        graphs.push_back(graph_from_edge_vector(learn_graph(eff, alpha, beta, options).w));
    }
    return graphs;
}

Index default_low_pass_size(Index n_nodes)
{
    return (n_nodes + 9) / 10;
}

namespace {

Matrix low_frequency_basis(const Graph& g, Index n_low)
{
    if (g.is_directed()) throw DirectedGraphError("GFT classification needs undirected graphs");
    const Index n = g.n_nodes();
    if (n_low < 1 || n_low >= n) throw ParamError("n_low must satisfy 1 <= K < N");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(laplacian(g));
    return eig.eigenvectors().leftCols(n_low);
}

} // namespace

double low_pass_energy(const Graph& g, const Vector& signal, Index n_low)
{
    if (signal.size() != g.n_nodes()) throw ShapeError("signal length does not match the graph");
    const double total = signal.squaredNorm();
    if (total == 0.0) throw ZeroSignal("cannot classify the zero signal");
    return (low_frequency_basis(g, n_low).transpose() * signal).squaredNorm() / total;
}

LowPassClassifier::LowPassClassifier(std::span<const Graph> class_graphs, Index n_low)
{
    if (class_graphs.empty()) throw EmptyInput("no class graphs");
    const Index n = class_graphs.front().n_nodes();
    for (const auto& g : class_graphs) {
        if (g.n_nodes() != n) throw ShapeError("class graphs have different node counts");
        bases_.push_back(low_frequency_basis(g, n_low));
    }
}

Vector LowPassClassifier::energies(const Vector& signal) const
{
    if (signal.size() != bases_.front().rows()) throw ShapeError("signal length does not match the graphs");
    const double total = signal.squaredNorm();
    if (total == 0.0) throw ZeroSignal("cannot classify the zero signal");
    Vector out(static_cast<Index>(bases_.size()));
    for (std::size_t c = 0; c < bases_.size(); ++c) {
        out[static_cast<Index>(c)] = (bases_[c].transpose() * signal).squaredNorm() / total;
    }
    return out;
}

std::size_t LowPassClassifier::classify(const Vector& signal) const
{
    const Vector en = energies(signal);
    std::size_t best = 0;
    for (Index c = 1; c < en.size(); ++c) {
        if (en[c] > en[static_cast<Index>(best)] + 1e-12) best = static_cast<std::size_t>(c);
    }
    return best;
}

std::size_t gft_classify(std::span<const Graph> class_graphs, const Vector& signal, Index n_low)
{
    return LowPassClassifier(class_graphs, n_low).classify(signal);
}

} // namespace graphtopo::smoothlearn
