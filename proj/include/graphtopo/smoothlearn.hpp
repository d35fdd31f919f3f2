#pragma once
#include <graphtopo/core.hpp>
#include <optional>
#include <span>
#include <vector>

namespace graphtopo::smoothlearn {

/**
 * Pairwise nodal distances e_k = ||ybar_i - ybar_j||^2 in shared pair order.
 * Entries built from one class are nonnegative; effective distances of the
 * discriminative problem may be negative.
 */
class DistanceVector
{
public:
    DistanceVector(Vector e, Index n_nodes);

    const Vector& values() const { return e_; }
    Index n_nodes() const { return n_; }

private:
    Vector e_;
    Index n_;
};

DistanceVector distance_vector(const SignalMatrix& y);

/// FISTA state on the dual: lambda_k, extrapolation point omega_{k+1}, momentum t_{k+1}.
struct DualState
{
    Vector lambda;
    Vector omega;
    double t = 1.0;
    Index k = 0;
};

/// Per-iterate record kept when SmoothLearnOptions::record_history is set.
struct IterationHistory
{
    Vector lambda0;
    std::vector<Vector> primal; ///< primal[k-1] = w_hat_k
    std::vector<Vector> dual;   ///< dual[k-1] = lambda_k

    bool empty() const { return primal.empty(); }
};

struct SmoothLearnOptions
{
    /// Stop when ||lambda_k - lambda_{k-1}|| <= tol * max(1, ||lambda_k||); tol = 0 runs max_iter steps.
    double tol = 1e-8;
    Index max_iter = 100000;
    /// Dual starting point; zero when unset.
    std::optional<Vector> lambda0;
    bool record_history = false;
};

struct SmoothLearnResult
{
    EdgeVector w;
    DualState dual;
    double primal_obj = 0.0;
    double dual_obj = 0.0;
    Index iterations = 0;
    bool converged = false;
    IterationHistory history;
};

/**
 * Learns a graph on which the signals behind `e` are smooth:
 *
 *   min_{w >= 0}  2 w^T e + beta ||w||^2 - alpha 1^T log(S w)
 *
 * by accelerated proximal gradient on the dual. The dual gradient is
 * Lipschitz with L = (N - 1) / beta, so no step size is tuned. Every step is
 * closed form:
 *
 *   wbar_k   = max(0, (S^T omega_k - 2e) / (2 beta))
 *   u_k      = (S wbar_k - L omega_k + sqrt((S wbar_k - L omega_k)^2 + 4 alpha L)) / 2
 *   lambda_k = omega_k - (S wbar_k - u_k) / L
 *
 * followed by the usual momentum and extrapolation. The primal iterate is
 * w_hat_k = max(0, (S^T lambda_k - 2e) / (2 beta)).
 */
SmoothLearnResult learn_graph(const DistanceVector& e, double alpha, double beta,
                              const SmoothLearnOptions& options = {});

/// 2 w^T e + beta ||w||^2 - alpha sum log(S w); +inf when some degree is zero.
double primal_objective(const DistanceVector& e, const Vector& w, double alpha, double beta);

/// F(lambda) + G(lambda); +inf when some lambda_i <= 0. At the optimum it equals -primal.
double dual_objective(const DistanceVector& e, const Vector& lambda, double alpha, double beta);

/// Primal minimizer of the Lagrangian for a given dual point.
Vector primal_from_dual(const DistanceVector& e, const Vector& lambda, double beta);

/// sqrt(2(N-1)) ||lambda0 - lambda*|| / (beta k).
double envelope_bound(double lambda_gap, double beta, Index n_nodes, Index k);

/**
 * True iff every recorded primal iterate satisfies
 * ||w_hat_k - w*|| <= sqrt(2(N-1)) ||lambda0 - lambda*|| / (beta k) + slack.
 * `slack` absorbs floating-point round-off only. Throws EmptyInput on an empty history.
 */
bool convergence_envelope(const IterationHistory& history, const Vector& lambda_star, const Vector& w_star,
                          double beta, Index n_nodes, double slack = 1e-12);

/// e_eff = e_c - gamma * sum_{k != c} e_k.
DistanceVector discriminative_distances(std::span<const DistanceVector> class_distances, double gamma,
                                        std::size_t target_class);

/// One graph per class from the discriminative effective distances.
std::vector<Graph> learn_discriminative_graphs(std::span<const DistanceVector> class_distances, double alpha,
                                               double beta, double gamma, const SmoothLearnOptions& options = {});

/// ceil(N / 10).
Index default_low_pass_size(Index n_nodes);

/// Fraction of ||x||^2 captured by the n_low lowest-frequency Laplacian eigenvectors.
double low_pass_energy(const Graph& g, const Vector& signal, Index n_low);

/// Caches the low-frequency bases of the class graphs for repeated classification.
class LowPassClassifier
{
public:
    LowPassClassifier(std::span<const Graph> class_graphs, Index n_low);

    std::size_t classify(const Vector& signal) const;
    /// Captured-energy fraction per class.
    Vector energies(const Vector& signal) const;
    std::size_t n_classes() const { return bases_.size(); }

private:
    std::vector<Matrix> bases_;
};

/**
 * Returns the class whose graph captures the largest fraction of the
 * signal energy in its n_low lowest Laplacian modes. Ties (within 1e-12)
 * go to the lowest class index.
 */
std::size_t gft_classify(std::span<const Graph> class_graphs, const Vector& signal, Index n_low);

} // namespace graphtopo::smoothlearn
