#pragma once
#include <graphtopo/core.hpp>
#include <optional>
#include <vector>

namespace graphtopo::semdag {

/// y_t = W y_t + diag(b) x_t + e_t, with W(i, j) the effect of node j on node i.
struct SemModel
{
    Matrix w;
    Vector b;
};

struct RowSolverOptions
{
    double tol = 1e-11;
    Index max_iter = 200000;
};

struct SemFitResult
{
    SemModel model;
    /// sum_t ||y_t - W y_t - B x_t||^2 + alpha ||W||_1 per iteration.
    std::vector<double> objective_trace;
    Index iterations = 0;
    bool converged = false;
    /// Numerical rank of X X^T; full rank N is needed for the inputs to pin down W.
    Index input_rank = 0;
};

/// Penalized least squares, solved row by row with monotone FISTA.
SemFitResult sem_fit(const SignalMatrix& y, const Matrix& x, double alpha, const RowSolverOptions& options = {});

/// Same problem from precomputed second moments: syy = Y Y^T, syx = Y X^T, sxx = diag(X X^T).
SemFitResult sem_fit_moments(const Matrix& syy, const Matrix& syx, const Vector& sxx, double alpha,
                             const RowSolverOptions& options = {},
                             const std::optional<SemModel>& warm_start = std::nullopt);

double sem_objective(const SignalMatrix& y, const Matrix& x, const SemModel& m, double alpha);

/**
 * Row-wise elastic net without inputs:
 *   min_{diag(W) = 0} sum_t ||y_t - W y_t||^2 + l1 ||W||_1 + l2 ||W||_F^2.
 */
Matrix fit_network_rows(const Matrix& y, double l1, double l2, const RowSolverOptions& options = {});

enum class AcyclicityKind { expm, poly, ldet };

struct Acyclicity
{
    double value = 0.0;
    Matrix gradient;
};

/// trace(exp(W o W)) - N.
Acyclicity acyclicity_expm(const Matrix& w);
/// trace((I + W o W / N)^N) - N.
Acyclicity acyclicity_poly(const Matrix& w);
/// N log s - log det(sI - W o W); DomainError unless s > spectral radius of W o W.
Acyclicity acyclicity_ldet(const Matrix& w, double s);
Acyclicity acyclicity(AcyclicityKind kind, const Matrix& w, double s = 1.0);

/// Exact check on the support |W_ij| > tol.
bool is_acyclic(const Matrix& w, double tol = 0.0);

struct DagOptions
{
    AcyclicityKind kind = AcyclicityKind::expm;
    double l1 = 0.1;
    double ldet_s = 1.0;
    double h_tol = 1e-8;
    double rho_max = 1e16;
    double w_threshold = 0.3;
    Index max_outer = 100;
    Index max_inner = 20000;
    double inner_tol = 1e-7;
    std::optional<Matrix> warm_start;
};

struct DagResult
{
    /// Thresholded weights.
    Matrix w;
    Matrix w_raw;
    /// Acyclicity of w_raw.
    double h_value = 0.0;
    std::vector<double> h_trace;
    Index outer_iterations = 0;
    double rho = 1.0;
    bool h_converged = false;
    bool is_dag = false;
};

/**
 * Continuous DAG search: minimizes (1 / 2T) ||Y - W Y||_F^2 + l1 ||W||_1
 * subject to h(W) = 0 with an augmented Lagrangian. The penalty grows
 * tenfold whenever h shrinks by less than a quarter, and the multiplier
 * moves by rho h.
 */
DagResult dag_fit(const SignalMatrix& y, const DagOptions& options = {});

struct VarmModel
{
    /// lags[l - 1] = W^(l), row = target.
    std::vector<Matrix> lags;
    Index order() const { return static_cast<Index>(lags.size()); }
};

enum class EdgeRule { any_lag, all_lags };

struct VarmFitResult
{
    VarmModel model;
    std::vector<double> objective_trace;
    Index iterations = 0;
    bool converged = false;
};

/// sum_t ||y_t - sum_l W^(l) y_{t-l}||^2 + lambda sum_ij ||[W^(1)_ij .. W^(L)_ij]||_2.
VarmFitResult varm_fit(const SignalMatrix& y, Index order, double lambda, const RowSolverOptions& options = {});

double varm_objective(const SignalMatrix& y, const VarmModel& m, double lambda);

/// Smallest lambda for which every group is zero.
double varm_lambda_max(const SignalMatrix& y, Index order);

/// Directed graph, edge j -> i when the lag group (i, j) is nonzero under the rule; weight = max_l |W^(l)_ij|.
Graph varm_graph(const VarmModel& m, EdgeRule rule = EdgeRule::any_lag, double tol = default_weight_tol);

struct OrderScore
{
    Index order = 0;
    double bic = 0.0;
};

/// Gaussian-likelihood BIC of varm_fit over orders 1..max_order; the best order is the minimum.
std::vector<OrderScore> varm_order_scores(const SignalMatrix& y, Index max_order, double lambda,
                                          const RowSolverOptions& options = {});
Index select_varm_order(const SignalMatrix& y, Index max_order, double lambda, const RowSolverOptions& options = {});

} // namespace graphtopo::semdag
