#pragma once
#include <graphtopo/corrnet.hpp>
#include <vector>

namespace graphtopo::gmrf {

using corrnet::CovarianceEstimate;

/// Sparse precision matrix; symmetric, positive definite when converged.
struct PrecisionEstimate
{
    Matrix theta;
    bool converged = false;
    Index iterations = 0;
    double kkt_residual = 0.0;
    /// log det(Theta) - trace(S Theta) - lambda ||Theta||_1 after each sweep.
    std::vector<double> objective_trace;
};

struct GlassoOptions
{
    double tol = 1e-6; ///< max-norm of the subgradient optimality residual
    Index max_iter = 1000;
    /// ||Theta||_1 includes the diagonal. Set false to penalize off-diagonal entries only.
    bool penalize_diagonal = true;
};

/**
 * Graphical lasso,
 *   max_{Theta > 0} log det Theta - trace(S Theta) - lambda ||Theta||_1,
 * by cyclic block-coordinate descent on the columns of Theta. Each column
 * update minimizes the objective exactly over (theta_12, theta_22) with a
 * lasso coordinate descent in theta_12, so the objective never decreases.
 * Starts from Theta = diag(1 / (S_ii + lambda)).
 */
PrecisionEstimate graphical_lasso(const CovarianceEstimate& c, double lambda, const GlassoOptions& options = {});

double glasso_objective(const Matrix& sigma, const Matrix& theta, double lambda, bool penalize_diagonal = true);
double glasso_kkt_residual(const Matrix& sigma, const Matrix& theta, double lambda, bool penalize_diagonal = true);

/// Rate-optimal regularization 2 sqrt(log(N) / T).
double default_lambda(Index n_nodes, Index n_samples);

/// Theta = L + gamma I with L a combinatorial Laplacian.
struct LaplacianEstimate
{
    Matrix laplacian;
    double loading = 0.0;
    bool converged = false;
    Index iterations = 0;
    double residual = 0.0;
    std::vector<double> objective_trace;

    Matrix precision() const { return laplacian + loading * Matrix::Identity(laplacian.rows(), laplacian.cols()); }
};

struct LaplacianOptions
{
    double tol = 1e-6;
    Index max_iter = 20000;
    bool penalize_diagonal = false;
    /// Lower bound on gamma; gamma = 0 would make Theta singular.
    double min_loading = 1e-8;
};

/**
 * Laplacian-constrained GMRF: the graphical-lasso objective over
 * Theta = L(w) + gamma I, w >= 0, gamma >= min_loading, solved by projected
 * gradient with a sufficient-decrease line search.
 */
LaplacianEstimate laplacian_gmrf(const CovarianceEstimate& c, double lambda, const LaplacianOptions& options = {});

/// sum_t y_t^T L y_t.
double smoothness_total(const SignalMatrix& y, const Matrix& laplacian);

/// trace(S L), proportional to the centered total variation of the samples behind S.
double smoothness_total(const CovarianceEstimate& c, const Matrix& laplacian);

/// Undirected graph on the off-diagonal support of a precision matrix, weights |theta_ij|.
Graph precision_support(const Matrix& theta, double weight_tol = default_weight_tol);

inline corrnet::PartialCorrelations partial_correlations(const PrecisionEstimate& p)
{
    return corrnet::partial_correlations(p.theta);
}

} // namespace graphtopo::gmrf
