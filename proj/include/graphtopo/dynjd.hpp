#pragma once
#include <graphtopo/gmrf.hpp>
#include <graphtopo/semdag.hpp>
#include <graphtopo/smoothlearn.hpp>
#include <string>
#include <vector>

namespace graphtopo::dynjd {

/// Graphs over a common node set, one per slot.
class GraphSequence
{
public:
    explicit GraphSequence(std::vector<Graph> graphs);

    std::size_t size() const { return graphs_.size(); }
    Index n_nodes() const { return graphs_.front().n_nodes(); }
    const Graph& operator[](std::size_t t) const { return graphs_[t]; }
    const std::vector<Graph>& graphs() const { return graphs_; }

    /// ||W_t - W_{t-1}||_F for t = 1..T-1.
    std::vector<double> temporal_differences() const;

private:
    std::vector<Graph> graphs_;
};

/// Frobenius norms of consecutive differences of any matrix sequence.
std::vector<double> temporal_differences(const std::vector<Matrix>& mats);

struct TvOptions
{
    /// Stop once a sweep lowers the objective by at most tol * |objective|.
    double tol = 1e-10;
    Index max_sweeps = 500;
};

struct TvSmoothResult
{
    GraphSequence graphs;
    std::vector<EdgeVector> w;
    /// Objective after initialization, then after each sweep.
    std::vector<double> objective_trace;
    Index sweeps = 0;
    bool converged = false;
};

/**
 * min sum_t [2 w_t^T e_t + beta ||w_t||^2 - alpha 1^T log(S w_t)] + eta sum_t ||W_t - W_{t-1}||_F^2.
 *
 * Block-coordinate sweeps over t. With k neighbours the slot problem is a
 * static one with distances e_t - 2 eta sum_nb w_nb and beta + 2 eta k, so each
 * block is solved exactly by learn_graph. The start is the better of the
 * independent solutions and the consensus solution on sum_t e_t.
 */
TvSmoothResult tv_smooth_learn(const std::vector<smoothlearn::DistanceVector>& e, double alpha, double beta,
                               double eta, const TvOptions& options = {});

double tv_smooth_objective(const std::vector<smoothlearn::DistanceVector>& e,
                           const std::vector<EdgeVector>& w, double alpha, double beta, double eta);

struct TvGlassoOptions
{
    TvOptions sweep;
    /// Gradient-mapping tolerance of each slot solve.
    double slot_tol = 1e-10;
    Index slot_max_iter = 20000;
    bool penalize_diagonal = true;
};

struct TvGlassoResult
{
    std::vector<gmrf::PrecisionEstimate> precisions;
    /// Minimized objective: sum_t [-log det + trace(S_t Theta_t) + lambda ||Theta_t||_1] + eta sum ||dTheta||_F^2.
    std::vector<double> objective_trace;
    Index sweeps = 0;
    bool converged = false;

    std::vector<double> temporal_differences() const;
};

/**
 * Time-varying graphical lasso with squared Frobenius coupling. Starts from
 * independent graphical_lasso fits and sweeps the slots, solving each block
 * by proximal gradient with Barzilai-Borwein steps kept positive definite by
 * backtracking.
 */
TvGlassoResult tv_graphical_lasso(const std::vector<gmrf::CovarianceEstimate>& covariances, double lambda,
                                  double eta, const TvGlassoOptions& options = {});

double tv_glasso_objective(const std::vector<gmrf::CovarianceEstimate>& covariances,
                           const std::vector<Matrix>& thetas, double lambda, double eta,
                           bool penalize_diagonal = true);

struct DynamicSemResult
{
    GraphSequence graphs;
    std::vector<semdag::SemModel> models;
    bool converged = false;
};

/**
 * Slot t minimizes sum_c sum_{tau <= t} gamma^{t - tau} ||y_tau^c - W y_tau^c - B x^c||^2 + alpha_t ||W||_1.
 * `cascades[t]` is N x C (column c is cascade c at slot t) and `x` is the
 * time-invariant N x C input matrix. The weighted moments are updated
 * recursively and each slot warm-starts from the previous one.
 */
DynamicSemResult dynamic_sem_track(const std::vector<Matrix>& cascades, const Matrix& x, double gamma,
                                   const std::vector<double>& alpha,
                                   const semdag::RowSolverOptions& options = {});

DynamicSemResult dynamic_sem_track(const std::vector<Matrix>& cascades, const Matrix& x, double gamma,
                                   double alpha, const semdag::RowSolverOptions& options = {});

/// Known entry W(i, j) = value.
struct Anchor
{
    Index i = 0;
    Index j = 0;
    double value = 0.0;
};

struct JdProblem
{
    /// Symmetric positive semidefinite slices R_m.
    std::vector<Matrix> slices;
    std::vector<Anchor> anchors;
};

struct JdOptions
{
    /// Stop once a sweep lowers the residual by at most tol times its previous value.
    double tol = 1e-13;
    Index max_iter = 2000;
};

struct JdResult
{
    Matrix h;
    Graph w = Graph::empty(2, true);
    double residual = 0.0;
    std::vector<double> residual_trace;
    Index iterations = 0;
    bool converged = false;
    /// Rows pinned only by the unit diagonal; their assignment is not identifiable.
    std::vector<Index> unanchored_rows;
};

/// sum_m ||H R_m H^T - diag(H R_m H^T)||_F^2.
double jd_residual(const std::vector<Matrix>& slices, const Matrix& h);

/**
 * Anchored joint diagonalization with h_ii = 1 and h_ij = -W_ij on anchors.
 *
 * Initialization takes the generalized eigenvectors of two fixed combinations
 * of the slices, which are the rows of H up to order and scale on exactly
 * diagonalizable data, and assigns them to rows by a linear assignment that
 * prefers vectors agreeing with the anchors and dominated by their diagonal
 * entry. Rows are then refined by BCD: given the other rows, row i minimizes
 * h_i^T Q_i h_i with Q_i = sum_m R_m (sum_{j != i} h_j h_j^T) R_m subject to its
 * fixed entries, an equality-constrained least squares.
 */
JdResult jd_fit(const JdProblem& problem, const JdOptions& options = {});

/// Parses "i,j,value;i,j,value;..." (0-based node indices).
std::vector<Anchor> parse_anchors(const std::string& text);

/**
 * Sample correlations (1/n) sum y_t y_t^T over the segments [b_m, b_{m+1}) given
 * by the boundaries (first 0, last T), each plus 1e-8 I.
 */
std::vector<Matrix> segment_correlations(const SignalMatrix& y, const std::vector<Index>& boundaries);

} // namespace graphtopo::dynjd
