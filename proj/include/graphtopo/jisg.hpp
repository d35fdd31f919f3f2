#pragma once
#include <graphtopo/core.hpp>
#include <optional>
#include <vector>

namespace graphtopo::jisg {

/// Sampled node indices and observed values, one entry per slot.
class PartialObservations
{
public:
    PartialObservations(Index n_nodes, std::vector<std::vector<Index>> indices, std::vector<Vector> values);

    /// NaN entries of an N x T matrix are unobserved.
    static PartialObservations from_matrix(const Matrix& y);

    Index n_nodes() const { return n_; }
    Index n_slots() const { return static_cast<Index>(indices_.size()); }
    const std::vector<Index>& indices(Index t) const { return indices_[static_cast<std::size_t>(t)]; }
    const Vector& values(Index t) const { return values_[static_cast<std::size_t>(t)]; }
    Index n_observed(Index t) const { return values(t).size(); }
    /// N x T matrix with NaN at unobserved entries.
    Matrix to_matrix() const;

private:
    Index n_;
    std::vector<std::vector<Index>> indices_;
    std::vector<Vector> values_;
};

struct JisgOptions
{
    Index sweeps = 50;
    /// Stop once a sweep lowers the objective by at most tol * objective.
    double tol = 1e-9;
    Index gd_steps = 200;
    double gd_tol = 1e-8;
    double admm_tol = 1e-12;
    Index admm_max_iter = 20000;
};

struct JisgResult
{
    Graph w = Graph::empty(2, true);
    Matrix signals;
    /// Objective after initialization, then after each sweep.
    std::vector<double> objective_trace;
    Index sweeps = 0;
    bool converged = false;
};

/**
 * sum_t ||y_t - W y_t||^2 + sum_t (mu / M_t) ||z_t - M_t y_t||^2 + l1 ||W||_1 + l2 ||W||_F^2, diag(W) = 0.
 */
double jisg_objective(const PartialObservations& obs, const Matrix& w, const Matrix& y, double mu, double l1,
                      double l2);

/**
 * Signal step for fixed W: per slot, gradient descent with step 1/L on
 * g(y_t) = (M_t / mu) ||(I - W) y_t||^2 + ||z_t - M_t y_t||^2, where
 * L = 2 (M_t / mu) ||I - W||_2^2 + 2. Returns the new signals; `max_gradient`
 * receives the largest final gradient norm over slots.
 */
Matrix signal_step(const PartialObservations& obs, const Matrix& w, const Matrix& y0, double mu,
                   const JisgOptions& options = {}, double* max_gradient = nullptr);

/**
 * Graph step: min_{diag(W) = 0} sum_t ||y_t - W y_t||^2 + l1 ||W||_1 + l2 ||W||_F^2,
 * row by row with ADMM on the split w = v (v carries the l1 term). A warm start
 * also seeds the scaled dual from the stationarity condition at that point.
 */
Matrix graph_step(const Matrix& y, double l1, double l2, const JisgOptions& options = {},
                  const std::optional<Matrix>& warm_start = std::nullopt);

/**
 * Block-coordinate descent between signal_step and graph_step, starting from
 * W = 0 and signals whose unobserved entries hold the node's mean observed
 * value (zero for never-observed nodes). A step that would raise the
 * objective is discarded.
 */
JisgResult jisg_fit(const PartialObservations& obs, double mu, double l1, double l2, const JisgOptions& options = {});

/// sum_{t < up_to} ||y_t - yhat_t||^2 / sum_{t < up_to} ||y_t||^2.
double cnmse(const SignalMatrix& truth, const SignalMatrix& estimate, Index up_to);
double cnmse(const SignalMatrix& truth, const SignalMatrix& estimate);

} // namespace graphtopo::jisg
