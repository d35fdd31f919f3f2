#pragma once
// Shared solver for row-decoupled regressions:
//
//   min_x  0.5 x^T G x - c^T x + sum_g weight_g ||x_g||_2
//
// with G symmetric PSD and groups given as contiguous index ranges.
// Singleton groups give the lasso, larger ones the group lasso.

#include <graphtopo/core.hpp>

#include <vector>

namespace graphtopo::detail {

struct Group
{
    Index start = 0;
    Index size = 1;
    double weight = 0.0;
};

struct ProxOptions
{
    /// Stop when the gradient-mapping residual drops below tol * max(1, ||c||_inf).
    double tol = 1e-11;
    Index max_iter = 200000;
};

struct ProxResult
{
    Vector x;
    Index iterations = 0;
    bool converged = false;
    /// Objective after each iteration (monotone).
    std::vector<double> trace;
};

double group_objective(const Matrix& g, const Vector& c, const std::vector<Group>& groups, const Vector& x);

/// Monotone FISTA from x0; exact linear solve when every group weight is zero and G is positive definite.
ProxResult solve_group_prox(const Matrix& g, const Vector& c, const std::vector<Group>& groups, Vector x0,
                            const ProxOptions& options, bool record_trace);

/// Largest weight for which x = 0 is optimal, per group: ||c_g||.
double zero_threshold(const Vector& c, const Group& group);

/// Elementwise sum of per-row traces; a finished row contributes its last value.
std::vector<double> merge_traces(const std::vector<std::vector<double>>& traces, double offset = 0.0);

} // namespace graphtopo::detail
