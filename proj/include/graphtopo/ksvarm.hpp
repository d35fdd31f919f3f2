#pragma once
#include <graphtopo/core.hpp>
#include <string>
#include <vector>

namespace graphtopo::ksvarm {

enum class KernelKind { linear, gaussian, polynomial };

/// Scalar kernel on nodal values.
/// gaussian: exp(-(a - b)^2 / (2 bandwidth^2)); polynomial: (a b + offset)^degree.
struct KernelSpec
{
    KernelKind kind = KernelKind::linear;
    double bandwidth = 1.0;
    int degree = 2;
    double offset = 1.0;

    static KernelSpec linear() { return {}; }
    static KernelSpec gaussian(double bandwidth) { return {KernelKind::gaussian, bandwidth, 2, 1.0}; }
    static KernelSpec polynomial(int degree, double offset) { return {KernelKind::polynomial, 1.0, degree, offset}; }

    double operator()(double a, double b) const;
    std::string describe() const;
};

/// Median absolute difference between all pairs of observed values (subsampled past 2000 values).
double median_bandwidth(const SignalMatrix& y);

/// "linear", "gaussian" (median bandwidth), "gaussian:0.5", "polynomial:3" or "polynomial:3:1", comma separated.
std::vector<KernelSpec> parse_kernels(const std::string& text, const SignalMatrix& y);

/// Linear plus median-bandwidth gaussian.
std::vector<KernelSpec> default_dictionary(const SignalMatrix& y);

/**
 * Gram matrices K_i^(l,p)(t, t') = kappa_p(y_{i,t-l}, y_{i,t'-l}) over the
 * T' = T - L target instants t = L..T-1, for lags l = 0..L (l = 0 is the
 * instantaneous term).
 */
class KernelStack
{
public:
    KernelStack(const SignalMatrix& y, Index order, std::vector<KernelSpec> specs);

    Index n_nodes() const { return n_; }
    Index order() const { return order_; }
    Index n_kernels() const { return static_cast<Index>(specs_.size()); }
    Index n_effective() const { return targets_.cols(); }
    const std::vector<KernelSpec>& specs() const { return specs_; }

    const Matrix& gram(Index node, Index lag, Index kernel) const;
    /// Rows are nodes, columns the T' target instants.
    const Matrix& targets() const { return targets_; }

private:
    Index n_;
    Index order_;
    std::vector<KernelSpec> specs_;
    std::vector<Matrix> grams_;
    Matrix targets_;
};

KernelStack build_kernel_stack(const SignalMatrix& y, Index order, const std::vector<KernelSpec>& specs);

struct KsvarmOptions
{
    double tol = 1e-9;
    Index max_iter = 100000;
    /// Include lag-0 groups i != j.
    bool instantaneous = true;
    double edge_threshold = default_weight_tol;
};

struct KsvarmModel
{
    Index n_nodes = 0;
    Index order = 0;
    Index n_kernels = 0;
    /// alpha for (source, target, lag, kernel); empty when the group is excluded.
    std::vector<Vector> alphas;
    /// sqrt(alpha^T K alpha) per group, zero when excluded.
    std::vector<double> group_norms;
    /// W(j, i) = max over lags and kernels of the group norms of i -> j.
    Graph edge_graph = Graph::empty(2, true);
    /// Sum over targets of the objective after each iteration.
    std::vector<double> objective_trace;
    bool converged = false;

    std::size_t slot(Index source, Index target, Index lag, Index kernel) const
    {
        return static_cast<std::size_t>(((target * n_nodes + source) * (order + 1) + lag) * n_kernels + kernel);
    }
    const Vector& alpha(Index source, Index target, Index lag, Index kernel) const
    {
        return alphas[slot(source, target, lag, kernel)];
    }
    double group_norm(Index source, Index target, Index lag, Index kernel) const
    {
        return group_norms[slot(source, target, lag, kernel)];
    }
};

/**
 * Per target j: min 0.5 ||y_j - sum_groups K alpha||^2 + lambda sum_groups sqrt(alpha^T K alpha).
 * Each Gram matrix is factored as K = F F^T by a pivoted Cholesky truncated at
 * 1e-10 relative pivots; with beta = F^T alpha the groups become plain l2 groups.
 */
KsvarmModel ksvarm_fit(const KernelStack& stack, double lambda, const KsvarmOptions& options = {});

/// Same solver; requires a dictionary of at least two kernels.
KsvarmModel mkl_fit(const KernelStack& stack, double lambda, const KsvarmOptions& options = {});

/// Smallest lambda at which every group of every target is zero.
double ksvarm_lambda_max(const KernelStack& stack, const KsvarmOptions& options = {});

/// Fitted values sum K alpha at the training instants, N x T'.
Matrix fitted_values(const KernelStack& stack, const KsvarmModel& model);

double ksvarm_objective(const KernelStack& stack, const KsvarmModel& model, double lambda);

} // namespace graphtopo::ksvarm
