#pragma once
#include <graphtopo/core.hpp>
#include <span>
#include <vector>

namespace graphtopo::corrnet {

/// Unbiased sample covariance of a SignalMatrix.
struct CovarianceEstimate
{
    Matrix sigma;
    Index n_samples = 0;
};

/// Fisher-score test of H0: rho_ij = 0 for one unordered pair (i < j).
struct EdgeTest
{
    Index i = 0;
    Index j = 0;
    double statistic = 0.0; ///< atanh(rho_ij)
    double p_value = 1.0;   ///< two-sided, under Normal(0, 1/(T-3))
};

enum class EdgeWeights { binary, rho };

/// Correlations are clipped to [-1 + eps, 1 - eps] before atanh.
inline constexpr double correlation_clip = 1e-12;

CovarianceEstimate sample_covariance(const SignalMatrix& y);

/// rho_ij = sigma_ij / sqrt(sigma_ii sigma_jj); throws DegenerateVariance on a zero variance.
Matrix pearson_matrix(const CovarianceEstimate& c);

/// Two-sided p-value of an empirical correlation under the Fisher null.
double fisher_p_value(double rho, Index n_samples);

/// One test per unordered pair, in shared pair order.
std::vector<EdgeTest> fisher_tests(const Matrix& rho, Index n_samples);

/// Number of rejections k of the Benjamini-Hochberg step-up rule:
/// the largest k with p_(k) <= (k / m) q.
std::size_t bh_rejections(std::span<const double> p_values, double q);

/**
 * Declares the edges whose p-values are among the k smallest, k from
 * bh_rejections. Tests must cover every unordered pair of some N exactly once.
 * EdgeWeights::rho stores |tanh(statistic)| instead of 1.
 */
Graph bh_fdr_select(std::span<const EdgeTest> tests, double q, EdgeWeights weights = EdgeWeights::binary);

struct PartialCorrelations
{
    Matrix values; ///< zero diagonal
    bool valid = true; ///< false when some |value| > 1, i.e. the input was not positive definite
};

/// rho_ij|rest = -theta_ij / sqrt(theta_ii theta_jj).
PartialCorrelations partial_correlations(const Matrix& theta);

/// Undirected graph on the support of a partial-correlation matrix, weights |rho|.
Graph partial_correlation_graph(const PartialCorrelations& pc, double weight_tol = default_weight_tol);

} // namespace graphtopo::corrnet
