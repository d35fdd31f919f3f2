#include <graphtopo/corrnet.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace graphtopo::corrnet {

CovarianceEstimate sample_covariance(const SignalMatrix& y)
{
    const Index t = y.n_samples();
    if (t < 2) throw InsufficientSamples("sample covariance needs T >= 2, got " + std::to_string(t));
    const Matrix centered = y.data().colwise() - y.data().rowwise().mean();
    Matrix sigma = centered * centered.transpose() / static_cast<double>(t - 1);
    sigma = 0.5 * (sigma + sigma.transpose()).eval();
    return {std::move(sigma), t};
}

Matrix pearson_matrix(const CovarianceEstimate& c)
{
    const Vector diag = c.sigma.diagonal();
    if ((diag.array() <= 0.0).any()) throw DegenerateVariance("zero variance at some node");
    const Vector inv_sd = diag.array().sqrt().inverse();
    Matrix rho = inv_sd.asDiagonal() * c.sigma * inv_sd.asDiagonal();
    rho.diagonal().setOnes();
    return rho;
}

double fisher_p_value(double rho, Index n_samples)
{
    if (n_samples <= 3) throw InsufficientSamples("Fisher test needs T > 3");
    if (std::abs(rho) >= 1.0) throw SaturatedCorrelation("|rho| = 1 has no finite Fisher score");
    const double r = std::clamp(rho, -1.0 + correlation_clip, 1.0 - correlation_clip);
    const double z = std::atanh(r) * std::sqrt(static_cast<double>(n_samples - 3));
    return std::erfc(std::abs(z) / std::sqrt(2.0));
}

std::vector<EdgeTest> fisher_tests(const Matrix& rho, Index n_samples)
{
    if (n_samples <= 3) throw InsufficientSamples("Fisher test needs T > 3");
    if (rho.rows() != rho.cols() || rho.rows() < 2) throw ShapeError("correlation matrix must be square, N >= 2");
    std::vector<EdgeTest> tests(static_cast<std::size_t>(n_pairs(rho.rows())));
    for_each_pair(rho.rows(), [&](Index k, Index i, Index j) {
        const double r = rho(i, j);
        if (std::abs(r) >= 1.0) {
            throw SaturatedCorrelation("saturated correlation between nodes " + std::to_string(i + 1) + " and " +
                                       std::to_string(j + 1));
        }
        auto& test = tests[static_cast<std::size_t>(k)];
        test.i = i;
        test.j = j;
        test.statistic = std::atanh(std::clamp(r, -1.0 + correlation_clip, 1.0 - correlation_clip));
        test.p_value = fisher_p_value(r, n_samples);
    });
    return tests;
}

std::size_t bh_rejections(std::span<const double> p_values, double q)
{
    if (p_values.empty()) throw EmptyInput("no p-values");
    if (!(q > 0.0 && q < 1.0)) throw ParamError("FDR level q must lie in (0, 1)");
    std::vector<double> sorted(p_values.begin(), p_values.end());
    std::sort(sorted.begin(), sorted.end());
    const auto m = static_cast<double>(sorted.size());
    std::size_t k = 0;
    for (std::size_t r = 1; r <= sorted.size(); ++r) {
        if (sorted[r - 1] <= static_cast<double>(r) / m * q) k = r;
    }
    return k;
}

Graph bh_fdr_select(std::span<const EdgeTest> tests, double q, EdgeWeights weights)
{
    if (tests.empty()) throw EmptyInput("no edge tests");
    const Index n = nodes_from_pairs(static_cast<Index>(tests.size()));

    Matrix seen = Matrix::Zero(n, n);
    std::vector<double> p(tests.size());
    for (std::size_t k = 0; k < tests.size(); ++k) {
        const auto& t = tests[k];
        if (t.i < 0 || t.j >= n || t.i >= t.j) throw InvalidInput("edge test indices must satisfy 0 <= i < j < N");
        if (seen(t.i, t.j) != 0.0) throw InvalidInput("duplicate edge test");
        if (!(t.p_value >= 0.0 && t.p_value <= 1.0)) throw InvalidInput("p-value outside [0, 1]");
        seen(t.i, t.j) = 1.0;
        p[k] = t.p_value;
    }

    const std::size_t k = bh_rejections(p, q);
    std::vector<std::size_t> order(tests.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return p[a] < p[b]; });

    Matrix w = Matrix::Zero(n, n);
    for (std::size_t r = 0; r < k; ++r) {
        const auto& t = tests[order[r]];
        const double v = weights == EdgeWeights::binary ? 1.0 : std::abs(std::tanh(t.statistic));
        w(t.i, t.j) = w(t.j, t.i) = v;
    }
    return Graph::undirected(std::move(w));
}

PartialCorrelations partial_correlations(const Matrix& theta)
{
    if (theta.rows() != theta.cols()) throw ShapeError("precision matrix must be square");
    const Vector diag = theta.diagonal();
    if ((diag.array() <= 0.0).any()) throw InvalidPrecision("precision matrix needs a positive diagonal");
    const Vector inv_sd = diag.array().sqrt().inverse();
    PartialCorrelations out;
    out.values = -(inv_sd.asDiagonal() * theta * inv_sd.asDiagonal());
    out.values.diagonal().setZero();
    out.values = 0.5 * (out.values + out.values.transpose()).eval();
    out.valid = out.values.size() == 0 || out.values.cwiseAbs().maxCoeff() <= 1.0;
    return out;
}

Graph partial_correlation_graph(const PartialCorrelations& pc, double weight_tol)
{
    Matrix w = pc.values.cwiseAbs();
    w = (w.array() > weight_tol).select(w, 0.0);
    return Graph::undirected(std::move(w));
}

} // namespace graphtopo::corrnet
