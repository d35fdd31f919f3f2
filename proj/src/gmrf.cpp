#include <graphtopo/gmrf.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace graphtopo::gmrf {

namespace {

void check_covariance(const Matrix& s)
{
    if (s.rows() != s.cols() || s.rows() < 2) throw ShapeError("covariance must be square with N >= 2");
    if (!s.allFinite()) throw InvalidInput("covariance has non-finite entries");
    if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, s.cwiseAbs().maxCoeff())) {
        throw InvalidInput("covariance must be symmetric");
    }
}

double soft_threshold(double a, double t)
{
    if (a > t) return a - t;
    if (a < -t) return a + t;
    return 0.0;
}

double log_det_spd(const Matrix& m)
{
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

std::vector<Index> all_but(Index n, Index skip)
{
    std::vector<Index> idx;
    idx.reserve(static_cast<std::size_t>(n - 1));
    for (Index i = 0; i < n; ++i) {
        if (i != skip) idx.push_back(i);
    }
    return idx;
}

} // namespace

double glasso_objective(const Matrix& sigma, const Matrix& theta, double lambda, bool penalize_diagonal)
{
    double penalty = theta.cwiseAbs().sum();
    if (!penalize_diagonal) penalty -= theta.diagonal().cwiseAbs().sum();
    return log_det_spd(theta) - (sigma.cwiseProduct(theta)).sum() - lambda * penalty;
}

double glasso_kkt_residual(const Matrix& sigma, const Matrix& theta, double lambda, bool penalize_diagonal)
{
    Eigen::LLT<Matrix> llt(theta);
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    const Matrix w = llt.solve(Matrix::Identity(theta.rows(), theta.cols()));
    // Smooth part of the minimization form: S - Theta^{-1}.
    const Matrix g = sigma - w;
    double worst = 0.0;
    for (Index j = 0; j < theta.cols(); ++j) {
        for (Index i = 0; i < theta.rows(); ++i) {
            const double pen = (i == j && !penalize_diagonal) ? 0.0 : lambda;
            const double t = theta(i, j);
            double r;
            if (t != 0.0) r = std::abs(g(i, j) + pen * (t > 0.0 ? 1.0 : -1.0));
            else r = std::max(0.0, std::abs(g(i, j)) - pen);
            worst = std::max(worst, r);
        }
    }
    return worst;
}

double default_lambda(Index n_nodes, Index n_samples)
{
    if (n_nodes < 2 || n_samples < 1) throw ParamError("default_lambda needs N >= 2 and T >= 1");
    return 2.0 * std::sqrt(std::log(static_cast<double>(n_nodes)) / static_cast<double>(n_samples));
}

PrecisionEstimate graphical_lasso(const CovarianceEstimate& c, double lambda, const GlassoOptions& options)
{
    if (!(lambda >= 0.0)) throw ParamError("graphical lasso needs lambda >= 0");
    const Matrix& s = c.sigma;
    check_covariance(s);
    const Index n = s.rows();
    const double diag_pen = options.penalize_diagonal ? lambda : 0.0;
    if ((s.diagonal().array() + diag_pen <= 0.0).any()) {
        throw DegenerateVariance("graphical lasso needs S_ii + lambda > 0");
    }

    PrecisionEstimate out;
    Vector init = (s.diagonal().array() + diag_pen).inverse();
    out.theta = init.asDiagonal();
    Matrix w = Matrix(init.cwiseInverse().asDiagonal());

    const double inner_tol = 0.1 * options.tol;
    out.kkt_residual = glasso_kkt_residual(s, out.theta, lambda, options.penalize_diagonal);
    if (out.kkt_residual <= options.tol) {
        out.converged = true;
        out.objective_trace.push_back(glasso_objective(s, out.theta, lambda, options.penalize_diagonal));
        return out;
    }

    for (Index sweep = 0; sweep < options.max_iter; ++sweep) {
        for (Index j = 0; j < n; ++j) {
            const auto others = all_but(n, j);
            const double w22 = w(j, j);
            const Vector w12 = w(others, j);
            // Theta_11^{-1} by a rank-one downdate of W.
            const Matrix a = w(others, others) - w12 * w12.transpose() / w22;
            const double cj = s(j, j) + diag_pen;
            const Vector b = s(others, j);

            Vector x = out.theta(others, j);
            Vector ax = a * x;
            for (int inner = 0; inner < 1000; ++inner) {
                double max_step = 0.0;
                for (Index k = 0; k < x.size(); ++k) {
                    const double rest = ax[k] - a(k, k) * x[k];
                    const double next = -soft_threshold(cj * rest + b[k], lambda) / (cj * a(k, k));
                    const double delta = next - x[k];
                    if (delta != 0.0) {
                        ax += delta * a.col(k);
                        x[k] = next;
                        max_step = std::max(max_step, std::abs(delta));
                    }
                }
                if (max_step <= inner_tol) break;
            }

            const double gamma = 1.0 / cj;
            out.theta(others, j) = x;
            out.theta(j, others) = x.transpose();
            out.theta(j, j) = gamma + x.dot(ax);

            // Block inverse with Theta_11 unchanged.
            w(j, j) = cj;
            const Vector wcol = -cj * ax;
            w(others, j) = wcol;
            w(j, others) = wcol.transpose();
            w(others, others) = a + cj * ax * ax.transpose();
        }

        Eigen::LLT<Matrix> llt(out.theta);
        if (llt.info() == Eigen::Success) w = llt.solve(Matrix::Identity(n, n));
        out.iterations = sweep + 1;
        out.objective_trace.push_back(glasso_objective(s, out.theta, lambda, options.penalize_diagonal));
        out.kkt_residual = glasso_kkt_residual(s, out.theta, lambda, options.penalize_diagonal);
        if (out.kkt_residual <= options.tol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

LaplacianEstimate laplacian_gmrf(const CovarianceEstimate& c, double lambda, const LaplacianOptions& options)
{
    if (!(lambda >= 0.0)) throw ParamError("laplacian_gmrf needs lambda >= 0");
    if (!(options.min_loading > 0.0)) throw ParamError("min_loading must be positive");
    const Matrix& s = c.sigma;
    check_covariance(s);
    const Index n = s.rows();
    const Index m = n_pairs(n);

    // tr(S L(w)) = q^T w.
    Vector q(m);
    for_each_pair(n, [&](Index k, Index i, Index j) { q[k] = s(i, i) + s(j, j) - 2.0 * s(i, j); });
    const double trace_s = s.trace();
    const double pen_w = options.penalize_diagonal ? 4.0 * lambda : 2.0 * lambda;
    const double pen_gamma = options.penalize_diagonal ? lambda * static_cast<double>(n) : 0.0;

    auto precision = [&](const Vector& w, double gamma) {
        Matrix theta = -unpack_upper(w, n);
        theta.diagonal() = -theta.rowwise().sum();
        theta.diagonal().array() += gamma;
        return theta;
    };
    // Minimization form.
    auto objective = [&](const Vector& w, double gamma) {
        return -log_det_spd(precision(w, gamma)) + q.dot(w) + gamma * trace_s + pen_w * w.sum() + pen_gamma * gamma;
    };
    auto gradient = [&](const Vector& w, double gamma, Vector& gw, double& gg) {
        const Matrix theta = precision(w, gamma);
        Eigen::LLT<Matrix> llt(theta);
        const Matrix cov = llt.solve(Matrix::Identity(n, n));
        gw.resize(m);
        for_each_pair(n, [&](Index k, Index i, Index j) {
            gw[k] = -(cov(i, i) + cov(j, j) - 2.0 * cov(i, j)) + q[k] + pen_w;
        });
        gg = -cov.trace() + trace_s + pen_gamma;
    };

    Vector w = Vector::Zero(m);
    double gamma = std::max(options.min_loading, static_cast<double>(n) / (trace_s + pen_gamma));
    double f = objective(w, gamma);

    Vector gw;
    double gg = 0.0;
    gradient(w, gamma, gw, gg);
    double step = 1.0 / std::max(1.0, std::sqrt(gw.squaredNorm() + gg * gg));

    LaplacianEstimate out;
    auto residual = [&](const Vector& w_, double g_, const Vector& gw_, double gg_) {
        const Vector pw = (w_ - gw_).cwiseMax(0.0) - w_;
        const double pg = std::max(options.min_loading, g_ - gg_) - g_;
        return std::max(pw.cwiseAbs().maxCoeff(), std::abs(pg));
    };
    out.residual = residual(w, gamma, gw, gg);

    for (Index it = 0; it < options.max_iter && out.residual > options.tol; ++it) {
        Vector w_new;
        double gamma_new = gamma;
        double f_new = f;
        for (int bt = 0; bt < 100; ++bt) {
            w_new = (w - step * gw).cwiseMax(0.0);
            gamma_new = std::max(options.min_loading, gamma - step * gg);
            f_new = objective(w_new, gamma_new);
            const double dw2 = (w_new - w).squaredNorm() + (gamma_new - gamma) * (gamma_new - gamma);
            const double lin = gw.dot(w_new - w) + gg * (gamma_new - gamma);
            if (std::isfinite(f_new) && f_new <= f + lin + dw2 / (2.0 * step)) break;
            step *= 0.5;
        }
        if (!(f_new <= f)) break;

        Vector gw_new;
        double gg_new = 0.0;
        gradient(w_new, gamma_new, gw_new, gg_new);
        // Barzilai-Borwein step for the next iteration.
        const double sy = (w_new - w).dot(gw_new - gw) + (gamma_new - gamma) * (gg_new - gg);
        const double ss = (w_new - w).squaredNorm() + (gamma_new - gamma) * (gamma_new - gamma);
        step = (sy > 0.0 && ss > 0.0) ? std::clamp(ss / sy, 1e-12, 1e12) : std::min(1e12, 2.0 * step);

        w = std::move(w_new);
        gamma = gamma_new;
        f = f_new;
        gw = std::move(gw_new);
        gg = gg_new;
        out.iterations = it + 1;
        out.objective_trace.push_back(-f);
        out.residual = residual(w, gamma, gw, gg);
    }

    out.converged = out.residual <= options.tol;
    out.laplacian = precision(w, 0.0);
    out.loading = gamma;
    return out;
}

double smoothness_total(const SignalMatrix& y, const Matrix& laplacian)
{
    if (laplacian.rows() != y.n_nodes() || laplacian.cols() != y.n_nodes()) {
        throw ShapeError("laplacian size does not match the signal");
    }
    return (y.data().transpose() * laplacian * y.data()).trace();
}

double smoothness_total(const CovarianceEstimate& c, const Matrix& laplacian)
{
    if (laplacian.rows() != c.sigma.rows() || laplacian.cols() != c.sigma.cols()) {
        throw ShapeError("laplacian size does not match the covariance");
    }
    return c.sigma.cwiseProduct(laplacian).sum();
}

Graph precision_support(const Matrix& theta, double weight_tol)
{
    Matrix w = theta.cwiseAbs();
    w.diagonal().setZero();
    w = 0.5 * (w + w.transpose()).eval();
    w = (w.array() > weight_tol).select(w, 0.0);
    return Graph::undirected(std::move(w));
}

} // namespace graphtopo::gmrf
