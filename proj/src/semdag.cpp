#include <graphtopo/semdag.hpp>
#include <graphtopo/parallel.hpp>

#include "group_prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unsupported/Eigen/MatrixFunctions>

namespace graphtopo::semdag {

using detail::Group;

namespace {

detail::ProxOptions prox_options(const RowSolverOptions& o)
{
    if (!(o.tol > 0.0) || o.max_iter < 1) throw ParamError("row solver needs tol > 0 and max_iter >= 1");
    return {o.tol, o.max_iter};
}

std::vector<Index> all_but(Index n, Index skip)
{
    std::vector<Index> idx;
    for (Index i = 0; i < n; ++i) {
        if (i != skip) idx.push_back(i);
    }
    return idx;
}

std::vector<Group> singletons(Index count, double weight)
{
    std::vector<Group> g(static_cast<std::size_t>(count));
    for (Index k = 0; k < count; ++k) g[static_cast<std::size_t>(k)] = {k, 1, weight};
    return g;
}

} // namespace

SemFitResult sem_fit_moments(const Matrix& syy, const Matrix& syx, const Vector& sxx, double alpha,
                             const RowSolverOptions& options, const std::optional<SemModel>& warm_start)
{
    if (!(alpha >= 0.0)) throw ParamError("sem_fit needs alpha >= 0");
    const Index n = syy.rows();
    if (n < 2 || syy.cols() != n || syx.rows() != n || syx.cols() != n || sxx.size() != n) {
        throw ShapeError("SEM moments must be N x N, N x N and N");
    }
    if (warm_start && (warm_start->w.rows() != n || warm_start->w.cols() != n || warm_start->b.size() != n)) {
        throw ShapeError("warm start does not match N");
    }
    const auto popts = prox_options(options);

    SemFitResult out;
    out.model.w = Matrix::Zero(n, n);
    out.model.b = Vector::Zero(n);
    std::vector<std::vector<double>> traces(static_cast<std::size_t>(n));
    std::vector<Index> iters(static_cast<std::size_t>(n));
    std::vector<char> conv(static_cast<std::size_t>(n));

    parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
        const auto i = static_cast<Index>(row);
        const auto others = all_but(n, i);
        Matrix g(n, n);
        g.topLeftCorner(n - 1, n - 1) = syy(others, others);
        g.topRightCorner(n - 1, 1) = syx(others, i);
        g.bottomLeftCorner(1, n - 1) = syx(others, i).transpose();
        g(n - 1, n - 1) = sxx[i];
        g *= 2.0;
        Vector c(n);
        c.head(n - 1) = 2.0 * syy(others, i);
        c[n - 1] = 2.0 * syx(i, i);

        auto groups = singletons(n - 1, alpha);
        Vector x0 = Vector::Zero(n);
        if (warm_start) {
            x0.head(n - 1) = warm_start->w(i, others).transpose();
            x0[n - 1] = warm_start->b[i];
        }
        auto res = detail::solve_group_prox(g, c, groups, std::move(x0), popts, true);
        out.model.w(i, others) = res.x.head(n - 1).transpose();
        out.model.b[i] = res.x[n - 1];
        for (auto& v : res.trace) v += syy(i, i);
        traces[row] = std::move(res.trace);
        iters[row] = res.iterations;
        conv[row] = res.converged;
    });

    out.objective_trace = detail::merge_traces(traces);
    out.iterations = *std::max_element(iters.begin(), iters.end());
    out.converged = std::all_of(conv.begin(), conv.end(), [](char c) { return c != 0; });
    out.input_rank = (sxx.array() > 1e-12 * std::max(1.0, sxx.maxCoeff())).count();
    return out;
}

SemFitResult sem_fit(const SignalMatrix& y, const Matrix& x, double alpha, const RowSolverOptions& options)
{
    if (x.rows() != y.n_nodes() || x.cols() != y.n_samples()) throw ShapeError("Y and X must have the same shape");
    if (!x.allFinite()) throw InvalidInput("inputs have non-finite entries");
    const Matrix& yd = y.data();
    const Vector sxx = x.rowwise().squaredNorm();
    auto out = sem_fit_moments(yd * yd.transpose(), yd * x.transpose(), sxx, alpha, options);
    Eigen::ColPivHouseholderQR<Matrix> qr(x * x.transpose());
    qr.setThreshold(1e-12);
    out.input_rank = qr.rank();
    return out;
}

double sem_objective(const SignalMatrix& y, const Matrix& x, const SemModel& m, double alpha)
{
    Matrix w = m.w;
    const Matrix r = y.data() - w * y.data() - m.b.asDiagonal() * x;
    w.diagonal().setZero();
    return r.squaredNorm() + alpha * w.cwiseAbs().sum();
}

Matrix fit_network_rows(const Matrix& y, double l1, double l2, const RowSolverOptions& options)
{
    if (!(l1 >= 0.0) || !(l2 >= 0.0)) throw ParamError("elastic net weights must be nonnegative");
    const Index n = y.rows();
    if (n < 2) throw ShapeError("need at least 2 nodes");
    const auto popts = prox_options(options);
    const Matrix syy = y * y.transpose();
    Matrix w = Matrix::Zero(n, n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
        const auto i = static_cast<Index>(row);
        const auto others = all_but(n, i);
        Matrix g = 2.0 * syy(others, others);
        g.diagonal().array() += 2.0 * l2;
        const Vector c = 2.0 * syy(others, i);
        auto res = detail::solve_group_prox(g, c, singletons(n - 1, l1), Vector::Zero(n - 1), popts, false);
        w(i, others) = res.x.transpose();
    });
    return w;
}

Acyclicity acyclicity_expm(const Matrix& w)
{
    if (w.rows() != w.cols()) throw ShapeError("acyclicity needs a square matrix");
    const Matrix e = w.cwiseProduct(w).exp();
    return {e.trace() - static_cast<double>(w.rows()), 2.0 * e.transpose().cwiseProduct(w)};
}

Acyclicity acyclicity_poly(const Matrix& w)
{
    if (w.rows() != w.cols()) throw ShapeError("acyclicity needs a square matrix");
    const Index n = w.rows();
    if (n == 0) return {0.0, Matrix(0, 0)};
    const Matrix m = Matrix::Identity(n, n) + w.cwiseProduct(w) / static_cast<double>(n);
    Matrix p = Matrix::Identity(n, n);
    for (Index k = 1; k < n; ++k) p = p * m;
    const double value = (p * m).trace() - static_cast<double>(n);
    return {value, 2.0 * p.transpose().cwiseProduct(w)};
}

Acyclicity acyclicity_ldet(const Matrix& w, double s)
{
    if (w.rows() != w.cols()) throw ShapeError("acyclicity needs a square matrix");
    if (!(s > 0.0)) throw DomainError("log-det acyclicity needs s > 0");
    const Index n = w.rows();
    const Matrix ww = w.cwiseProduct(w);
    if (n > 0) {
        const double radius = Eigen::EigenSolver<Matrix>(ww, false).eigenvalues().cwiseAbs().maxCoeff();
        if (!(s > radius * (1.0 + 1e-12))) throw DomainError("s must exceed the spectral radius of W o W");
    }
    const Matrix a = s * Matrix::Identity(n, n) - ww;
    Eigen::PartialPivLU<Matrix> lu(a);
    const double det = lu.determinant();
    if (!(det > 0.0)) throw DomainError("sI - W o W must have a positive determinant");
    const double value = static_cast<double>(n) * std::log(s) - std::log(det);
    return {value, 2.0 * lu.inverse().transpose().cwiseProduct(w)};
}

Acyclicity acyclicity(AcyclicityKind kind, const Matrix& w, double s)
{
    switch (kind) {
    case AcyclicityKind::expm: return acyclicity_expm(w);
    case AcyclicityKind::poly: return acyclicity_poly(w);
    case AcyclicityKind::ldet: return acyclicity_ldet(w, s);
    }
    throw ParamError("unknown acyclicity kind");
}

bool is_acyclic(const Matrix& w, double tol)
{
    const Index n = w.rows();
    if (w.cols() != n) throw ShapeError("adjacency must be square");
    // Kahn's algorithm; edge j -> i when |W(i, j)| > tol.
    std::vector<Index> indeg(static_cast<std::size_t>(n), 0);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            if (std::abs(w(i, j)) > tol) ++indeg[static_cast<std::size_t>(i)];
        }
    }
    std::vector<Index> ready;
    for (Index i = 0; i < n; ++i) {
        if (indeg[static_cast<std::size_t>(i)] == 0) ready.push_back(i);
    }
    Index visited = 0;
    while (!ready.empty()) {
        const Index j = ready.back();
        ready.pop_back();
        ++visited;
        for (Index i = 0; i < n; ++i) {
            if (std::abs(w(i, j)) > tol && --indeg[static_cast<std::size_t>(i)] == 0) ready.push_back(i);
        }
    }
    return visited == n;
}

namespace {

struct AugmentedLagrangian
{
    const Matrix& syy; // Y Y^T / T
    AcyclicityKind kind;
    double s;
    double l1;
    double rho;
    double mult;

    // Smooth part and its gradient; +inf outside the ldet domain.
    double smooth(const Matrix& w, Matrix* grad) const
    {
        Acyclicity h;
        try {
            h = acyclicity(kind, w, s);
        } catch (const DomainError&) {
            return std::numeric_limits<double>::infinity();
        }
        const Index n = w.rows();
        const Matrix iw = Matrix::Identity(n, n) - w;
        const Matrix m = iw * syy;
        const double loss = 0.5 * (m * iw.transpose()).trace();
        if (grad) *grad = -m + (rho * h.value + mult) * h.gradient;
        return loss + 0.5 * rho * h.value * h.value + mult * h.value;
    }
};

Matrix soft_offdiag(const Matrix& a, double t)
{
    Matrix out = a.unaryExpr([t](double v) { return v > t ? v - t : (v < -t ? v + t : 0.0); });
    out.diagonal().setZero();
    return out;
}

// Proximal gradient with Barzilai-Borwein steps and backtracking on the smooth part.
Matrix solve_inner(const AugmentedLagrangian& al, Matrix w, Index max_iter, double tol)
{
    Matrix grad;
    double f = al.smooth(w, &grad);
    double step = 1.0;
    for (Index it = 0; it < max_iter; ++it) {
        Matrix w_new;
        Matrix grad_new;
        double f_new = 0.0;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            w_new = soft_offdiag(w - step * grad, step * al.l1);
            f_new = al.smooth(w_new, &grad_new);
            const Matrix d = w_new - w;
            if (std::isfinite(f_new) && f_new <= f + (grad.cwiseProduct(d)).sum() + d.squaredNorm() / (2.0 * step)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        const Matrix d = w_new - w;
        const double change = d.cwiseAbs().maxCoeff() / step;
        const Matrix dg = grad_new - grad;
        const double sy = d.cwiseProduct(dg).sum();
        step = sy > 0.0 ? std::clamp(d.squaredNorm() / sy, 1e-10, 1e6) : std::min(1e6, 2.0 * step);
        w = std::move(w_new);
        grad = std::move(grad_new);
        f = f_new;
        if (change <= tol) break;
    }
    return w;
}

} // namespace

DagResult dag_fit(const SignalMatrix& y, const DagOptions& options)
{
    const Index n = y.n_nodes();
    const Index t = y.n_samples();
    if (t < 1) throw InsufficientSamples("dag_fit needs T >= 1");
    if (!(options.l1 >= 0.0) || !(options.h_tol > 0.0) || !(options.w_threshold >= 0.0)) {
        throw ParamError("dag_fit needs l1 >= 0, h_tol > 0, w_threshold >= 0");
    }
    if (options.kind == AcyclicityKind::ldet && !(options.ldet_s > 0.0)) throw ParamError("ldet needs s > 0");
    const Matrix syy = y.data() * y.data().transpose() / static_cast<double>(t);

    Matrix w = options.warm_start.value_or(Matrix::Zero(n, n));
    if (w.rows() != n || w.cols() != n) throw ShapeError("warm start must be N x N");
    w.diagonal().setZero();
    if (options.kind == AcyclicityKind::ldet && n > 0) {
        const Matrix ww = w.cwiseProduct(w);
        const double radius = Eigen::EigenSolver<Matrix>(ww, false).eigenvalues().cwiseAbs().maxCoeff();
        if (radius >= options.ldet_s) w *= std::sqrt(0.5 * options.ldet_s / radius);
    }

    AugmentedLagrangian al{syy, options.kind, options.ldet_s, options.l1, 1.0, 0.0};
    DagResult out;
    double h = acyclicity(options.kind, w, options.ldet_s).value;
    for (Index outer = 0; outer < options.max_outer; ++outer) {
        Matrix w_new;
        double h_new = h;
        while (al.rho < options.rho_max) {
            w_new = solve_inner(al, w, options.max_inner, options.inner_tol);
            h_new = acyclicity(options.kind, w_new, options.ldet_s).value;
            if (h_new > 0.25 * h) al.rho *= 10.0;
            else break;
        }
        w = std::move(w_new);
        h = h_new;
        al.mult += al.rho * h;
        out.h_trace.push_back(h);
        out.outer_iterations = outer + 1;
        if (h <= options.h_tol || al.rho >= options.rho_max) break;
    }

    out.w_raw = w;
    out.h_value = h;
    out.rho = al.rho;
    out.h_converged = h <= options.h_tol;
    out.w = (w.array().abs() > options.w_threshold).select(w, 0.0);
    out.is_dag = out.h_converged && is_acyclic(out.w);
    return out;
}

namespace {

struct LagDesign
{
    Matrix z; // (N L) x T', source-major: row i * L + (l - 1) holds y_{i, t - l}
    Matrix targets; // N x T'
};

LagDesign lag_design(const SignalMatrix& y, Index order)
{
    const Index n = y.n_nodes();
    const Index t = y.n_samples();
    if (order < 1) throw ParamError("VARM order must be >= 1");
    if (t <= order) throw InsufficientSamples("VARM needs T > L");
    const Index tp = t - order;
    LagDesign d;
    d.z.resize(n * order, tp);
    for (Index i = 0; i < n; ++i) {
        for (Index l = 1; l <= order; ++l) {
            d.z.row(i * order + l - 1) = y.data().row(i).segment(order - l, tp);
        }
    }
    d.targets = y.data().rightCols(tp);
    return d;
}

} // namespace

VarmFitResult varm_fit(const SignalMatrix& y, Index order, double lambda, const RowSolverOptions& options)
{
    if (!(lambda >= 0.0)) throw ParamError("varm_fit needs lambda >= 0");
    const auto popts = prox_options(options);
    const auto d = lag_design(y, order);
    const Index n = y.n_nodes();
    const Matrix g = 2.0 * d.z * d.z.transpose();
    const Matrix c_all = 2.0 * d.z * d.targets.transpose();

    std::vector<Group> groups(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) groups[static_cast<std::size_t>(i)] = {i * order, order, lambda};

    VarmFitResult out;
    out.model.lags.assign(static_cast<std::size_t>(order), Matrix::Zero(n, n));
    std::vector<std::vector<double>> traces(static_cast<std::size_t>(n));
    std::vector<Index> iters(static_cast<std::size_t>(n));
    std::vector<char> conv(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
        const auto j = static_cast<Index>(row);
        auto res = detail::solve_group_prox(g, c_all.col(j), groups, Vector::Zero(n * order), popts, true);
        for (Index i = 0; i < n; ++i) {
            for (Index l = 1; l <= order; ++l) out.model.lags[static_cast<std::size_t>(l - 1)](j, i) = res.x[i * order + l - 1];
        }
        const double yy = d.targets.row(j).squaredNorm();
        for (auto& v : res.trace) v += yy;
        traces[row] = std::move(res.trace);
        iters[row] = res.iterations;
        conv[row] = res.converged;
    });
    out.objective_trace = detail::merge_traces(traces);
    out.iterations = *std::max_element(iters.begin(), iters.end());
    out.converged = std::all_of(conv.begin(), conv.end(), [](char c) { return c != 0; });
    return out;
}

double varm_objective(const SignalMatrix& y, const VarmModel& m, double lambda)
{
    const Index order = m.order();
    const auto d = lag_design(y, order);
    const Index n = y.n_nodes();
    Matrix pred = Matrix::Zero(n, d.targets.cols());
    double pen = 0.0;
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            double g2 = 0.0;
            for (Index l = 1; l <= order; ++l) {
                const double v = m.lags[static_cast<std::size_t>(l - 1)](j, i);
                pred.row(j) += v * d.z.row(i * order + l - 1);
                g2 += v * v;
            }
            pen += std::sqrt(g2);
        }
    }
    return (d.targets - pred).squaredNorm() + lambda * pen;
}

double varm_lambda_max(const SignalMatrix& y, Index order)
{
    const auto d = lag_design(y, order);
    const Matrix c_all = 2.0 * d.z * d.targets.transpose();
    double best = 0.0;
    for (Index j = 0; j < c_all.cols(); ++j) {
        for (Index i = 0; i < y.n_nodes(); ++i) best = std::max(best, c_all.col(j).segment(i * order, order).norm());
    }
    return best;
}

Graph varm_graph(const VarmModel& m, EdgeRule rule, double tol)
{
    if (m.lags.empty()) throw EmptyInput("VARM model has no lags");
    const Index n = m.lags.front().rows();
    Matrix w = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            if (i == j) continue;
            double biggest = 0.0;
            bool all = true;
            for (const auto& a : m.lags) {
                biggest = std::max(biggest, std::abs(a(i, j)));
                all = all && std::abs(a(i, j)) > tol;
            }
            const bool edge = rule == EdgeRule::any_lag ? biggest > tol : all;
            if (edge) w(i, j) = biggest;
        }
    }
    return Graph::directed(std::move(w));
}

std::vector<OrderScore> varm_order_scores(const SignalMatrix& y, Index max_order, double lambda,
                                          const RowSolverOptions& options)
{
    if (max_order < 1) throw ParamError("max_order must be >= 1");
    if (y.n_samples() <= max_order) throw InsufficientSamples("order grid needs T > max_order");
    std::vector<OrderScore> scores;
    const Index n = y.n_nodes();
    for (Index order = 1; order <= max_order; ++order) {
        const auto fit = varm_fit(y, order, lambda, options);
        const auto d = lag_design(y, order);
        Matrix pred = Matrix::Zero(n, d.targets.cols());
        Index params = 0;
        for (Index l = 1; l <= order; ++l) {
            const Matrix& a = fit.model.lags[static_cast<std::size_t>(l - 1)];
            pred += a * y.data().middleCols(order - l, d.targets.cols());
            params += (a.array().abs() > default_weight_tol).count();
        }
        const auto tp = static_cast<double>(d.targets.cols());
        double loglik_term = 0.0;
        for (Index j = 0; j < n; ++j) {
            const double rss = (d.targets.row(j) - pred.row(j)).squaredNorm();
            loglik_term += tp * std::log(std::max(rss / tp, 1e-300));
        }
        scores.push_back({order, loglik_term + static_cast<double>(params) * std::log(tp)});
    }
    return scores;
}

Index select_varm_order(const SignalMatrix& y, Index max_order, double lambda, const RowSolverOptions& options)
{
    const auto scores = varm_order_scores(y, max_order, lambda, options);
    return std::min_element(scores.begin(), scores.end(), [](auto& a, auto& b) { return a.bic < b.bic; })->order;
}

} // namespace graphtopo::semdag
