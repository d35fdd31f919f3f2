#include <graphtopo/jisg.hpp>
#include <graphtopo/parallel.hpp>

#include <cmath>
#include <limits>

namespace graphtopo::jisg {

PartialObservations::PartialObservations(Index n_nodes, std::vector<std::vector<Index>> indices,
                                         std::vector<Vector> values)
    : n_(n_nodes), indices_(std::move(indices)), values_(std::move(values))
{
    if (n_ < 2) throw InvalidInput("observations need at least 2 nodes");
    if (indices_.empty()) throw EmptyInput("no observation slots");
    if (indices_.size() != values_.size()) throw ShapeError("one value vector per index set expected");
    for (std::size_t t = 0; t < indices_.size(); ++t) {
        const auto& idx = indices_[t];
        if (idx.empty()) throw EmptySlot("slot " + std::to_string(t) + " has no observations");
        if (static_cast<Index>(idx.size()) != values_[t].size()) throw ShapeError("index and value counts differ");
        if (!values_[t].allFinite()) throw InvalidInput("observed values must be finite");
        std::vector<bool> seen(static_cast<std::size_t>(n_), false);
        for (Index i : idx) {
            if (i < 0 || i >= n_) throw InvalidInput("observation index out of range");
            if (seen[static_cast<std::size_t>(i)]) throw InvalidInput("observation indices must be distinct");
            seen[static_cast<std::size_t>(i)] = true;
        }
    }
}

PartialObservations PartialObservations::from_matrix(const Matrix& y)
{
    std::vector<std::vector<Index>> idx(static_cast<std::size_t>(y.cols()));
    std::vector<Vector> vals(static_cast<std::size_t>(y.cols()));
    for (Index t = 0; t < y.cols(); ++t) {
        auto& it = idx[static_cast<std::size_t>(t)];
        for (Index i = 0; i < y.rows(); ++i) {
            if (std::isnan(y(i, t))) continue;
            if (!std::isfinite(y(i, t))) throw InvalidInput("observed values must be finite");
            it.push_back(i);
        }
        Vector v(static_cast<Index>(it.size()));
        for (std::size_t k = 0; k < it.size(); ++k) v[static_cast<Index>(k)] = y(it[k], t);
        vals[static_cast<std::size_t>(t)] = std::move(v);
    }
    return PartialObservations(y.rows(), std::move(idx), std::move(vals));
}

Matrix PartialObservations::to_matrix() const
{
    Matrix y = Matrix::Constant(n_, n_slots(), std::numeric_limits<double>::quiet_NaN());
    for (Index t = 0; t < n_slots(); ++t) {
        const auto& idx = indices(t);
        for (std::size_t k = 0; k < idx.size(); ++k) y(idx[k], t) = values(t)[static_cast<Index>(k)];
    }
    return y;
}

namespace {

void check_signals(const PartialObservations& obs, const Matrix& y)
{
    if (y.rows() != obs.n_nodes() || y.cols() != obs.n_slots()) throw ShapeError("signals must be N x T");
}

void check_w(const PartialObservations& obs, const Matrix& w)
{
    if (w.rows() != obs.n_nodes() || w.cols() != obs.n_nodes()) throw ShapeError("W must be N x N");
}

double soft(double a, double t) { return a > t ? a - t : (a < -t ? a + t : 0.0); }

} // namespace

double jisg_objective(const PartialObservations& obs, const Matrix& w, const Matrix& y, double mu, double l1,
                      double l2)
{
    check_signals(obs, y);
    check_w(obs, w);
    double f = (y - w * y).squaredNorm() + l1 * w.cwiseAbs().sum() + l2 * w.squaredNorm();
    for (Index t = 0; t < obs.n_slots(); ++t) {
        const auto& idx = obs.indices(t);
        double fit = 0.0;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const double r = obs.values(t)[static_cast<Index>(k)] - y(idx[k], t);
            fit += r * r;
        }
        f += mu / static_cast<double>(obs.n_observed(t)) * fit;
    }
    return f;
}

Matrix signal_step(const PartialObservations& obs, const Matrix& w, const Matrix& y0, double mu,
                   const JisgOptions& options, double* max_gradient)
{
    if (!(mu > 0.0)) throw ParamError("mu must be positive");
    check_signals(obs, y0);
    check_w(obs, w);
    const Index n = obs.n_nodes();
    const Matrix a = Matrix::Identity(n, n) - w;
    const Matrix ata = a.transpose() * a;
    const double norm2 = Eigen::SelfAdjointEigenSolver<Matrix>(ata, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();

    Matrix y = y0;
    std::vector<double> grad_norm(static_cast<std::size_t>(obs.n_slots()), 0.0);
    parallel_for(static_cast<std::size_t>(obs.n_slots()), [&](std::size_t ts) {
        const Index t = static_cast<Index>(ts);
        const auto& idx = obs.indices(t);
        const Vector& z = obs.values(t);
        const double c = static_cast<double>(obs.n_observed(t)) / mu;
        const double step = 1.0 / (2.0 * c * norm2 + 2.0);
        Vector yt = y.col(t);
        Vector g(n);
        auto gradient = [&] {
            g = 2.0 * c * (ata * yt);
            for (std::size_t k = 0; k < idx.size(); ++k) g[idx[k]] -= 2.0 * (z[static_cast<Index>(k)] - yt[idx[k]]);
        };
        gradient();
        for (Index s = 0; s < options.gd_steps && g.norm() > options.gd_tol; ++s) {
            yt -= step * g;
            gradient();
        }
        grad_norm[ts] = g.norm();
        y.col(t) = yt;
    });
    if (max_gradient) {
        *max_gradient = 0.0;
        for (double v : grad_norm) *max_gradient = std::max(*max_gradient, v);
    }
    return y;
}

Matrix graph_step(const Matrix& y, double l1, double l2, const JisgOptions& options,
                  const std::optional<Matrix>& warm_start)
{
    if (!(l1 >= 0.0)) throw ParamError("l1 must be nonnegative");
    if (!(l2 > 0.0)) throw ParamError("l2 must be positive for a strongly convex graph step");
    const Index n = y.rows();
    if (warm_start && (warm_start->rows() != n || warm_start->cols() != n)) throw ShapeError("warm start must be N x N");
    const Matrix gram = y * y.transpose();
    Matrix w = Matrix::Zero(n, n);

    parallel_for(static_cast<std::size_t>(n), [&](std::size_t is) {
        const Index i = static_cast<Index>(is);
        std::vector<Index> others;
        for (Index j = 0; j < n; ++j) {
            if (j != i) others.push_back(j);
        }
        const Index m = n - 1;
        // Smooth part w^T C w - 2 b^T w + l2 ||w||^2, Hessian h = 2 (C + l2 I).
        Matrix h = 2.0 * gram(others, others);
        h.diagonal().array() += 2.0 * l2;
        const Vector b2 = 2.0 * gram(others, i);
        const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly).eigenvalues();
        const double rho = std::sqrt(std::max(ev.minCoeff(), 1e-300) * ev.maxCoeff());
        Matrix sys = h;
        sys.diagonal().array() += rho;
        const Eigen::LLT<Matrix> llt(sys);
        const double scale = std::max(1.0, b2.cwiseAbs().maxCoeff());

        Vector x = Vector::Zero(m), v = Vector::Zero(m), u = Vector::Zero(m);
        if (warm_start) {
            v = warm_start->row(i)(others).transpose();
            x = v;
            u = (b2 - h * v) / rho;
        }
        for (Index k = 0; k < options.admm_max_iter; ++k) {
            x = llt.solve(b2 + rho * (v - u));
            const Vector v_prev = v;
            for (Index j = 0; j < m; ++j) v[j] = soft(x[j] + u[j], l1 / rho);
            u += x - v;
            const double primal = (x - v).cwiseAbs().maxCoeff() * rho;
            const double dual = (v - v_prev).cwiseAbs().maxCoeff() * rho;
            if (primal <= options.admm_tol * scale && dual <= options.admm_tol * scale) break;
        }
        for (Index j = 0; j < m; ++j) w(i, others[static_cast<std::size_t>(j)]) = v[j];
    });
    return w;
}

JisgResult jisg_fit(const PartialObservations& obs, double mu, double l1, double l2, const JisgOptions& options)
{
    if (!(mu > 0.0)) throw ParamError("mu must be positive");
    if (!(l1 >= 0.0)) throw ParamError("l1 must be nonnegative");
    if (!(l2 > 0.0)) throw ParamError("l2 must be positive");
    const Index n = obs.n_nodes();
    const Index nt = obs.n_slots();

    Vector sum = Vector::Zero(n), count = Vector::Zero(n);
    for (Index t = 0; t < nt; ++t) {
        const auto& idx = obs.indices(t);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            sum[idx[k]] += obs.values(t)[static_cast<Index>(k)];
            count[idx[k]] += 1.0;
        }
    }
    Matrix y(n, nt);
    for (Index i = 0; i < n; ++i) y.row(i).setConstant(count[i] > 0.0 ? sum[i] / count[i] : 0.0);
    for (Index t = 0; t < nt; ++t) {
        const auto& idx = obs.indices(t);
        for (std::size_t k = 0; k < idx.size(); ++k) y(idx[k], t) = obs.values(t)[static_cast<Index>(k)];
    }
    Matrix w = Matrix::Zero(n, n);

    JisgResult result;
    double f = jisg_objective(obs, w, y, mu, l1, l2);
    result.objective_trace.push_back(f);
    for (Index sweep = 1; sweep <= options.sweeps; ++sweep) {
        const double f_start = f;
        Matrix y_new = signal_step(obs, w, y, mu, options);
        double f_new = jisg_objective(obs, w, y_new, mu, l1, l2);
        if (f_new <= f) {
            y = std::move(y_new);
            f = f_new;
        }
        Matrix w_new = graph_step(y, l1, l2, options, w);
        f_new = jisg_objective(obs, w_new, y, mu, l1, l2);
        if (f_new <= f) {
            w = std::move(w_new);
            f = f_new;
        }
        result.objective_trace.push_back(f);
        result.sweeps = sweep;
        if (f_start - f <= options.tol * f_start) {
            result.converged = true;
            break;
        }
    }
    result.w = Graph::directed(w);
    result.signals = std::move(y);
    return result;
}

double cnmse(const SignalMatrix& truth, const SignalMatrix& estimate, Index up_to)
{
    if (truth.n_nodes() != estimate.n_nodes() || truth.n_samples() != estimate.n_samples()) {
        throw ShapeError("truth and estimate shapes differ");
    }
    if (up_to < 1 || up_to > truth.n_samples()) throw ParamError("cNMSE horizon must lie in [1, T]");
    const auto a = truth.data().leftCols(up_to);
    const auto b = estimate.data().leftCols(up_to);
    const double den = a.squaredNorm();
    if (!(den > 0.0)) throw DegenerateInput("cNMSE is undefined for an all-zero signal");
    return (a - b).squaredNorm() / den;
}

double cnmse(const SignalMatrix& truth, const SignalMatrix& estimate)
{
    return cnmse(truth, estimate, truth.n_samples());
}

} // namespace graphtopo::jisg
