#include <graphtopo/dynjd.hpp>

#include <cmath>
#include <limits>

namespace graphtopo::dynjd {

using smoothlearn::DistanceVector;

GraphSequence::GraphSequence(std::vector<Graph> graphs)
    : graphs_(std::move(graphs))
{
    if (graphs_.empty()) throw EmptyInput("graph sequence is empty");
    for (const auto& g : graphs_) {
        if (g.n_nodes() != graphs_.front().n_nodes()) throw ShapeError("graphs in a sequence must share N");
    }
}

std::vector<double> temporal_differences(const std::vector<Matrix>& mats)
{
    std::vector<double> out;
    for (std::size_t t = 1; t < mats.size(); ++t) out.push_back((mats[t] - mats[t - 1]).norm());
    return out;
}

std::vector<double> GraphSequence::temporal_differences() const
{
    std::vector<Matrix> m;
    for (const auto& g : graphs_) m.push_back(g.weights());
    return dynjd::temporal_differences(m);
}

// ---------------------------------------------------------------------------
// Smooth signals

namespace {

void check_sequence(const std::vector<DistanceVector>& e)
{
    if (e.empty()) throw EmptyInput("no distance vectors");
    for (const auto& d : e) {
        if (d.n_nodes() != e.front().n_nodes()) throw ShapeError("distance vectors must share N");
    }
}

double coupling(const Vector& a, const Vector& b)
{
    // ||W_a - W_b||_F^2 counts every pair twice.
    return 2.0 * (a - b).squaredNorm();
}

smoothlearn::SmoothLearnOptions slot_options()
{
    smoothlearn::SmoothLearnOptions o;
    o.tol = 1e-12;
    o.max_iter = 200000;
    return o;
}

} // namespace

double tv_smooth_objective(const std::vector<DistanceVector>& e, const std::vector<EdgeVector>& w, double alpha,
                           double beta, double eta)
{
    if (e.size() != w.size()) throw ShapeError("one edge vector per slot expected");
    double f = 0.0;
    for (std::size_t t = 0; t < e.size(); ++t) {
        f += smoothlearn::primal_objective(e[t], w[t].values(), alpha, beta);
        if (t > 0) f += eta * coupling(w[t].values(), w[t - 1].values());
    }
    return f;
}

TvSmoothResult tv_smooth_learn(const std::vector<DistanceVector>& e, double alpha, double beta, double eta,
                               const TvOptions& options)
{
    check_sequence(e);
    if (!(eta >= 0.0)) throw ParamError("coupling eta must be nonnegative");
    const std::size_t nt = e.size();
    const Index n = e.front().n_nodes();
    const auto so = slot_options();

    std::vector<Vector> w(nt);
    std::vector<Vector> duals(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        auto r = smoothlearn::learn_graph(e[t], alpha, beta, so);
        w[t] = r.w.values();
        duals[t] = r.dual.lambda;
    }

    auto pack = [&] {
        std::vector<EdgeVector> out;
        for (const auto& v : w) out.emplace_back(v, n);
        return out;
    };
    auto total = [&] { return tv_smooth_objective(e, pack(), alpha, beta, eta); };

    double f = total();
    if (nt > 1 && eta > 0.0) {
        Vector sum = Vector::Zero(n_pairs(n));
        for (const auto& d : e) sum += d.values();
        const double tn = static_cast<double>(nt);
        const auto c = smoothlearn::learn_graph(DistanceVector(sum, n), tn * alpha, tn * beta, so);
        std::vector<Vector> saved = w;
        for (std::size_t t = 0; t < nt; ++t) w[t] = c.w.values();
        const double fc = total();
        if (fc < f) {
            f = fc;
            for (auto& d : duals) d = c.dual.lambda / tn;
        } else {
            w = std::move(saved);
        }
    }

    TvSmoothResult result{GraphSequence({Graph::empty(n, false)}), {}, {f}, 0, nt == 1 || eta == 0.0};
    if (!result.converged) {
        for (Index sweep = 1; sweep <= options.max_sweeps; ++sweep) {
            for (std::size_t t = 0; t < nt; ++t) {
                Vector nb = Vector::Zero(w[t].size());
                double k = 0.0;
                if (t > 0) nb += w[t - 1], k += 1.0;
                if (t + 1 < nt) nb += w[t + 1], k += 1.0;
                const DistanceVector shifted(e[t].values() - 2.0 * eta * nb, n);
                auto o = so;
                o.lambda0 = duals[t];
                auto r = smoothlearn::learn_graph(shifted, alpha, beta + 2.0 * eta * k, o);
                auto local = [&](const Vector& v) {
                    double g = smoothlearn::primal_objective(e[t], v, alpha, beta);
                    if (t > 0) g += eta * coupling(v, w[t - 1]);
                    if (t + 1 < nt) g += eta * coupling(v, w[t + 1]);
                    return g;
                };
                if (local(r.w.values()) <= local(w[t])) {
                    w[t] = r.w.values();
                    duals[t] = r.dual.lambda;
                }
            }
            const double f_new = total();
            result.objective_trace.push_back(f_new);
            result.sweeps = sweep;
            const bool done = f - f_new <= options.tol * std::abs(f);
            f = f_new;
            if (done) {
                result.converged = true;
                break;
            }
        }
    }

    result.w = pack();
    std::vector<Graph> graphs;
    for (const auto& v : result.w) graphs.push_back(graph_from_edge_vector(v));
    result.graphs = GraphSequence(std::move(graphs));
    return result;
}

// ---------------------------------------------------------------------------
// Time-varying graphical lasso

namespace {

double l1(const Matrix& theta, bool penalize_diagonal)
{
    double s = theta.cwiseAbs().sum();
    if (!penalize_diagonal) s -= theta.diagonal().cwiseAbs().sum();
    return s;
}

// -log det via Cholesky; +inf outside the cone.
double neg_log_det(const Matrix& theta)
{
    Eigen::LLT<Matrix> llt(theta);
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    const Vector d = llt.matrixL().toDenseMatrix().diagonal();
    if ((d.array() <= 0.0).any()) return std::numeric_limits<double>::infinity();
    return -2.0 * d.array().log().sum();
}

struct SlotProblem
{
    const Matrix& s;
    std::vector<const Matrix*> neighbours;
    double lambda;
    double eta;
    bool penalize_diagonal;

    double smooth(const Matrix& theta) const
    {
        double f = neg_log_det(theta);
        if (!std::isfinite(f)) return f;
        f += (s.cwiseProduct(theta)).sum();
        for (const Matrix* nb : neighbours) f += eta * (theta - *nb).squaredNorm();
        return f;
    }

    Matrix gradient(const Matrix& theta) const
    {
        Matrix g = s - theta.llt().solve(Matrix::Identity(theta.rows(), theta.cols()));
        for (const Matrix* nb : neighbours) g += 2.0 * eta * (theta - *nb);
        return g;
    }

    Matrix prox(Matrix z, double step) const
    {
        const double t = step * lambda;
        for (Index j = 0; j < z.cols(); ++j) {
            for (Index i = 0; i < z.rows(); ++i) {
                if (i == j && !penalize_diagonal) continue;
                const double a = z(i, j);
                z(i, j) = a > t ? a - t : (a < -t ? a + t : 0.0);
            }
        }
        return 0.5 * (z + z.transpose());
    }
};

struct SlotResult
{
    Matrix theta;
    Index iterations = 0;
    bool converged = false;
    double residual = 0.0;
};

SlotResult solve_slot(const SlotProblem& p, Matrix theta, double tol, Index max_iter)
{
    SlotResult out;
    const double scale = std::max(1.0, p.s.cwiseAbs().maxCoeff());
    double fs = p.smooth(theta);
    Matrix grad = p.gradient(theta);
    double step = 1.0 / std::max(1.0, theta.cwiseAbs().maxCoeff());
    for (Index k = 1; k <= max_iter; ++k) {
        Matrix next;
        double fn = 0.0;
        for (int bt = 0; bt < 60; ++bt) {
            next = p.prox(theta - step * grad, step);
            fn = p.smooth(next);
            const Matrix d = next - theta;
            if (std::isfinite(fn) && fn <= fs + grad.cwiseProduct(d).sum() + d.squaredNorm() / (2.0 * step)) break;
            step *= 0.5;
        }
        if (!std::isfinite(fn)) break;
        const Matrix d = next - theta;
        const Matrix grad_next = p.gradient(next);
        out.iterations = k;
        out.residual = d.cwiseAbs().maxCoeff() / step;
        // The prox step only moves when the full objective does not increase.
        const double before = fs + p.lambda * l1(theta, p.penalize_diagonal);
        const double after = fn + p.lambda * l1(next, p.penalize_diagonal);
        const Matrix dg = grad_next - grad;
        if (after <= before) {
            theta = next;
            fs = fn;
            grad = grad_next;
        }
        if (out.residual <= tol * scale) {
            out.converged = true;
            break;
        }
        const double sy = d.cwiseProduct(dg).sum();
        step = sy > 0.0 ? d.squaredNorm() / sy : 2.0 * step;
    }
    out.theta = std::move(theta);
    return out;
}

} // namespace

double tv_glasso_objective(const std::vector<gmrf::CovarianceEstimate>& covariances, const std::vector<Matrix>& thetas,
                           double lambda, double eta, bool penalize_diagonal)
{
    if (covariances.size() != thetas.size()) throw ShapeError("one precision matrix per slot expected");
    double f = 0.0;
    for (std::size_t t = 0; t < thetas.size(); ++t) {
        f += neg_log_det(thetas[t]) + covariances[t].sigma.cwiseProduct(thetas[t]).sum() +
             lambda * l1(thetas[t], penalize_diagonal);
        if (t > 0) f += eta * (thetas[t] - thetas[t - 1]).squaredNorm();
    }
    return f;
}

std::vector<double> TvGlassoResult::temporal_differences() const
{
    std::vector<Matrix> m;
    for (const auto& p : precisions) m.push_back(p.theta);
    return dynjd::temporal_differences(m);
}

TvGlassoResult tv_graphical_lasso(const std::vector<gmrf::CovarianceEstimate>& covariances, double lambda, double eta,
                                  const TvGlassoOptions& options)
{
    if (covariances.empty()) throw EmptyInput("no covariance slots");
    if (!(lambda >= 0.0)) throw ParamError("lambda must be nonnegative");
    if (!(eta >= 0.0)) throw ParamError("coupling eta must be nonnegative");
    const std::size_t nt = covariances.size();
    const Index n = covariances.front().sigma.rows();
    for (const auto& c : covariances) {
        if (c.sigma.rows() != n || c.sigma.cols() != n) throw ShapeError("covariances must share N");
    }

    gmrf::GlassoOptions go;
    go.tol = 1e-10;
    go.max_iter = 100000;
    go.penalize_diagonal = options.penalize_diagonal;

    TvGlassoResult result;
    std::vector<Matrix> thetas;
    for (const auto& c : covariances) {
        result.precisions.push_back(gmrf::graphical_lasso(c, lambda, go));
        thetas.push_back(result.precisions.back().theta);
    }
    double f = tv_glasso_objective(covariances, thetas, lambda, eta, options.penalize_diagonal);
    result.objective_trace.push_back(f);
    result.converged = nt == 1 || eta == 0.0;
    if (result.converged) return result;

    std::vector<SlotResult> last(nt);
    for (Index sweep = 1; sweep <= options.sweep.max_sweeps; ++sweep) {
        for (std::size_t t = 0; t < nt; ++t) {
            SlotProblem p{covariances[t].sigma, {}, lambda, eta, options.penalize_diagonal};
            if (t > 0) p.neighbours.push_back(&thetas[t - 1]);
            if (t + 1 < nt) p.neighbours.push_back(&thetas[t + 1]);
            last[t] = solve_slot(p, thetas[t], options.slot_tol, options.slot_max_iter);
            thetas[t] = last[t].theta;
        }
        const double f_new = tv_glasso_objective(covariances, thetas, lambda, eta, options.penalize_diagonal);
        result.objective_trace.push_back(f_new);
        result.sweeps = sweep;
        const bool done = f - f_new <= options.sweep.tol * std::abs(f);
        f = f_new;
        if (done) {
            result.converged = true;
            break;
        }
    }

    for (std::size_t t = 0; t < nt; ++t) {
        auto& pe = result.precisions[t];
        pe.theta = thetas[t];
        pe.converged = result.converged && last[t].converged;
        pe.iterations = last[t].iterations;
        pe.kkt_residual = last[t].residual;
        pe.objective_trace.clear();
    }
    return result;
}

// ---------------------------------------------------------------------------
// Dynamic SEM

DynamicSemResult dynamic_sem_track(const std::vector<Matrix>& cascades, const Matrix& x, double gamma,
                                   const std::vector<double>& alpha, const semdag::RowSolverOptions& options)
{
    if (cascades.empty()) throw EmptyInput("no slots");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ParamError("forgetting factor must lie in (0, 1]");
    if (alpha.size() != cascades.size()) throw ShapeError("one alpha per slot expected");
    const Index n = x.rows();
    if (x.cols() < 1) throw EmptyInput("at least one cascade is needed");
    for (const auto& y : cascades) {
        if (y.rows() != n || y.cols() != x.cols()) throw ShapeError("every slot must be N x C like the inputs");
        if (!y.allFinite()) throw InvalidInput("cascade data contain non-finite values");
    }

    const Matrix xxt = x * x.transpose();
    const Vector xx = xxt.diagonal();
    Matrix syy = Matrix::Zero(n, n);
    Matrix syx = Matrix::Zero(n, n);
    Vector sxx = Vector::Zero(n);

    DynamicSemResult result{GraphSequence({Graph::empty(n, true)}), {}, true};
    std::vector<Graph> graphs;
    std::optional<semdag::SemModel> warm;
    for (std::size_t t = 0; t < cascades.size(); ++t) {
        const Matrix& y = cascades[t];
        syy = gamma * syy + y * y.transpose();
        syx = gamma * syx + y * x.transpose();
        sxx = gamma * sxx + xx;
        auto fit = semdag::sem_fit_moments(syy, syx, sxx, alpha[t], options, warm);
        result.converged = result.converged && fit.converged;
        warm = fit.model;
        graphs.push_back(Graph::directed(fit.model.w));
        result.models.push_back(std::move(fit.model));
    }
    result.graphs = GraphSequence(std::move(graphs));
    return result;
}

DynamicSemResult dynamic_sem_track(const std::vector<Matrix>& cascades, const Matrix& x, double gamma, double alpha,
                                   const semdag::RowSolverOptions& options)
{
    return dynamic_sem_track(cascades, x, gamma, std::vector<double>(cascades.size(), alpha), options);
}

} // namespace graphtopo::dynjd
