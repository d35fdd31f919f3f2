#include <graphtopo/dynjd.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace graphtopo::dynjd {

namespace {

// Minimum-cost perfect matching on a square cost matrix (Kuhn-Munkres with potentials).
std::vector<Index> assign(const Matrix& cost)
{
    const Index n = cost.rows();
    const double inf = std::numeric_limits<double>::infinity();
    Vector u = Vector::Zero(n + 1), v = Vector::Zero(n + 1);
    std::vector<Index> p(n + 1, 0), way(n + 1, 0);
    for (Index i = 1; i <= n; ++i) {
        p[0] = i;
        Index j0 = 0;
        Vector minv = Vector::Constant(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const Index i0 = p[j0];
            double delta = inf;
            Index j1 = 0;
            for (Index j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) minv[j] = cur, way[j] = j0;
                if (minv[j] < delta) delta = minv[j], j1 = j;
            }
            for (Index j = 0; j <= n; ++j) {
                if (used[j]) u[p[j]] += delta, v[j] -= delta;
                else minv[j] -= delta;
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const Index j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<Index> row_to_col(n);
    for (Index j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

struct Constraints
{
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> fixed;
    Matrix value; // prescribed h entries
    std::vector<Index> anchored_rows;
};

Constraints build_constraints(Index n, const std::vector<Anchor>& anchors)
{
    Constraints c;
    c.fixed.setConstant(n, n, false);
    c.value = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        c.fixed(i, i) = true;
        c.value(i, i) = 1.0;
    }
    std::vector<bool> row_has(n, false);
    for (const auto& a : anchors) {
        if (a.i < 0 || a.j < 0 || a.i >= n || a.j >= n) throw ParamError("anchor index out of range");
        if (!std::isfinite(a.value)) throw ParamError("anchor value must be finite");
        if (a.i == a.j) {
            if (a.value != 0.0) throw AnchorError("anchor on the diagonal conflicts with h_ii = 1");
            continue;
        }
        if (c.fixed(a.i, a.j) && c.value(a.i, a.j) != -a.value) {
            throw AnchorError("conflicting anchors for the same entry");
        }
        c.fixed(a.i, a.j) = true;
        c.value(a.i, a.j) = -a.value;
        row_has[a.i] = true;
    }
    for (Index i = 0; i < n; ++i) {
        if (row_has[i]) c.anchored_rows.push_back(i);
    }
    return c;
}

Matrix initial_rows(const std::vector<Matrix>& slices, const Constraints& c)
{
    const Index n = slices.front().rows();
    const std::size_t m = slices.size();
    Matrix ra = Matrix::Zero(n, n);
    Matrix rb = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < m; ++k) {
        ra += slices[k];
        rb += std::sqrt(static_cast<double>(k) + 2.0) * slices[k];
    }
    const double ridge = 1e-12 * std::max(1.0, ra.diagonal().cwiseAbs().maxCoeff());
    ra.diagonal().array() += ridge;
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(rb, ra);
    if (ges.info() != Eigen::Success) return Matrix::Identity(n, n);
    const Matrix& vecs = ges.eigenvectors();

    Matrix cost(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index k = 0; k < n; ++k) {
            const Vector v = vecs.col(k);
            const double vmax = v.cwiseAbs().maxCoeff();
            if (std::abs(v[i]) <= 1e-12 * vmax) {
                cost(i, k) = 1e6;
                continue;
            }
            const Vector u = v / v[i];
            double mismatch = 0.0;
            double norm = 1.0;
            for (Index j = 0; j < n; ++j) {
                if (j == i || !c.fixed(i, j)) continue;
                mismatch += (u[j] - c.value(i, j)) * (u[j] - c.value(i, j));
                norm += c.value(i, j) * c.value(i, j);
            }
            // Anchors decide; diagonal dominance only breaks ties.
            const double dominance = std::min(50.0, -std::log(std::abs(v[i]) / vmax));
            cost(i, k) = mismatch / norm + 1e-6 * dominance;
        }
    }
    const auto pick = assign(cost);
    Matrix h(n, n);
    for (Index i = 0; i < n; ++i) {
        const Vector v = vecs.col(pick[i]);
        if (std::abs(v[i]) > 0.0) h.row(i) = (v / v[i]).transpose();
        else h.row(i) = Vector::Unit(n, i).transpose();
        for (Index j = 0; j < n; ++j) {
            if (c.fixed(i, j)) h(i, j) = c.value(i, j);
        }
    }
    return h;
}

// Minimizes h_i^T Q h_i over the free entries of row i.
Vector solve_row(const Matrix& q, const Vector& row, const Constraints& c, Index i)
{
    const Index n = row.size();
    std::vector<Index> free, fixed;
    for (Index j = 0; j < n; ++j) (c.fixed(i, j) ? fixed : free).push_back(j);
    Vector out = row;
    if (free.empty()) return out;
    const Matrix qff = q(free, free);
    const Vector rhs = -q(free, fixed) * row(fixed);
    Eigen::LDLT<Matrix> ldlt(qff);
    Vector x;
    const Vector d = ldlt.vectorD();
    if (ldlt.info() == Eigen::Success && d.minCoeff() > 1e-14 * std::max(1.0, d.cwiseAbs().maxCoeff())) {
        x = ldlt.solve(rhs);
    } else {
        x = qff.completeOrthogonalDecomposition().solve(rhs);
    }
    out(free) = x;
    return out;
}

} // namespace

double jd_residual(const std::vector<Matrix>& slices, const Matrix& h)
{
    double r = 0.0;
    for (const auto& s : slices) {
        Matrix d = h * s * h.transpose();
        d.diagonal().setZero();
        r += d.squaredNorm();
    }
    return r;
}

JdResult jd_fit(const JdProblem& problem, const JdOptions& options)
{
    const auto& slices = problem.slices;
    if (slices.size() < 2) throw AmbiguityError("joint diagonalization needs at least two slices");
    if (options.max_iter < 1) throw ParamError("max_iter must be at least 1");
    if (!(options.tol >= 0.0)) throw ParamError("tol must be nonnegative");
    const Index n = slices.front().rows();
    if (n < 2) throw ShapeError("slices must be at least 2 x 2");
    for (const auto& s : slices) {
        if (s.rows() != n || s.cols() != n) throw ShapeError("slices must share a square shape");
        if (!s.allFinite()) throw InvalidInput("slice has non-finite entries");
        const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
        if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) throw InvalidInput("slices must be symmetric");
    }
    const Constraints c = build_constraints(n, problem.anchors);

    JdResult result;
    Matrix h = initial_rows(slices, c);
    double f = jd_residual(slices, h);
    result.residual_trace.push_back(f);

    double scale = 0.0;
    for (const auto& s : slices) scale += s.squaredNorm();
    const double floor = 1e-32 * std::max(scale * scale, 1e-300);

    for (Index it = 1; it <= options.max_iter && f > floor; ++it) {
        const double f_sweep = f;
        for (Index i = 0; i < n; ++i) {
            std::vector<Index> others;
            for (Index j = 0; j < n; ++j) {
                if (j != i) others.push_back(j);
            }
            const Matrix rest = h(others, Eigen::placeholders::all);
            Matrix q = Matrix::Zero(n, n);
            for (const auto& s : slices) {
                const Matrix g = rest * s;
                q.noalias() += g.transpose() * g;
            }
            const Vector cur = h.row(i).transpose();
            const Vector next = solve_row(q, cur, c, i);
            Matrix trial = h;
            trial.row(i) = next.transpose();
            const double f_trial = jd_residual(slices, trial);
            if (f_trial <= f) {
                h = std::move(trial);
                f = f_trial;
            }
        }
        result.residual_trace.push_back(f);
        result.iterations = it;
        if (f_sweep - f <= options.tol * f_sweep) break;
    }
    result.converged = f <= floor || (result.residual_trace.size() >= 2 &&
                                       result.residual_trace[result.residual_trace.size() - 2] - f <=
                                           options.tol * result.residual_trace[result.residual_trace.size() - 2]);

    result.residual = f;
    Matrix w = -h;
    w.diagonal().setZero();
    result.w = Graph::directed(w);
    result.h = std::move(h);
    for (Index i = 0; i < n; ++i) {
        if (std::find(c.anchored_rows.begin(), c.anchored_rows.end(), i) == c.anchored_rows.end()) {
            result.unanchored_rows.push_back(i);
        }
    }
    return result;
}

std::vector<Anchor> parse_anchors(const std::string& text)
{
    std::vector<Anchor> out;
    std::stringstream all(text);
    std::string item;
    while (std::getline(all, item, ';')) {
        if (item.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        std::stringstream fields(item);
        std::string a, b, v;
        if (!std::getline(fields, a, ',') || !std::getline(fields, b, ',') || !std::getline(fields, v, ',')) {
            throw ParamError("anchor must be i,j,value: '" + item + "'");
        }
        std::string rest;
        if (std::getline(fields, rest, ',')) throw ParamError("anchor must be i,j,value: '" + item + "'");
        try {
            std::size_t pa = 0, pb = 0, pv = 0;
            const long ia = std::stol(a, &pa);
            const long ib = std::stol(b, &pb);
            const double val = std::stod(v, &pv);
            auto tail_ok = [](const std::string& s, std::size_t p) {
                return s.find_first_not_of(" \t\r\n", p) == std::string::npos;
            };
            if (!tail_ok(a, pa) || !tail_ok(b, pb) || !tail_ok(v, pv)) throw std::invalid_argument("trailing");
            out.push_back({static_cast<Index>(ia), static_cast<Index>(ib), val});
        } catch (const std::logic_error&) {
            throw ParamError("anchor must be i,j,value: '" + item + "'");
        }
    }
    return out;
}

std::vector<Matrix> segment_correlations(const SignalMatrix& y, const std::vector<Index>& boundaries)
{
    const Index t = y.n_samples();
    if (boundaries.size() < 2) throw ParamError("segment boundaries need at least a start and an end");
    if (boundaries.front() != 0 || boundaries.back() != t) {
        throw ParamError("segment boundaries must start at 0 and end at T");
    }
    std::vector<Matrix> out;
    for (std::size_t m = 0; m + 1 < boundaries.size(); ++m) {
        const Index b0 = boundaries[m], b1 = boundaries[m + 1];
        if (b1 <= b0) throw EmptySlot("segment " + std::to_string(m) + " is empty");
        const auto seg = y.data().middleCols(b0, b1 - b0);
        Matrix r = seg * seg.transpose() / static_cast<double>(b1 - b0);
        r.diagonal().array() += 1e-8;
        out.push_back(0.5 * (r + r.transpose()));
    }
    return out;
}

} // namespace graphtopo::dynjd
