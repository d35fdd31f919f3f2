#include "group_prox.hpp"

#include <algorithm>
#include <cmath>

namespace graphtopo::detail {

namespace {

double penalty(const std::vector<Group>& groups, const Vector& x)
{
    double p = 0.0;
    for (const auto& gr : groups) {
        if (gr.weight > 0.0) p += gr.weight * x.segment(gr.start, gr.size).norm();
    }
    return p;
}

void prox(const std::vector<Group>& groups, double step, Vector& x)
{
    for (const auto& gr : groups) {
        const double t = step * gr.weight;
        if (t <= 0.0) continue;
        auto seg = x.segment(gr.start, gr.size);
        const double nrm = seg.norm();
        if (nrm <= t) seg.setZero();
        else seg *= 1.0 - t / nrm;
    }
}

} // namespace

double group_objective(const Matrix& g, const Vector& c, const std::vector<Group>& groups, const Vector& x)
{
    return 0.5 * x.dot(g * x) - c.dot(x) + penalty(groups, x);
}

double zero_threshold(const Vector& c, const Group& group)
{
    return c.segment(group.start, group.size).norm();
}

ProxResult solve_group_prox(const Matrix& g, const Vector& c, const std::vector<Group>& groups, Vector x0,
                            const ProxOptions& options, bool record_trace)
{
    const Index n = c.size();
    ProxResult out;
    if (n == 0) {
        out.x = Vector(0);
        out.converged = true;
        if (record_trace) out.trace.push_back(0.0);
        return out;
    }

    const bool smooth = std::all_of(groups.begin(), groups.end(), [](const Group& gr) { return gr.weight == 0.0; });
    if (smooth) {
        Eigen::LDLT<Matrix> ldlt(g);
        const Vector d = ldlt.vectorD();
        if (ldlt.info() == Eigen::Success && d.minCoeff() > 1e-12 * std::max(1.0, d.cwiseAbs().maxCoeff())) {
            out.x = ldlt.solve(c);
            out.iterations = 1;
            out.converged = true;
            if (record_trace) {
                out.trace.push_back(group_objective(g, c, groups, x0));
                out.trace.push_back(std::min(out.trace.back(), group_objective(g, c, groups, out.x)));
            }
            return out;
        }
    }

    const double lip = std::max(Eigen::SelfAdjointEigenSolver<Matrix>(g, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff(),
                                1e-300);
    const double step = 1.0 / lip;
    const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());

    Vector x = std::move(x0);
    double fx = group_objective(g, c, groups, x);
    if (record_trace) out.trace.push_back(fx);
    Vector y = x;
    double t = 1.0;

    for (Index k = 1; k <= options.max_iter; ++k) {
        Vector z = y - step * (g * y - c);
        prox(groups, step, z);
        const double fz = group_objective(g, c, groups, z);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        // Differences below round-off in f must not freeze the monotone sequence.
        const bool accept = fz <= fx + 1e-15 * std::abs(fx);
        Vector x_next = accept ? z : x;
        y = x_next + (t / t_next) * (z - x_next) + ((t - 1.0) / t_next) * (x_next - x);
        t = t_next;
        x = std::move(x_next);
        if (accept) fx = fz;
        if (record_trace) out.trace.push_back(fx);
        out.iterations = k;

        // Gradient mapping at the current iterate.
        Vector p = x - step * (g * x - c);
        prox(groups, step, p);
        if ((x - p).cwiseAbs().maxCoeff() * lip <= options.tol * scale) {
            out.converged = true;
            break;
        }
    }
    out.x = std::move(x);
    return out;
}

std::vector<double> merge_traces(const std::vector<std::vector<double>>& traces, double offset)
{
    std::size_t len = 0;
    for (const auto& tr : traces) len = std::max(len, tr.size());
    std::vector<double> out(len, offset);
    for (const auto& tr : traces) {
        for (std::size_t k = 0; k < len && !tr.empty(); ++k) out[k] += tr[std::min(k, tr.size() - 1)];
    }
    return out;
}

} // namespace graphtopo::detail
