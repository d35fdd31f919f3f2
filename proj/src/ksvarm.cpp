#include <graphtopo/ksvarm.hpp>
#include <graphtopo/parallel.hpp>

#include "group_prox.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace graphtopo::ksvarm {

double KernelSpec::operator()(double a, double b) const
{
    switch (kind) {
    case KernelKind::linear: return a * b;
    case KernelKind::gaussian: return std::exp(-(a - b) * (a - b) / (2.0 * bandwidth * bandwidth));
    case KernelKind::polynomial: return std::pow(a * b + offset, degree);
    }
    return 0.0;
}

std::string KernelSpec::describe() const
{
    std::ostringstream s;
    s.precision(17);
    switch (kind) {
    case KernelKind::linear: s << "linear"; break;
    case KernelKind::gaussian: s << "gaussian:" << bandwidth; break;
    case KernelKind::polynomial: s << "polynomial:" << degree << ":" << offset; break;
    }
    return s.str();
}

namespace {

void validate(const KernelSpec& k)
{
    if (k.kind == KernelKind::gaussian && !(k.bandwidth > 0.0)) throw ParamError("gaussian bandwidth must be positive");
    if (k.kind == KernelKind::polynomial && k.degree < 1) throw ParamError("polynomial degree must be >= 1");
}

double parse_number(const std::string& s)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ParamError("bad kernel parameter '" + s + "'");
    }
    if (used != s.size()) throw ParamError("bad kernel parameter '" + s + "'");
    return v;
}

// K ~= F F^T by greedy pivoted Cholesky.
Matrix low_rank_factor(const Matrix& k)
{
    const Index n = k.rows();
    Vector d = k.diagonal();
    const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
    if (d.minCoeff() < -1e-10 * scale) throw KernelError("Gram matrix has a negative diagonal entry");
    const double tol = 1e-10 * scale;
    Matrix f(n, 0);
    while (f.cols() < n) {
        Index p = 0;
        const double pivot = d.maxCoeff(&p);
        if (pivot <= tol) break;
        Vector col = k.col(p);
        if (f.cols() > 0) col -= f * f.row(p).transpose();
        col /= std::sqrt(pivot);
        f.conservativeResize(n, f.cols() + 1);
        f.col(f.cols() - 1) = col;
        d -= col.cwiseAbs2();
    }
    if (n > 0 && (k - f * f.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
        throw KernelError("Gram matrix is not positive semidefinite");
    }
    return f;
}

struct Factor
{
    Matrix f;
    Eigen::LDLT<Matrix> ftf; // F^T F, maps beta back to alpha
};

} // namespace

double median_bandwidth(const SignalMatrix& y)
{
    const Matrix& d = y.data();
    std::vector<double> vals(d.data(), d.data() + d.size());
    if (vals.size() > 2000) {
        std::vector<double> sub;
        const double stride = static_cast<double>(vals.size()) / 2000.0;
        for (int k = 0; k < 2000; ++k) sub.push_back(vals[static_cast<std::size_t>(k * stride)]);
        vals.swap(sub);
    }
    std::vector<double> diffs;
    for (std::size_t a = 0; a < vals.size(); ++a) {
        for (std::size_t b = a + 1; b < vals.size(); ++b) diffs.push_back(std::abs(vals[a] - vals[b]));
    }
    if (diffs.empty()) return 1.0;
    auto mid = diffs.begin() + static_cast<std::ptrdiff_t>(diffs.size() / 2);
    std::nth_element(diffs.begin(), mid, diffs.end());
    return *mid > 0.0 ? *mid : 1.0;
}

std::vector<KernelSpec> parse_kernels(const std::string& text, const SignalMatrix& y)
{
    std::vector<KernelSpec> out;
    std::stringstream list(text);
    std::string item;
    while (std::getline(list, item, ',')) {
        std::vector<std::string> parts;
        std::stringstream fields(item);
        std::string f;
        while (std::getline(fields, f, ':')) parts.push_back(f);
        if (parts.empty()) continue;
        const std::string& name = parts[0];
        KernelSpec k;
        if (name == "linear" && parts.size() == 1) {
            k = KernelSpec::linear();
        } else if (name == "gaussian" && parts.size() <= 2) {
            k = KernelSpec::gaussian(parts.size() == 2 ? parse_number(parts[1]) : median_bandwidth(y));
        } else if (name == "polynomial" && parts.size() >= 2 && parts.size() <= 3) {
            const double deg = parse_number(parts[1]);
            if (deg != std::floor(deg)) throw ParamError("polynomial degree must be an integer");
            k = KernelSpec::polynomial(static_cast<int>(deg), parts.size() == 3 ? parse_number(parts[2]) : 1.0);
        } else {
            throw ParamError("unknown kernel '" + item + "'");
        }
        validate(k);
        out.push_back(k);
    }
    if (out.empty()) throw ParamError("empty kernel list");
    return out;
}

std::vector<KernelSpec> default_dictionary(const SignalMatrix& y)
{
    return {KernelSpec::linear(), KernelSpec::gaussian(median_bandwidth(y))};
}

KernelStack::KernelStack(const SignalMatrix& y, Index order, std::vector<KernelSpec> specs)
    : n_(y.n_nodes()), order_(order), specs_(std::move(specs))
{
    if (order < 0) throw ParamError("lag order must be >= 0");
    if (specs_.empty()) throw ParamError("kernel dictionary is empty");
    for (const auto& k : specs_) validate(k);
    const Index t = y.n_samples();
    if (t <= order) throw InsufficientSamples("kernel stack needs T > L");
    const Index tp = t - order;
    targets_ = y.data().rightCols(tp);
    const auto p = static_cast<Index>(specs_.size());
    grams_.resize(static_cast<std::size_t>(n_ * (order + 1) * p));
    for (Index i = 0; i < n_; ++i) {
        for (Index l = 0; l <= order; ++l) {
            const Vector v = y.data().row(i).segment(order - l, tp).transpose();
            for (Index k = 0; k < p; ++k) {
                Matrix g(tp, tp);
                for (Index b = 0; b < tp; ++b) {
                    for (Index a = b; a < tp; ++a) g(a, b) = g(b, a) = specs_[static_cast<std::size_t>(k)](v[a], v[b]);
                }
                grams_[static_cast<std::size_t>((i * (order + 1) + l) * p + k)] = std::move(g);
            }
        }
    }
}

const Matrix& KernelStack::gram(Index node, Index lag, Index kernel) const
{
    if (node < 0 || node >= n_ || lag < 0 || lag > order_ || kernel < 0 || kernel >= n_kernels()) {
        throw ParamError("kernel stack index out of range");
    }
    return grams_[static_cast<std::size_t>((node * (order_ + 1) + lag) * n_kernels() + kernel)];
}

KernelStack build_kernel_stack(const SignalMatrix& y, Index order, const std::vector<KernelSpec>& specs)
{
    return KernelStack(y, order, specs);
}

namespace {

struct GroupIndex
{
    Index source;
    Index lag;
    Index kernel;
};

std::vector<GroupIndex> groups_for(const KernelStack& s, Index target, bool instantaneous)
{
    std::vector<GroupIndex> out;
    for (Index i = 0; i < s.n_nodes(); ++i) {
        for (Index l = 0; l <= s.order(); ++l) {
            if (l == 0 && (!instantaneous || i == target)) continue;
            for (Index k = 0; k < s.n_kernels(); ++k) out.push_back({i, l, k});
        }
    }
    return out;
}

std::vector<Factor> factor_all(const KernelStack& s)
{
    const auto p = s.n_kernels();
    std::vector<Factor> fs(static_cast<std::size_t>(s.n_nodes() * (s.order() + 1) * p));
    parallel_for(fs.size(), [&](std::size_t idx) {
        const auto id = static_cast<Index>(idx);
        const Index k = id % p;
        const Index l = (id / p) % (s.order() + 1);
        const Index i = id / (p * (s.order() + 1));
        fs[idx].f = low_rank_factor(s.gram(i, l, k));
        fs[idx].ftf.compute(fs[idx].f.transpose() * fs[idx].f);
    });
    return fs;
}

const Factor& factor_of(const std::vector<Factor>& fs, const KernelStack& s, const GroupIndex& g)
{
    return fs[static_cast<std::size_t>((g.source * (s.order() + 1) + g.lag) * s.n_kernels() + g.kernel)];
}

void check_options(const KsvarmOptions& o)
{
    if (!(o.tol > 0.0) || o.max_iter < 1) throw ParamError("ksvarm needs tol > 0 and max_iter >= 1");
    if (!(o.edge_threshold >= 0.0)) throw ParamError("edge threshold must be nonnegative");
}

} // namespace

KsvarmModel ksvarm_fit(const KernelStack& stack, double lambda, const KsvarmOptions& options)
{
    if (!(lambda >= 0.0)) throw ParamError("ksvarm needs lambda >= 0");
    check_options(options);
    const Index n = stack.n_nodes();
    const auto factors = factor_all(stack);

    KsvarmModel model;
    model.n_nodes = n;
    model.order = stack.order();
    model.n_kernels = stack.n_kernels();
    model.alphas.assign(static_cast<std::size_t>(n * n * (stack.order() + 1) * stack.n_kernels()), Vector());
    model.group_norms.assign(model.alphas.size(), 0.0);

    std::vector<std::vector<double>> traces(static_cast<std::size_t>(n));
    std::vector<char> conv(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t tj) {
        const auto j = static_cast<Index>(tj);
        const auto gidx = groups_for(stack, j, options.instantaneous);
        std::vector<detail::Group> groups;
        Index width = 0;
        for (const auto& g : gidx) {
            const Index r = factor_of(factors, stack, g).f.cols();
            groups.push_back({width, r, lambda});
            width += r;
        }
        Matrix phi(stack.n_effective(), width);
        for (std::size_t q = 0; q < gidx.size(); ++q) {
            phi.middleCols(groups[q].start, groups[q].size) = factor_of(factors, stack, gidx[q]).f;
        }
        const Vector y = stack.targets().row(j).transpose();
        auto res = detail::solve_group_prox(phi.transpose() * phi, phi.transpose() * y, groups, Vector::Zero(width),
                                            {options.tol, options.max_iter}, true);
        for (auto& v : res.trace) v += 0.5 * y.squaredNorm();
        traces[tj] = std::move(res.trace);
        conv[tj] = res.converged;
        for (std::size_t q = 0; q < gidx.size(); ++q) {
            const auto& g = gidx[q];
            const Factor& fac = factor_of(factors, stack, g);
            const Vector beta = res.x.segment(groups[q].start, groups[q].size);
            const std::size_t s = model.slot(g.source, j, g.lag, g.kernel);
            model.alphas[s] = beta.size() > 0 ? Vector(fac.f * fac.ftf.solve(beta)) : Vector::Zero(stack.n_effective());
            model.group_norms[s] = beta.norm();
        }
    });

    Matrix w = Matrix::Zero(n, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            if (i == j) continue;
            double best = 0.0;
            for (Index l = 0; l <= stack.order(); ++l) {
                for (Index k = 0; k < stack.n_kernels(); ++k) best = std::max(best, model.group_norm(i, j, l, k));
            }
            if (best > options.edge_threshold) w(j, i) = best;
        }
    }
    model.edge_graph = Graph::directed(std::move(w));
    model.objective_trace = detail::merge_traces(traces);
    model.converged = std::all_of(conv.begin(), conv.end(), [](char c) { return c != 0; });
    return model;
}

KsvarmModel mkl_fit(const KernelStack& stack, double lambda, const KsvarmOptions& options)
{
    if (stack.n_kernels() < 2) throw ParamError("multi-kernel fit needs at least two kernels");
    return ksvarm_fit(stack, lambda, options);
}

double ksvarm_lambda_max(const KernelStack& stack, const KsvarmOptions& options)
{
    const auto factors = factor_all(stack);
    double best = 0.0;
    for (Index j = 0; j < stack.n_nodes(); ++j) {
        const Vector y = stack.targets().row(j).transpose();
        for (const auto& g : groups_for(stack, j, options.instantaneous)) {
            best = std::max(best, (factor_of(factors, stack, g).f.transpose() * y).norm());
        }
    }
    return best;
}

Matrix fitted_values(const KernelStack& stack, const KsvarmModel& model)
{
    const Index n = stack.n_nodes();
    Matrix out = Matrix::Zero(n, stack.n_effective());
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            for (Index l = 0; l <= stack.order(); ++l) {
                for (Index k = 0; k < stack.n_kernels(); ++k) {
                    const Vector& a = model.alpha(i, j, l, k);
                    if (a.size() > 0) out.row(j) += (stack.gram(i, l, k) * a).transpose();
                }
            }
        }
    }
    return out;
}

double ksvarm_objective(const KernelStack& stack, const KsvarmModel& model, double lambda)
{
    double pen = 0.0;
    for (Index j = 0; j < stack.n_nodes(); ++j) {
        for (Index i = 0; i < stack.n_nodes(); ++i) {
            for (Index l = 0; l <= stack.order(); ++l) {
                for (Index k = 0; k < stack.n_kernels(); ++k) {
                    const Vector& a = model.alpha(i, j, l, k);
                    if (a.size() > 0) pen += std::sqrt(std::max(0.0, a.dot(stack.gram(i, l, k) * a)));
                }
            }
        }
    }
    return 0.5 * (stack.targets() - fitted_values(stack, model)).squaredNorm() + lambda * pen;
}

} // namespace graphtopo::ksvarm
