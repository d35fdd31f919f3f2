#include <doctest.h>
#include <graphtopo/ksvarm.hpp>
#include <graphtopo/semdag.hpp>

#include <random>

using namespace graphtopo;
using namespace graphtopo::ksvarm;

namespace {

Matrix gaussian(std::mt19937_64& rng, Index r, Index c)
{
    std::normal_distribution<double> nd;
    Matrix m(r, c);
    for (Index k = 0; k < m.size(); ++k) m(k) = nd(rng);
    return m;
}

// Nonlinear pair: node 1 follows sin of node 0 one step back; node 0 is white.
SignalMatrix sine_pair(std::uint64_t seed, Index t)
{
    std::mt19937_64 rng(seed);
    Matrix y = Matrix::Zero(2, t);
    y.row(0) = 1.5 * gaussian(rng, 1, t);
    for (Index k = 1; k < t; ++k) y(1, k) = std::sin(y(0, k - 1));
    return SignalMatrix(y);
}

} // namespace

TEST_CASE("kernel stacks")
{
    const auto c = build_kernel_stack(SignalMatrix(Matrix::Constant(2, 5, 3.0)), 1, {KernelSpec::linear()});
    CHECK(c.n_effective() == 4);
    CHECK(c.gram(0, 1, 0) == Matrix::Constant(4, 4, 9.0));

    std::mt19937_64 rng(1);
    const SignalMatrix y(gaussian(rng, 3, 12));
    const auto g = build_kernel_stack(y, 2, {KernelSpec::gaussian(0.7)});
    for (Index i = 0; i < 3; ++i) {
        for (Index l = 0; l <= 2; ++l) CHECK(g.gram(i, l, 0).diagonal() == Vector::Ones(10));
    }

    Matrix s(2, 3);
    s << 1, 2, 3, 0, 0, 0;
    const auto lin = build_kernel_stack(SignalMatrix(s), 1, {KernelSpec::linear()});
    Matrix expected(2, 2);
    expected << 1, 2, 2, 4;
    CHECK(lin.gram(0, 1, 0) == expected);
    CHECK(lin.targets().row(0) == (Vector(2) << 2, 3).finished().transpose());

    CHECK_THROWS_AS(build_kernel_stack(SignalMatrix(s), 3, {KernelSpec::linear()}), InsufficientSamples);
    CHECK_THROWS_AS(build_kernel_stack(y, 1, {KernelSpec::gaussian(0.0)}), ParamError);
    CHECK_THROWS_AS(build_kernel_stack(y, 1, {KernelSpec::polynomial(0, 1.0)}), ParamError);
}

TEST_CASE("kernel parsing")
{
    std::mt19937_64 rng(2);
    const SignalMatrix y(gaussian(rng, 2, 50));
    const auto ks = parse_kernels("linear,gaussian:0.5,polynomial:3:2", y);
    REQUIRE(ks.size() == 3);
    CHECK(ks[1].bandwidth == 0.5);
    CHECK(ks[2].degree == 3);
    CHECK(ks[2].offset == 2.0);
    CHECK(parse_kernels("gaussian", y)[0].bandwidth == doctest::Approx(median_bandwidth(y)));
    CHECK_THROWS_AS(parse_kernels("cubic", y), ParamError);
    CHECK_THROWS_AS(parse_kernels("gaussian:abc", y), ParamError);
    CHECK(default_dictionary(y).size() == 2);
}

TEST_CASE("indefinite Gram matrices are rejected")
{
    std::mt19937_64 rng(3);
    const SignalMatrix y(gaussian(rng, 2, 20));
    const auto stack = build_kernel_stack(y, 1, {KernelSpec::polynomial(1, -3.0)});
    CHECK_THROWS_AS(ksvarm_fit(stack, 0.1), KernelError);
}

TEST_CASE("zero threshold")
{
    const auto y = sine_pair(4, 80);
    const auto stack = build_kernel_stack(y, 1, default_dictionary(y));
    const double lmax = ksvarm_lambda_max(stack);
    const auto empty = ksvarm_fit(stack, lmax);
    CHECK(empty.edge_graph.edge_count() == 0);
    for (double v : empty.group_norms) CHECK(v == 0.0);
    CHECK(mkl_fit(stack, 1e12).edge_graph.edge_count() == 0);
    CHECK(ksvarm_fit(stack, 0.5 * lmax).edge_graph.edge_count() > 0);
}

TEST_CASE("nonlinear lagged dependence")
{
    KsvarmOptions o;
    o.instantaneous = false;
    for (std::uint64_t seed = 5; seed < 25; ++seed) {
        const auto y = sine_pair(seed, 400);
        const auto stack = build_kernel_stack(y, 1, {KernelSpec::gaussian(median_bandwidth(y))});
        const auto model = ksvarm_fit(stack, 0.5 * ksvarm_lambda_max(stack, o), o);
        CHECK(model.edge_graph.weights()(1, 0) > 0.0);
        CHECK(model.edge_graph.weights()(0, 1) == 0.0);
    }
}

TEST_CASE("objective, representer and monotonicity")
{
    std::mt19937_64 rng(6);
    const SignalMatrix y(gaussian(rng, 3, 60));
    const auto stack = build_kernel_stack(y, 2, default_dictionary(y));
    const double lambda = 0.05 * ksvarm_lambda_max(stack);
    const auto model = mkl_fit(stack, lambda);
    CHECK(model.converged);
    for (std::size_t k = 1; k < model.objective_trace.size(); ++k) {
        CHECK(model.objective_trace[k] <= model.objective_trace[k - 1] + 1e-12 * model.objective_trace[0]);
    }
    CHECK(model.objective_trace.back() == doctest::Approx(ksvarm_objective(stack, model, lambda)).epsilon(1e-6));

    // Fitted values are K alpha summed over groups.
    const Matrix fit = fitted_values(stack, model);
    Vector manual = Vector::Zero(stack.n_effective());
    for (Index i = 0; i < 3; ++i) {
        for (Index l = 0; l <= 2; ++l) {
            for (Index k = 0; k < 2; ++k) {
                if (model.alpha(i, 0, l, k).size() > 0) manual += stack.gram(i, l, k) * model.alpha(i, 0, l, k);
            }
        }
    }
    CHECK((fit.row(0).transpose() - manual).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(model.alpha(0, 0, 0, 0).size() == 0);
    CHECK_THROWS_AS(mkl_fit(build_kernel_stack(y, 1, {KernelSpec::linear()}), 0.1), ParamError);
}

TEST_CASE("duplicated kernels reach the single-kernel optimum")
{
    std::mt19937_64 rng(7);
    const SignalMatrix y(gaussian(rng, 3, 50));
    const auto k = KernelSpec::gaussian(1.0);
    const auto one = build_kernel_stack(y, 1, {k});
    const auto two = build_kernel_stack(y, 1, {k, k});
    const double lambda = 0.1 * ksvarm_lambda_max(one);
    const double f1 = ksvarm_objective(one, ksvarm_fit(one, lambda), lambda);
    const double f2 = ksvarm_objective(two, mkl_fit(two, lambda), lambda);
    CHECK(f2 == doctest::Approx(f1).epsilon(1e-6));
}

TEST_CASE("support is invariant under joint scaling")
{
    std::mt19937_64 rng(8);
    Matrix raw = gaussian(rng, 3, 60);
    for (Index t = 1; t < 60; ++t) raw(2, t) += 0.8 * raw(0, t - 1);
    const auto base = build_kernel_stack(SignalMatrix(raw), 1, {KernelSpec::linear()});
    const double lambda = 0.2 * ksvarm_lambda_max(base);
    const double c = 3.0;
    const auto scaled = build_kernel_stack(SignalMatrix(c * raw), 1, {KernelSpec::linear()});
    const auto a = ksvarm_fit(base, lambda);
    const auto b = ksvarm_fit(scaled, c * c * lambda);
    for (std::size_t s = 0; s < a.group_norms.size(); ++s) CHECK((a.group_norms[s] > 0.0) == (b.group_norms[s] > 0.0));
}

TEST_CASE("linear kernels favoured on linear data")
{
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::mt19937_64 rng(100 + seed);
        Matrix y = gaussian(rng, 2, 120);
        for (Index t = 1; t < 120; ++t) y(1, t) = 0.9 * y(0, t - 1) + 0.1 * y(1, t);
        const SignalMatrix sy(y);
        const auto stack = build_kernel_stack(sy, 1, default_dictionary(sy));
        KsvarmOptions o;
        o.instantaneous = false;
        const auto m = mkl_fit(stack, 0.1 * ksvarm_lambda_max(stack, o), o);
        if (m.group_norm(0, 1, 1, 0) > m.group_norm(0, 1, 1, 1)) ++wins;
    }
    CHECK(wins >= 6);
}
