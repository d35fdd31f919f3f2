#include <doctest.h>
#include <graphtopo/gmrf.hpp>

#include <random>

using namespace graphtopo;
using namespace graphtopo::gmrf;

namespace {

Matrix random_spd(std::mt19937_64& rng, Index n)
{
    std::normal_distribution<double> nd;
    Matrix a(n, n + 3);
    for (Index k = 0; k < a.size(); ++k) a(k) = nd(rng);
    return a * a.transpose() / static_cast<double>(n + 3) + 0.1 * Matrix::Identity(n, n);
}

} // namespace

TEST_CASE("unpenalized graphical lasso inverts the covariance")
{
    std::mt19937_64 rng(1);
    for (int rep = 0; rep < 5; ++rep) {
        const Matrix s = random_spd(rng, 6);
        const auto est = graphical_lasso({s, 100}, 0.0, {1e-10, 1000, true});
        CHECK(est.converged);
        CHECK((est.theta - s.inverse()).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("identity covariance")
{
    const auto est = graphical_lasso({Matrix::Identity(4, 4), 10}, 0.5);
    CHECK((est.theta - Matrix::Identity(4, 4) / 1.5).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("large lambda gives the diagonal solution")
{
    std::mt19937_64 rng(2);
    const Matrix s = random_spd(rng, 5);
    Matrix off = s.cwiseAbs();
    off.diagonal().setZero();
    const double lambda = off.maxCoeff() * 1.01;
    const auto est = graphical_lasso({s, 10}, lambda);
    Matrix expected = Matrix::Zero(5, 5);
    expected.diagonal() = (s.diagonal().array() + lambda).inverse();
    CHECK((est.theta - expected).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(glasso_kkt_residual(s, expected, lambda) < 1e-12);
}

TEST_CASE("objective is monotone and the estimate symmetric")
{
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 10; ++rep) {
        const Matrix s = random_spd(rng, 8);
        for (bool diag : {true, false}) {
            const auto est = graphical_lasso({s, 50}, 0.05, {1e-8, 1000, diag});
            CHECK(est.converged);
            CHECK(est.theta == est.theta.transpose());
            for (std::size_t k = 1; k < est.objective_trace.size(); ++k) {
                CHECK(est.objective_trace[k] >= est.objective_trace[k - 1] - 1e-12);
            }
            CHECK(est.kkt_residual <= 1e-8);
        }
    }
}

TEST_CASE("default lambda")
{
    CHECK(default_lambda(10, 100) == doctest::Approx(0.30348).epsilon(1e-4));
    CHECK(default_lambda(10, 4) == doctest::Approx(std::sqrt(std::log(10.0))));
    CHECK(default_lambda(10, 100000000) < 1e-3);
}

TEST_CASE("chain recovery")
{
    SyntheticParams p;
    p.n_nodes = 10;
    const Graph chain = generate_synthetic(SyntheticKind::chain, p, 0);
    const auto y = generate_smooth_signals(chain, 5000, 1.0, 4);
    const auto cov = corrnet::sample_covariance(y);
    const auto est = graphical_lasso(cov, default_lambda(10, 5000));
    const auto report = score_recovery(precision_support(est.theta), chain);
    CHECK(report.f1 >= 0.9);
}

TEST_CASE("Laplacian GMRF")
{
    const auto ident = laplacian_gmrf({Matrix::Identity(4, 4), 10}, 0.1);
    CHECK(ident.converged);
    CHECK(ident.laplacian.cwiseAbs().maxCoeff() < 1e-6);
    CHECK(ident.loading == doctest::Approx(1.0).epsilon(1e-6));

    Matrix s(2, 2);
    s << 1.0, 0.9, 0.9, 1.0;
    const auto pair = laplacian_gmrf({s, 100}, 0.01);
    CHECK(pair.laplacian(0, 1) < -1e-3);
    CHECK(pair.precision().llt().info() == Eigen::Success);

    const auto heavy = laplacian_gmrf({s, 100}, 1e6);
    CHECK(heavy.laplacian.cwiseAbs().maxCoeff() < 1e-9);

    for (std::size_t k = 1; k < pair.objective_trace.size(); ++k) {
        CHECK(pair.objective_trace[k] >= pair.objective_trace[k - 1] - 1e-12);
    }
}

TEST_CASE("total variation")
{
    Matrix w(2, 2);
    w << 0, 1, 1, 0;
    const Matrix l = laplacian(Graph::undirected(w));
    CHECK(smoothness_total(SignalMatrix(Matrix::Constant(2, 3, 4.0)), l) == 0.0);
    Matrix y(2, 1);
    y << 1, -1;
    CHECK(smoothness_total(SignalMatrix(y), l) == doctest::Approx(4.0));
}

TEST_CASE("total variation equals half the weighted distance sum")
{
    std::mt19937_64 rng(8);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        const Index n = 2 + rep % 7;
        Matrix w = Matrix::Zero(n, n);
        for (Index j = 1; j < n; ++j) {
            for (Index i = 0; i < j; ++i) w(i, j) = w(j, i) = u(rng) < 0.5 ? 0.0 : u(rng);
        }
        Matrix y(n, 5);
        for (Index k = 0; k < y.size(); ++k) y(k) = nd(rng);
        Matrix e(n, n);
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < n; ++j) e(i, j) = (y.row(i) - y.row(j)).squaredNorm();
        }
        const double lhs = smoothness_total(SignalMatrix(y), laplacian(Graph::undirected(w)));
        const double rhs = 0.5 * w.cwiseProduct(e).cwiseAbs().sum();
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
    }
}
