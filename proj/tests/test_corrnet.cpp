#include <doctest.h>
#include <graphtopo/corrnet.hpp>

#include "oracles.hpp"

#include <algorithm>
#include <random>

using namespace graphtopo;
using namespace graphtopo::corrnet;

TEST_CASE("sample covariance")
{
    CHECK(sample_covariance(SignalMatrix(Matrix::Constant(3, 10, 2.0))).sigma.isZero());
    Matrix y(2, 2);
    y << 1, -1, 1, -1;
    const auto c = sample_covariance(SignalMatrix(y));
    CHECK(c.sigma == Matrix::Constant(2, 2, 2.0));
    CHECK_THROWS_AS(sample_covariance(SignalMatrix(Matrix::Zero(2, 1))), InsufficientSamples);
}

TEST_CASE("pearson correlation")
{
    Matrix d = Matrix::Zero(3, 3);
    d.diagonal() << 1, 4, 9;
    CHECK(pearson_matrix({d, 10}) == Matrix::Identity(3, 3));
    CHECK(pearson_matrix({Matrix::Constant(2, 2, 2.0), 10}).isApprox(Matrix::Ones(2, 2), 1e-15));
    Matrix z = Matrix::Identity(2, 2);
    z(0, 0) = 0;
    CHECK_THROWS_AS(pearson_matrix({z, 10}), DegenerateVariance);
}

TEST_CASE("Fisher p-values")
{
    CHECK(fisher_p_value(0.0, 28) == 1.0);
    const double z = std::atanh(0.5) / 0.2;
    const double expected = 2.0 * oracle::normal_upper_tail(z);
    CHECK(fisher_p_value(0.5, 28) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(fisher_p_value(0.5, 28) == doctest::Approx(0.00602).epsilon(0.01));
    CHECK(fisher_p_value(-0.5, 28) == fisher_p_value(0.5, 28));
    CHECK_THROWS_AS(fisher_p_value(1.0, 28), SaturatedCorrelation);
    CHECK_THROWS_AS(fisher_p_value(0.2, 3), InsufficientSamples);
}

TEST_CASE("Benjamini-Hochberg rule")
{
    const std::vector<double> p{0.001, 0.2, 0.8};
    CHECK(bh_rejections(p, 0.05) == 1);

    std::vector<EdgeTest> tests(3);
    tests[0] = {0, 1, 0.0, 0.001};
    tests[1] = {0, 2, 0.0, 0.2};
    tests[2] = {1, 2, 0.0, 0.8};
    const Graph g = bh_fdr_select(tests, 0.05);
    CHECK(g.edge_count() == 1);
    CHECK(g.weights()(0, 1) == 1.0);

    for (auto& t : tests) t.p_value = 1.0;
    CHECK(bh_fdr_select(tests, 0.05).edge_count() == 0);
    for (auto& t : tests) t.p_value = 0.0;
    CHECK(bh_fdr_select(tests, 0.05).edge_count() == 3);

    tests.pop_back();
    CHECK_THROWS_AS(bh_fdr_select(tests, 0.05), ShapeError);
    CHECK_THROWS_AS(bh_rejections(p, 1.5), ParamError);
}

TEST_CASE("rho weights")
{
    std::vector<EdgeTest> tests{{0, 1, std::atanh(-0.7), 0.0}};
    CHECK(bh_fdr_select(tests, 0.1, EdgeWeights::rho).weights()(0, 1) == doctest::Approx(0.7));
}

TEST_CASE("null p-values are uniform")
{
    std::mt19937_64 rng(17);
    std::normal_distribution<double> nd;
    const int reps = 10000;
    const Index t = 100;
    std::vector<double> p(reps);
    for (int r = 0; r < reps; ++r) {
        Matrix y(2, t);
        for (Index k = 0; k < y.size(); ++k) y(k) = nd(rng);
        const Matrix rho = pearson_matrix(sample_covariance(SignalMatrix(y)));
        p[r] = fisher_tests(rho, t)[0].p_value;
    }
    std::sort(p.begin(), p.end());
    double ks = 0.0;
    for (int r = 0; r < reps; ++r) {
        ks = std::max({ks, std::abs((r + 1.0) / reps - p[r]), std::abs(p[r] - static_cast<double>(r) / reps)});
    }
    CHECK(ks < 0.05);
}

TEST_CASE("partial correlations")
{
    CHECK(partial_correlations(Matrix(Vector::Constant(3, 2.0).asDiagonal())).values.isZero());
    Matrix t(2, 2);
    t << 2, -1, -1, 2;
    auto pc = partial_correlations(t);
    CHECK(pc.values(0, 1) == doctest::Approx(0.5));
    CHECK(pc.valid);
    t << 1, 2, 2, 1;
    pc = partial_correlations(t);
    CHECK(pc.values(0, 1) == doctest::Approx(-2.0));
    CHECK_FALSE(pc.valid);
    t << 0, 1, 1, 2;
    CHECK_THROWS_AS(partial_correlations(t), InvalidPrecision);
}
