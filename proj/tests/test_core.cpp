#include <doctest.h>
#include <graphtopo/core.hpp>

#include <random>

using namespace graphtopo;

namespace {

Matrix sym3()
{
    Matrix w(3, 3);
    w << 0, 1, 2, 1, 0, 4, 2, 4, 0;
    return w;
}

Matrix random_symmetric(std::mt19937_64& rng, Index n)
{
    std::uniform_real_distribution<double> u(0.0, 2.0);
    Matrix w = Matrix::Zero(n, n);
    for (Index j = 1; j < n; ++j) {
        for (Index i = 0; i < j; ++i) w(i, j) = w(j, i) = u(rng) < 1.0 ? 0.0 : u(rng);
    }
    return w;
}

} // namespace

TEST_CASE("signal matrix validation")
{
    CHECK_THROWS_AS(SignalMatrix(Matrix::Zero(1, 5)), InvalidInput);
    Matrix bad = Matrix::Zero(3, 2);
    bad(1, 1) = std::nan("");
    CHECK_THROWS_AS(SignalMatrix{bad}, InvalidInput);
    CHECK(SignalMatrix(Matrix::Zero(3, 0)).n_samples() == 0);
}

TEST_CASE("graph invariants")
{
    Matrix asym = sym3();
    asym(0, 1) = 5;
    CHECK_THROWS_AS(Graph::undirected(asym), InvalidInput);
    Matrix neg = sym3();
    neg(0, 1) = neg(1, 0) = -1;
    CHECK_THROWS_AS(Graph::undirected(neg), InvalidInput);
    Matrix diag = sym3();
    diag(2, 2) = 1;
    CHECK_THROWS_AS(Graph::directed(diag), InvalidInput);
    CHECK(Graph::directed(asym).edge_count() == 6);
    CHECK(Graph::undirected(sym3()).edge_count() == 3);
}

TEST_CASE("edge vectorization")
{
    Matrix w2(2, 2);
    w2 << 0, 3, 3, 0;
    auto e2 = edge_vector_from_graph(Graph::undirected(w2));
    CHECK(e2.values().size() == 1);
    CHECK(e2.values()[0] == 3.0);

    auto e0 = edge_vector_from_graph(Graph::empty(4, false));
    CHECK(e0.values().size() == 6);
    CHECK(e0.values().isZero());

    auto e3 = edge_vector_from_graph(Graph::undirected(sym3()));
    CHECK(e3.values() == (Vector(3) << 1, 2, 4).finished());

    CHECK_THROWS_AS(edge_vector_from_graph(Graph::directed(sym3())), DirectedGraphError);
    CHECK_THROWS_AS(EdgeVector(Vector::Constant(3, -1.0), 3), InvalidInput);
    CHECK_THROWS_AS(EdgeVector(Vector::Zero(4), 3), ShapeError);
}

TEST_CASE("edge vector round trip")
{
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 100; ++rep) {
        const Index n = 2 + rep % 9;
        const Matrix w = random_symmetric(rng, n);
        const Graph back = graph_from_edge_vector(edge_vector_from_graph(Graph::undirected(w)));
        CHECK(back.weights() == w);
    }
}

TEST_CASE("degree map")
{
    CHECK(degree_map(EdgeVector(Vector::Constant(1, 3.0), 2)) == Vector::Constant(2, 3.0));
    CHECK(degree_map(EdgeVector(Vector::Zero(6), 4)).isZero());
    CHECK(degree_map(EdgeVector((Vector(3) << 1, 2, 4).finished(), 3)) == (Vector(3) << 3, 5, 6).finished());

    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 100; ++rep) {
        const Index n = 2 + rep % 8;
        const Matrix w = random_symmetric(rng, n);
        const auto e = edge_vector_from_graph(Graph::undirected(w));
        CHECK((degree_map(e) - w.rowwise().sum()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("degree operator adjoint and norm")
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    for (Index n = 2; n < 9; ++n) {
        DegreeOperator s(n);
        const Matrix m = s.materialize();
        for (Index k = 0; k < m.cols(); ++k) {
            CHECK(m.col(k).sum() == 2.0);
            CHECK((m.col(k).array() == 1.0).count() == 2);
        }
        Vector w(s.n_pairs());
        Vector l(n);
        for (auto& v : w) v = nd(rng);
        for (auto& v : l) v = nd(rng);
        CHECK(std::abs(s.apply(w).dot(l) - w.dot(s.adjoint(l))) < 1e-12);
        const double top = Eigen::JacobiSVD<Matrix>(m).singularValues()[0];
        CHECK(top * top == doctest::Approx(s.squared_norm()).epsilon(1e-12));
    }
}

TEST_CASE("laplacian")
{
    Matrix w2(2, 2);
    w2 << 0, 1, 1, 0;
    Matrix l2(2, 2);
    l2 << 1, -1, -1, 1;
    CHECK(laplacian(Graph::undirected(w2)) == l2);
    CHECK(laplacian(Graph::empty(3, false)).isZero());
    Matrix l3(3, 3);
    l3 << 3, -1, -2, -1, 5, -4, -2, -4, 6;
    CHECK(laplacian(Graph::undirected(sym3())) == l3);
    CHECK_THROWS_AS(laplacian(Graph::directed(sym3())), DirectedGraphError);

    std::mt19937_64 rng(9);
    std::normal_distribution<double> nd;
    for (int rep = 0; rep < 50; ++rep) {
        const Matrix l = laplacian(Graph::undirected(random_symmetric(rng, 6)));
        CHECK((l * Vector::Ones(6)).cwiseAbs().maxCoeff() < 1e-12);
        Vector x(6);
        for (auto& v : x) v = nd(rng);
        CHECK(x.dot(l * x) >= -1e-12);
    }
}

TEST_CASE("synthetic graphs")
{
    SyntheticParams p;
    p.n_nodes = 3;
    const Graph chain = generate_synthetic(SyntheticKind::chain, p, 1);
    CHECK(chain.edge_count() == 2);
    CHECK(chain.weights()(0, 1) == 1.0);
    CHECK(chain.weights()(1, 2) == 1.0);
    CHECK(chain.weights()(0, 2) == 0.0);

    p.n_nodes = 4;
    p.edge_prob = 0.0;
    CHECK(generate_synthetic(SyntheticKind::erdos_renyi, p, 1).edge_count() == 0);
    p.edge_prob = 1.0;
    CHECK(generate_synthetic(SyntheticKind::erdos_renyi, p, 1).edge_count() == 6);
    p.edge_prob = 1.5;
    CHECK_THROWS_AS(generate_synthetic(SyntheticKind::erdos_renyi, p, 1), ParamError);

    p.n_nodes = 8;
    p.edge_prob = 0.5;
    p.weight_low = 0.5;
    p.weight_high = 2.0;
    p.signed_weights = true;
    const Graph a = generate_synthetic(SyntheticKind::random_dag, p, 42);
    const Graph b = generate_synthetic(SyntheticKind::random_dag, p, 42);
    CHECK(a.is_directed());
    CHECK(a.weights() == b.weights());
    // Nilpotent adjacency means no directed cycles.
    Matrix power = Matrix::Identity(8, 8);
    for (int k = 0; k < 8; ++k) power = power * a.weights().cwiseAbs();
    CHECK(power.isZero());
}

TEST_CASE("smooth signal generator")
{
    CHECK(generate_smooth_signals(Graph::empty(3, false), 0, 1.0, 1).n_samples() == 0);
    CHECK_THROWS_AS(generate_smooth_signals(Graph::empty(3, false), 10, 0.0, 1), ParamError);

    const auto white = generate_smooth_signals(Graph::empty(3, false), 200000, 1.0, 2);
    const Matrix cov = white.data() * white.data().transpose() / 200000.0;
    CHECK((cov - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 0.02);

    SyntheticParams p;
    p.n_nodes = 3;
    const Graph chain = generate_synthetic(SyntheticKind::chain, p, 0);
    const double delta = 0.5;
    const auto y = generate_smooth_signals(chain, 10000, delta, 3);
    const Matrix l = laplacian(chain);
    const double tv = (y.data().transpose() * l * y.data()).trace() / 10000.0;
    const double expected = (l * (l + delta * Matrix::Identity(3, 3)).inverse()).trace();
    CHECK(tv == doctest::Approx(expected).epsilon(0.03));

    const auto again = generate_smooth_signals(chain, 50, delta, 3);
    CHECK(again.data() == generate_smooth_signals(chain, 50, delta, 3).data());
}

TEST_CASE("recovery scores")
{
    const Graph truth = Graph::undirected(sym3());
    auto same = score_recovery(truth, truth);
    CHECK(same.f1 == 1.0);
    CHECK(same.frobenius_error == 0.0);

    auto none = score_recovery(Graph::empty(3, false), truth);
    CHECK(none.recall == 0.0);
    CHECK(none.f1 == 0.0);

    Matrix t2 = Matrix::Zero(4, 4);
    t2(0, 1) = t2(1, 0) = 1;
    t2(2, 3) = t2(3, 2) = 1;
    Matrix e2 = Matrix::Zero(4, 4);
    e2(0, 1) = e2(1, 0) = 1;
    e2(0, 3) = e2(3, 0) = 1;
    auto half = score_recovery(Graph::undirected(e2), Graph::undirected(t2));
    CHECK(half.precision == 0.5);
    CHECK(half.recall == 0.5);
    CHECK(half.f1 == 0.5);

    CHECK_THROWS_AS(score_recovery(Graph::empty(3, false), Graph::empty(4, false)), ShapeError);
}
