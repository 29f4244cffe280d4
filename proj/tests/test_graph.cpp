#include <cmath>
#include <stdexcept>
#include <doctest.h>

#include "oracles.hpp"
#include "tvg/graph.hpp"
#include "tvg/rng.hpp"

using tvg::Matrix;

namespace {

// Sorted (i, j, weight) edge list for order-insensitive comparisons.
std::vector<std::tuple<std::size_t, std::size_t, double>> edge_list(const tvg::Graph& g) {
    std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        for (std::size_t j = i + 1; j < g.node_count(); ++j) {
            if (g.adjacency()(i, j) != 0.0) edges.emplace_back(i, j, g.adjacency()(i, j));
        }
    }
    return edges;
}

}  // namespace

TEST_CASE("knn: three collinear points with k=1 give the chain") {
    const auto g = tvg::build_knn_graph({{0.0}, {1.0}, {2.0}}, 1);
    const auto edges = edge_list(g);
    REQUIRE(edges.size() == 2);
    CHECK(std::get<0>(edges[0]) == 0);
    CHECK(std::get<1>(edges[0]) == 1);
    CHECK(std::get<0>(edges[1]) == 1);
    CHECK(std::get<1>(edges[1]) == 2);
}

TEST_CASE("knn: unit-square corners with k=1 give the 4-cycle") {
    // brute force: side distance 1 < diagonal sqrt(2), both side neighbors tie
    const auto g = tvg::build_knn_graph({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, 1);
    const auto edges = edge_list(g);
    REQUIRE(edges.size() == 4);
    CHECK(g.adjacency()(0, 1) > 0.0);
    CHECK(g.adjacency()(1, 2) > 0.0);
    CHECK(g.adjacency()(2, 3) > 0.0);
    CHECK(g.adjacency()(3, 0) > 0.0);
    CHECK(g.adjacency()(0, 2) == 0.0);
    CHECK(g.adjacency()(1, 3) == 0.0);
}

TEST_CASE("knn: equilateral triangle with k=2 and sigma=1 has equal weights exp(-d^2)") {
    const double h = std::sqrt(3.0) / 2.0;
    const auto g = tvg::build_knn_graph({{0.0, 0.0}, {1.0, 0.0}, {0.5, h}}, 2, 1.0);
    const double w = std::exp(-1.0);  // side length 1
    for (auto [i, j, weight] : edge_list(g)) {
        CHECK(weight == doctest::Approx(w).epsilon(1e-12));
    }
    CHECK(edge_list(g).size() == 3);
}

TEST_CASE("knn: errors on duplicates and disconnection") {
    CHECK_THROWS_WITH_AS(tvg::build_knn_graph({{0.0, 0.0}, {0.0, 0.0}, {1.0, 1.0}}, 1),
                         doctest::Contains("duplicate points"), std::invalid_argument);
    // two far clusters, k=1: each point pairs within its cluster
    CHECK_THROWS_WITH_AS(
        tvg::build_knn_graph({{0.0, 0.0}, {0.1, 0.0}, {100.0, 0.0}, {100.1, 0.0}}, 1),
        doctest::Contains("components"), std::invalid_argument);
    CHECK_THROWS_AS(tvg::build_knn_graph({{0.0}, {1.0}}, 2), std::invalid_argument);
}

TEST_CASE("knn: invariant to input point order") {
    tvg::Rng rng(77);
    std::vector<std::vector<double>> coords(12);
    for (auto& p : coords) p = {rng.uniform(), rng.uniform()};
    const auto g = tvg::build_knn_graph(coords, 3);

    // permute and map edges back through the permutation
    const std::vector<std::size_t> perm{5, 2, 9, 0, 11, 7, 1, 3, 10, 4, 6, 8};
    std::vector<std::vector<double>> shuffled(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) shuffled[i] = coords[perm[i]];
    const auto g2 = tvg::build_knn_graph(shuffled, 3);

    for (std::size_t i = 0; i < coords.size(); ++i) {
        for (std::size_t j = 0; j < coords.size(); ++j) {
            CHECK(g2.adjacency()(i, j) == doctest::Approx(g.adjacency()(perm[i], perm[j]))
                                              .epsilon(1e-13));
        }
    }
}

TEST_CASE("graph construction enforces the adjacency invariants") {
    Matrix bad(2, 2);
    bad(0, 1) = 1.0;  // asymmetric
    CHECK_THROWS_AS(tvg::Graph{bad}, std::invalid_argument);

    Matrix diag(2, 2);
    diag(0, 0) = 1.0;
    CHECK_THROWS_AS(tvg::Graph{diag}, std::invalid_argument);

    Matrix neg(2, 2);
    neg(0, 1) = neg(1, 0) = -0.5;
    CHECK_THROWS_AS(tvg::Graph{neg}, std::invalid_argument);

    tvg::Rng rng(3);
    const auto g = oracle::random_geometric_graph(20, 3, rng);
    const auto& a = g.adjacency();
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        CHECK(a(i, i) == 0.0);
        for (std::size_t j = 0; j < g.node_count(); ++j) {
            CHECK(a(i, j) == a(j, i));
            CHECK(a(i, j) >= 0.0);
        }
    }
}

TEST_CASE("normalized laplacian: two nodes, one unit edge") {
    Matrix a(2, 2);
    a(0, 1) = a(1, 0) = 1.0;
    const auto bundle = tvg::normalized_laplacian(tvg::Graph(a));
    CHECK(bundle.laplacian(0, 0) == doctest::Approx(1.0));
    CHECK(bundle.laplacian(0, 1) == doctest::Approx(-1.0));
    CHECK(bundle.laplacian(1, 0) == doctest::Approx(-1.0));
    CHECK(bundle.laplacian(1, 1) == doctest::Approx(1.0));
    CHECK(bundle.lambda_max == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("normalized laplacian: triangle has diagonal 1 and off-diagonal -1/2") {
    Matrix a(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            if (i != j) a(i, j) = 1.0;
    const auto bundle = tvg::normalized_laplacian(tvg::Graph(a));
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(bundle.laplacian(i, i) == doctest::Approx(1.0));
        for (std::size_t j = 0; j < 3; ++j) {
            if (i != j) CHECK(bundle.laplacian(i, j) == doctest::Approx(-0.5));
        }
    }
    // K3 normalized spectrum is {0, 3/2, 3/2}
    CHECK(bundle.lambda_max == doctest::Approx(1.5).epsilon(1e-8));
}

TEST_CASE("normalized laplacian: star center couples to leaves with -1/sqrt(3)") {
    Matrix a(4, 4);
    for (std::size_t leaf = 1; leaf < 4; ++leaf) a(0, leaf) = a(leaf, 0) = 1.0;
    const auto bundle = tvg::normalized_laplacian(tvg::Graph(a));
    for (std::size_t leaf = 1; leaf < 4; ++leaf) {
        CHECK(bundle.laplacian(0, leaf) == doctest::Approx(-1.0 / std::sqrt(3.0)));
    }
}

TEST_CASE("lambda_max: identity and non-symmetric error") {
    CHECK(tvg::estimate_lambda_max(Matrix::identity(3)) == doctest::Approx(1.0).epsilon(1e-9));
    Matrix bad(2, 2);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(tvg::estimate_lambda_max(bad), std::invalid_argument);
}

TEST_CASE("laplacian invariants on random graphs") {
    tvg::Rng rng(42);
    for (int trial = 0; trial < 4; ++trial) {
        const auto g = oracle::random_geometric_graph(10 + 10 * trial, 3, rng);
        const auto bundle = tvg::normalized_laplacian(g);
        const auto [u, lambdas] = tvg::symmetric_eigendecomposition(bundle.laplacian);

        // spectrum within [0, 2]
        CHECK(lambdas.front() >= -1e-10);
        CHECK(lambdas.back() <= 2.0 + 1e-10);

        // L * D^{1/2} 1 = 0
        const auto deg = g.degrees();
        std::vector<double> v(deg.size());
        for (std::size_t i = 0; i < deg.size(); ++i) v[i] = std::sqrt(deg[i]);
        const auto lv = tvg::multiply(bundle.laplacian, v);
        CHECK(tvg::norm2(lv) <= 1e-8 * tvg::frobenius_norm(bundle.laplacian));

        // power iteration agrees with the Jacobi extreme eigenvalue
        CHECK(oracle::rel_error(bundle.lambda_max, lambdas.back()) < 1e-6);

        // scaled Laplacian spectrum within [-1, 1] up to the estimation slack
        const auto [u2, mu] = tvg::symmetric_eigendecomposition(bundle.scaled);
        CHECK(mu.front() >= -1.0 - 1e-6);
        CHECK(mu.back() <= 1.0 + 1e-6);
    }
}

TEST_CASE("jacobi: diagonal matrix is returned sorted") {
    Matrix d(3, 3);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    d(2, 2) = 2.0;
    const auto [u, lambdas] = tvg::symmetric_eigendecomposition(d);
    CHECK(lambdas == std::vector<double>{1.0, 2.0, 3.0});
    // columns of U are signed unit basis vectors
    for (std::size_t c = 0; c < 3; ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < 3; ++r) sum += std::fabs(u(r, c));
        CHECK(sum == doctest::Approx(1.0));
    }
}

TEST_CASE("jacobi: 2x2 difference matrix") {
    Matrix l(2, 2);
    l(0, 0) = l(1, 1) = 1.0;
    l(0, 1) = l(1, 0) = -1.0;
    const auto [u, lambdas] = tvg::symmetric_eigendecomposition(l);
    CHECK(lambdas[0] == doctest::Approx(0.0));
    CHECK(lambdas[1] == doctest::Approx(2.0));
    const double inv = 1.0 / std::sqrt(2.0);
    CHECK(std::fabs(u(0, 0)) == doctest::Approx(inv));
    CHECK(u(0, 0) == doctest::Approx(u(1, 0)));        // (1,1)/sqrt(2) up to sign
    CHECK(u(0, 1) == doctest::Approx(-u(1, 1)));       // (1,-1)/sqrt(2) up to sign
}

TEST_CASE("jacobi: reconstruction residual on a random symmetric matrix") {
    tvg::Rng rng(5);
    Matrix m(20, 20);
    for (std::size_t i = 0; i < 20; ++i) {
        for (std::size_t j = i; j < 20; ++j) {
            const double v = rng.normal();
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    const auto [u, lambdas] = tvg::symmetric_eigendecomposition(m);

    Matrix ut = tvg::transpose(u);
    CHECK(oracle::rel_frobenius(tvg::multiply(u, ut), Matrix::identity(20)) < 1e-9);

    Matrix lam(20, 20);
    for (std::size_t i = 0; i < 20; ++i) lam(i, i) = lambdas[i];
    const Matrix recon = tvg::multiply(tvg::multiply(u, lam), ut);
    CHECK(oracle::rel_frobenius(recon, m) < 1e-8);

    for (std::size_t i = 0; i + 1 < lambdas.size(); ++i) CHECK(lambdas[i] <= lambdas[i + 1]);
}

TEST_CASE("jacobi: rejects non-symmetric input") {
    Matrix bad(3, 3);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(tvg::symmetric_eigendecomposition(bad), std::invalid_argument);
}
