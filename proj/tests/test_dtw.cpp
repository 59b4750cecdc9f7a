#include <doctest.h>

#include <Eigen/Core>

#include "a2sa/dtw.hpp"
#include "a2sa/rng.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace a2sa;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, int n, int m, double lo = 0.0, double hi = 10.0) {
    Eigen::MatrixXd c(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) c(i, j) = rng.uniform(lo, hi);
    return c;
}

double path_cost_on(const Eigen::MatrixXd& cost, const WarpingPath& path) {
    double acc = 0.0;
    for (const IndexPair& p : path) acc += cost(p.a, p.b);
    return acc;
}

} // namespace

TEST_CASE("vector_distance basics and zero-vector convention") {
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(4);
    Eigen::VectorXd x(4), y(4);
    x << 1, 2, 3, 4;
    y << 4, 3, 2, 1;

    CHECK(vector_distance(DistanceKind::cosine, zero, zero) == 0.0);
    CHECK(vector_distance(DistanceKind::cosine, zero, x) == 1.0);
    CHECK(vector_distance(DistanceKind::cosine, x, x) == doctest::Approx(0.0));
    CHECK(vector_distance(DistanceKind::euclidean, x, y) ==
          doctest::Approx(std::sqrt(9.0 + 1.0 + 1.0 + 9.0)));
    CHECK(vector_distance(DistanceKind::manhattan, x, y) == doctest::Approx(8.0));
    CHECK(vector_distance(DistanceKind::chebyshev, x, y) == doctest::Approx(3.0));
    CHECK(vector_distance(DistanceKind::braycurtis, x, y) == doctest::Approx(8.0 / 20.0));
    CHECK(vector_distance(DistanceKind::canberra, zero, zero) == 0.0);
    // constant vectors have zero variance
    CHECK(vector_distance(DistanceKind::correlation, Eigen::VectorXd::Ones(4),
                          Eigen::VectorXd::Ones(4)) == 0.0);
    CHECK(vector_distance(DistanceKind::correlation, Eigen::VectorXd::Ones(4), x) == 1.0);
    CHECK_THROWS_AS(vector_distance(DistanceKind::euclidean, x, Eigen::VectorXd::Zero(3)),
                    Error);

    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd a(6), b(6);
        for (int i = 0; i < 6; ++i) {
            a[i] = rng.uniform(-2.0, 2.0);
            b[i] = rng.uniform(-2.0, 2.0);
        }
        for (auto kind : {DistanceKind::cosine, DistanceKind::euclidean,
                          DistanceKind::manhattan, DistanceKind::canberra,
                          DistanceKind::chebyshev, DistanceKind::braycurtis,
                          DistanceKind::correlation}) {
            const double d = vector_distance(kind, a, b);
            CHECK(std::isfinite(d));
            CHECK(d >= 0.0);
            CHECK(vector_distance(kind, b, a) == doctest::Approx(d)); // symmetry
        }
    }
}

TEST_CASE("dtw_full identity and degenerate shapes") {
    Rng rng(11);
    Eigen::MatrixXd a = random_matrix(rng, 3, 20, -1.0, 1.0);
    const DtwResult self = dtw_full(a, a, DistanceKind::euclidean);
    CHECK(self.total_cost == doctest::Approx(0.0));
    for (int k = 0; k < 20; ++k) CHECK(self.path[k] == IndexPair{k, k});

    Eigen::MatrixXd one = random_matrix(rng, 3, 1);
    Eigen::MatrixXd many = random_matrix(rng, 3, 7);
    const DtwResult strip = dtw_full(one, many, DistanceKind::euclidean);
    REQUIRE(strip.path.size() == 7);
    for (int k = 0; k < 7; ++k) CHECK(strip.path[k] == IndexPair{0, k});

    CHECK_THROWS_AS(dtw_full(Eigen::MatrixXd(3, 0), many, DistanceKind::euclidean), Error);
    CHECK_THROWS_AS(dtw_full(random_matrix(rng, 2, 4), many, DistanceKind::euclidean), Error);
}

TEST_CASE("dtw_full equals the brute-force oracle on scalar sequences") {
    Rng rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        Eigen::MatrixXd a = random_matrix(rng, 1, 6, 0.0, 5.0);
        Eigen::MatrixXd b = random_matrix(rng, 1, 5, 0.0, 5.0);
        Eigen::MatrixXd cost(6, 5);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 5; ++j) cost(i, j) = std::abs(a(0, i) - b(0, j));
        const DtwResult got = dtw_full(a, b, DistanceKind::euclidean);
        CHECK(got.total_cost == doctest::Approx(oracle::min_path_cost(cost)));
        CHECK(got.total_cost == doctest::Approx(path_cost_on(cost, got.path)));
        CHECK(warping_path_is_valid(got.path, 6, 5));
    }
}

TEST_CASE("dtw_on_matrix matches the oracle and rejects bad input") {
    const Eigen::MatrixXd single = Eigen::MatrixXd::Constant(1, 1, 4.25);
    const DtwResult tiny = dtw_on_matrix(single);
    CHECK(tiny.total_cost == 4.25);
    CHECK(tiny.path == WarpingPath{{0, 0}});

    Eigen::MatrixXd eye = Eigen::MatrixXd::Ones(3, 3);
    eye.diagonal().setZero();
    const DtwResult diag = dtw_on_matrix(eye);
    CHECK(diag.total_cost == 0.0);
    CHECK(diag.path == WarpingPath{{0, 0}, {1, 1}, {2, 2}});

    Rng rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const Eigen::MatrixXd cost = random_matrix(rng, 7, 7);
        const DtwResult got = dtw_on_matrix(cost);
        CHECK(got.total_cost == doctest::Approx(oracle::min_path_cost(cost)));
    }

    CHECK_THROWS_AS(dtw_on_matrix(Eigen::MatrixXd(0, 3)), Error);
    CHECK_THROWS_AS(dtw_on_matrix(Eigen::MatrixXd::Constant(2, 2, -1.0)), Error);
}

TEST_CASE("dtw cost is symmetric under input swap") {
    Rng rng(37);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXd a = random_matrix(rng, 2, 9, -1.0, 1.0);
        Eigen::MatrixXd b = random_matrix(rng, 2, 6, -1.0, 1.0);
        const double ab = dtw_full(a, b, DistanceKind::manhattan).total_cost;
        const double ba = dtw_full(b, a, DistanceKind::manhattan).total_cost;
        CHECK(ab == doctest::Approx(ba));
    }
}

TEST_CASE("fastdtw covers exact DTW when the radius spans the matrix") {
    Rng rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::MatrixXd a = random_matrix(rng, 4, 60, -1.0, 1.0);
        Eigen::MatrixXd b = random_matrix(rng, 4, 50, -1.0, 1.0);
        const double exact = dtw_full(a, b, DistanceKind::euclidean).total_cost;
        const double approx = fastdtw(a, b, DistanceKind::euclidean, 60).total_cost;
        CHECK(approx == doctest::Approx(exact));
    }
}

TEST_CASE("fastdtw identity, bounds and path validity") {
    Rng rng(43);
    Eigen::MatrixXd a = random_matrix(rng, 4, 150, -1.0, 1.0);
    const DtwResult self = fastdtw(a, a, DistanceKind::euclidean, 1);
    CHECK(self.total_cost == doctest::Approx(0.0));

    for (int trial = 0; trial < 25; ++trial) {
        Eigen::MatrixXd x = random_matrix(rng, 4, 80 + static_cast<int>(rng.uniform_int(0, 80)),
                                          -1.0, 1.0);
        Eigen::MatrixXd y = random_matrix(rng, 4, 80 + static_cast<int>(rng.uniform_int(0, 80)),
                                          -1.0, 1.0);
        const DtwResult approx = fastdtw(x, y, DistanceKind::euclidean, 10);
        const DtwResult exact = dtw_full(x, y, DistanceKind::euclidean);
        CHECK(warping_path_is_valid(approx.path, static_cast<int>(x.cols()),
                                    static_cast<int>(y.cols())));
        // the corridor optimum can never beat the global optimum
        CHECK(approx.total_cost >= exact.total_cost - 1e-9);
    }
}

TEST_CASE("fastdtw_on_matrix approximates dtw_on_matrix") {
    Rng rng(47);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::MatrixXd cost = random_matrix(rng, 120, 90);
        const DtwResult approx = fastdtw_on_matrix(cost, 12);
        const DtwResult exact = dtw_on_matrix(cost);
        CHECK(approx.total_cost >= exact.total_cost - 1e-9);
        CHECK(approx.total_cost == doctest::Approx(path_cost_on(cost, approx.path)));
        CHECK(warping_path_is_valid(approx.path, 120, 90));
    }
}

TEST_CASE("fastdtw corridor memory stays near-linear") {
    // 50k-frame self-alignment must not touch anything like the full matrix
    const int n = 50'000;
    Eigen::MatrixXd seq(1, n);
    for (int i = 0; i < n; ++i) seq(0, i) = std::sin(0.001 * i) + 0.1 * std::sin(0.07 * i);
    DtwStats stats;
    const DtwResult result = fastdtw(seq, seq, DistanceKind::euclidean, 10, &stats);
    CHECK(result.total_cost == doctest::Approx(0.0));
    CHECK(stats.levels > 8);
    const std::uint64_t full = static_cast<std::uint64_t>(n) * n;
    CHECK(stats.dp_cells < full / 100);
    CHECK(stats.dp_cells < static_cast<std::uint64_t>(2 * n) * 10 * 50);
}

TEST_CASE("path_to_time_map collapses runs to mean B times") {
    const TimeMap diag = path_to_time_map({{0, 0}, {1, 1}, {2, 2}}, 0.02, 0.02);
    REQUIRE(diag.anchors.size() == 3);
    CHECK(diag.anchors[1].time_a == doctest::Approx(0.02));
    CHECK(diag.anchors[1].time_b == doctest::Approx(0.02));

    const TimeMap merged = path_to_time_map({{0, 0}, {0, 1}, {1, 2}}, 1.0, 1.0);
    REQUIRE(merged.anchors.size() == 2);
    CHECK(merged.anchors[0].time_b == doctest::Approx(0.5));
    CHECK(merged.anchors[1].time_a == doctest::Approx(1.0));
    CHECK(merged.anchors[1].time_b == doctest::Approx(2.0));

    Rng rng(53);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXd a = random_matrix(rng, 2, 12, -1.0, 1.0);
        Eigen::MatrixXd b = random_matrix(rng, 2, 15, -1.0, 1.0);
        const DtwResult r = dtw_full(a, b, DistanceKind::euclidean);
        CHECK(time_map_is_valid(path_to_time_map(r.path, 0.02, 0.02)));
    }
}

TEST_CASE("engine fast paths agree with vector_distance for all kinds") {
    Rng rng(59);
    for (auto kind : {DistanceKind::cosine, DistanceKind::correlation, DistanceKind::canberra,
                      DistanceKind::braycurtis}) {
        for (int trial = 0; trial < 10; ++trial) {
            Eigen::MatrixXd a = random_matrix(rng, 3, 7, 0.0, 2.0);
            Eigen::MatrixXd b = random_matrix(rng, 3, 6, 0.0, 2.0);
            if (trial % 3 == 0) a.col(2).setZero(); // degenerate columns included
            Eigen::MatrixXd cost(7, 6);
            for (int i = 0; i < 7; ++i)
                for (int j = 0; j < 6; ++j)
                    cost(i, j) = vector_distance(kind, a.col(i), b.col(j));
            const double via_engine = dtw_full(a, b, kind).total_cost;
            const double via_matrix = dtw_on_matrix(cost).total_cost;
            CHECK(via_engine == doctest::Approx(via_matrix));
            CHECK(via_matrix == doctest::Approx(oracle::min_path_cost(cost)));
        }
    }
}
