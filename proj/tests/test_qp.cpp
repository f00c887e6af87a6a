#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>
#include <random>

#include "bifrac/qp.hpp"
#include "support/qp_oracle.hpp"

using namespace bifrac;
constexpr double inf = std::numeric_limits<double>::infinity();

namespace {

BoxQP dense_to_qp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& lo,
                  const Eigen::VectorXd& hi) {
    BoxQP qp;
    qp.A = A.sparseView();
    qp.b = b;
    qp.lo = lo;
    qp.hi = hi;
    return qp;
}

Eigen::MatrixXd random_spd(int n, std::mt19937& rng, double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = gauss(rng);
    return scale * (M.transpose() * M + 0.1 * Eigen::MatrixXd::Identity(n, n));
}

}  // namespace

TEST_CASE("clipped separable minimizer") {
    const auto qp = dense_to_qp(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(-1.0, -1.0),
                                Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(0.5, 0.5));
    const auto sol = solve_box_qp(qp, Eigen::Vector2d(0.0, 0.0));
    CHECK(sol.converged);
    CHECK(sol.x[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sol.x[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sol.active_set_size == 2);
}

TEST_CASE("interior minimizer") {
    const auto qp = dense_to_qp(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(-1.0, -1.0),
                                Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(2.0, 2.0));
    const auto sol = solve_box_qp(qp, Eigen::Vector2d(0.0, 0.0));
    CHECK(sol.converged);
    CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(sol.x[1] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(sol.objective == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("unbounded variables reach the unconstrained minimizer") {
    std::mt19937 rng(11);
    const Eigen::MatrixXd A = random_spd(4, rng);
    Eigen::VectorXd b(4);
    b << 1.0, -2.0, 0.5, 3.0;
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(4, -inf);
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(4, inf);
    const auto sol = solve_box_qp(dense_to_qp(A, b, lo, hi), Eigen::VectorXd::Zero(4));
    const Eigen::VectorXd expect = A.ldlt().solve(-b);
    CHECK(sol.converged);
    CHECK((sol.x - expect).norm() < 1e-8 * expect.norm());
}

TEST_CASE("random 5x5 SPD matches the active-set enumeration oracle") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const Eigen::MatrixXd A = random_spd(5, rng);
    Eigen::VectorXd b(5);
    for (int i = 0; i < 5; ++i) b[i] = unif(rng);
    const Eigen::VectorXd lo = Eigen::VectorXd::Zero(5);
    const Eigen::VectorXd hi = Eigen::VectorXd::Ones(5);
    const auto oracle = testutil::brute_force_qp(A, b, lo, hi);
    REQUIRE(oracle.found);
    const auto sol = solve_box_qp(dense_to_qp(A, b, lo, hi), 0.5 * Eigen::VectorXd::Ones(5));
    CHECK(sol.converged);
    CHECK((sol.x - oracle.x).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("100 random box QPs of dimension <= 6 match the oracle to 1e-8") {
    std::mt19937 rng(20240902);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_int_distribution<int> dim(2, 6);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = dim(rng);
        const Eigen::MatrixXd A = random_spd(n, rng);
        Eigen::VectorXd b(n), lo(n), hi(n), x0(n);
        for (int i = 0; i < n; ++i) {
            b[i] = 2.0 * unif(rng);
            lo[i] = -0.5 + 0.3 * unif(rng);
            hi[i] = 0.5 + 0.3 * unif(rng);
            x0[i] = 0.5 * (lo[i] + hi[i]);
        }
        if (trial % 5 == 0) lo[0] = -inf;  // mix in unbounded components
        if (trial % 7 == 0) hi[n - 1] = inf;
        const auto oracle = testutil::brute_force_qp(A, b, lo, hi);
        REQUIRE(oracle.found);
        const auto sol = solve_box_qp(dense_to_qp(A, b, lo, hi), x0);
        CAPTURE(trial);
        REQUIRE(sol.converged);
        REQUIRE((sol.x - oracle.x).lpNorm<Eigen::Infinity>() < 1e-8);
        // feasibility is exact
        for (int i = 0; i < n; ++i) {
            REQUIRE(sol.x[i] >= lo[i]);
            REQUIRE(sol.x[i] <= hi[i]);
        }
    }
}

TEST_CASE("objective is monotone across iterations") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const int n = 12;
    const Eigen::MatrixXd A = random_spd(n, rng);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) b[i] = unif(rng);
    const Eigen::VectorXd lo = Eigen::VectorXd::Zero(n);
    const Eigen::VectorXd hi = Eigen::VectorXd::Ones(n);
    const auto qp = dense_to_qp(A, b, lo, hi);
    const Eigen::VectorXd x0 = 0.5 * Eigen::VectorXd::Ones(n);

    double prev = qp.objective(x0);
    for (int k = 1; k <= 60; ++k) {
        QPOptions opt;
        opt.max_iter = k;
        opt.tol_rel = 0.0;  // run the full budget
        const auto sol = solve_box_qp(qp, x0, opt);
        CHECK(sol.objective <= prev + 1e-14 * std::abs(prev) + 1e-16);
        prev = std::min(prev, sol.objective);
    }
}

TEST_CASE("complementarity at convergence") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const int n = 8;
    const Eigen::MatrixXd A = random_spd(n, rng);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) b[i] = unif(rng);
    const auto qp = dense_to_qp(A, b, Eigen::VectorXd::Zero(n), Eigen::VectorXd::Ones(n));
    QPOptions opt;
    opt.tol_rel = 1e-10;
    const auto sol = solve_box_qp(qp, 0.5 * Eigen::VectorXd::Ones(n), opt);
    REQUIRE(sol.converged);
    const Eigen::VectorXd g = qp.A * sol.x + qp.b;
    const double tol = std::max(1e-10 * g.norm(), 1e-12);
    for (int i = 0; i < n; ++i) {
        const bool at_bound = (sol.x[i] <= 0.0) || (sol.x[i] >= 1.0);
        if (!at_bound) CHECK(std::abs(g[i]) <= tol * 10);
    }
}

TEST_CASE("infeasible start is rejected") {
    const auto qp = dense_to_qp(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(0.0, 0.0),
                                Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 1.0));
    CHECK_THROWS_AS(solve_box_qp(qp, Eigen::Vector2d(2.0, 0.0)), SolveError);
}

TEST_CASE("exhausted budget returns a flagged iterate") {
    std::mt19937 rng(3);
    const int n = 30;
    const Eigen::MatrixXd A = random_spd(n, rng);
    Eigen::VectorXd b = Eigen::VectorXd::Ones(n);
    const auto qp = dense_to_qp(A, b, Eigen::VectorXd::Constant(n, -5.0),
                                Eigen::VectorXd::Constant(n, 5.0));
    QPOptions opt;
    opt.max_iter = 2;
    opt.tol_rel = 1e-14;
    const auto sol = solve_box_qp(qp, Eigen::VectorXd::Zero(n), opt);
    CHECK_FALSE(sol.converged);
    CHECK(sol.iterations == 2);
}

TEST_CASE("indefinite quadratic form is detected") {
    Eigen::MatrixXd A(2, 2);
    A << 1.0, 0.0, 0.0, -4.0;
    const auto qp = dense_to_qp(A, Eigen::Vector2d(-1.0, -0.1), Eigen::Vector2d(-1.0, -1.0),
                                Eigen::Vector2d(1.0, 1.0));
    CHECK_THROWS_AS(solve_box_qp(qp, Eigen::Vector2d(0.0, 0.0)), SolveError);
}

// coupled rows with the Mosco structure: aux >= 0 with aux + c'y >= d
namespace {

BoxQP coupled_instance(std::mt19937& rng, int ny, int m) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const int n = ny + m;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    A.topLeftCorner(ny, ny) = random_spd(ny, rng);
    for (int r = 0; r < m; ++r) A(ny + r, ny + r) = 0.5 + 0.5 * std::abs(unif(rng));
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < ny; ++j) b[j] = unif(rng);
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(n, -inf);
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(n, inf);
    for (int r = 0; r < m; ++r) {
        lo[ny + r] = 0.0;
        hi[ny + r] = inf;
    }
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(m, n);
    Eigen::VectorXd d(m);
    for (int r = 0; r < m; ++r) {
        C(r, ny + r) = 1.0;
        for (int j = 0; j < ny; ++j) C(r, j) = unif(rng);
        d[r] = unif(rng);
    }
    BoxQP qp = dense_to_qp(A, b, lo, hi);
    qp.C = C.sparseView();
    qp.d = d;
    return qp;
}

}  // namespace

TEST_CASE("coupled rows: exact reduction matches the oracle") {
    std::mt19937 rng(31415);
    for (int trial = 0; trial < 60; ++trial) {
        const int ny = 2 + (trial % 3);
        const int m = 1 + (trial % 2);
        const auto qp = coupled_instance(rng, ny, m);
        Eigen::VectorXd x0 = Eigen::VectorXd::Zero(qp.size());
        const auto sol = solve_box_qp(qp, x0);
        const auto oracle = testutil::brute_force_qp(Eigen::MatrixXd(qp.A), qp.b, qp.lo, qp.hi,
                                                     Eigen::MatrixXd(qp.C), qp.d);
        CAPTURE(trial);
        REQUIRE(oracle.found);
        REQUIRE(sol.converged);
        REQUIRE((sol.x - oracle.x).lpNorm<Eigen::Infinity>() < 1e-7);
        // rows hold exactly at the solution
        const Eigen::VectorXd slack = qp.C * sol.x - qp.d;
        REQUIRE(slack.minCoeff() > -1e-10);
    }
}

TEST_CASE("coupled rows: penalty fallback stays close to the oracle") {
    std::mt19937 rng(2718);
    const auto qp = coupled_instance(rng, 3, 2);
    QPOptions opt;
    opt.force_penalty_rows = true;
    const auto sol = solve_box_qp(qp, Eigen::VectorXd::Zero(qp.size()), opt);
    const auto oracle = testutil::brute_force_qp(Eigen::MatrixXd(qp.A), qp.b, qp.lo, qp.hi,
                                                 Eigen::MatrixXd(qp.C), qp.d);
    REQUIRE(oracle.found);
    CHECK((sol.x - oracle.x).lpNorm<Eigen::Infinity>() < 1e-3);
    const Eigen::VectorXd slack = qp.C * sol.x - qp.d;
    CHECK(slack.minCoeff() > -1e-3);
}
