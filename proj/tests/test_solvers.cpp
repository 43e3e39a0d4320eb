// Copyright 2026 The locc-geometry Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "locc/random.hpp"
#include "locc/solvers/bvls.hpp"
#include "locc/solvers/simplex.hpp"

using namespace locc;
using namespace locc::solvers;
using Catch::Matchers::WithinAbs;

namespace {

Eigen::MatrixXd random_real(Rng &rng, Eigen::Index r, Eigen::Index c) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index j = 0; j < c; ++j) {
        for (Eigen::Index i = 0; i < r; ++i) {
            m(i, j) = n(rng);
        }
    }
    return m;
}

/// Box-constrained least squares by projected gradient, used as an oracle.
Eigen::VectorXd projected_gradient(const Eigen::MatrixXd &a, const Eigen::VectorXd &b,
                                   const Eigen::VectorXd &lo, const Eigen::VectorXd &hi) {
    const double step = 1.0 / (a.transpose() * a).eigenvalues().real().maxCoeff();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(a.cols()).cwiseMax(lo).cwiseMin(hi);
    for (int k = 0; k < 200000; ++k) {
        const Eigen::VectorXd g = a.transpose() * (a * x - b);
        const Eigen::VectorXd nx = (x - step * g).cwiseMax(lo).cwiseMin(hi);
        if ((nx - x).norm() < 1e-15) {
            break;
        }
        x = nx;
    }
    return x;
}

} // namespace

TEST_CASE("bvls matches a projected-gradient oracle", "[solvers]") {
    for (int t = 0; t < 200; ++t) {
        Rng rng = task_rng(21, static_cast<std::uint64_t>(t));
        const Eigen::Index m = 3 + t % 7;
        const Eigen::Index n = 2 + t % 5;
        const Eigen::MatrixXd a = random_real(rng, m, n);
        const Eigen::VectorXd b = random_real(rng, m, 1).col(0) * 3.0;
        const Eigen::VectorXd lo = Eigen::VectorXd::Zero(n);
        const Eigen::VectorXd hi = Eigen::VectorXd::Ones(n);
        const auto res = bvls(a, b, lo, hi);
        const Eigen::VectorXd ref = projected_gradient(a, b, lo, hi);
        CHECK(res.converged);
        CHECK(res.residual <= (a * ref - b).norm() + 1e-9);
        CHECK((res.x.array() >= 0.0).all());
        CHECK((res.x.array() <= 1.0).all());
    }
}

TEST_CASE("bvls handles rank deficiency and warm starts", "[solvers]") {
    Rng rng = task_rng(22, 0);
    Eigen::MatrixXd a = random_real(rng, 6, 8);
    a.col(7) = a.col(0); // duplicate column
    const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(8, 0.3);
    const Eigen::VectorXd b = a * x0;
    const Eigen::VectorXd lo = Eigen::VectorXd::Zero(8);
    const Eigen::VectorXd hi = Eigen::VectorXd::Ones(8);
    const auto cold = bvls(a, b, lo, hi);
    CHECK(cold.residual <= 1e-10);
    const auto warm = bvls(a, b, lo, hi, &x0);
    CHECK(warm.residual <= 1e-12);
    CHECK(warm.iterations == 0);
}

TEST_CASE("bvls reaches exact vertices of ill-conditioned dependent systems", "[solvers]") {
    // 16 columns of rank 12 with singular values spanning five decades; every
    // 0/1 combination is attainable, so the optimum residual is zero.
    Rng rng = task_rng(91, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXd u = random_real(rng, 16, 12).householderQr().householderQ() *
                                  Eigen::MatrixXd::Identity(16, 12);
        const Eigen::MatrixXd v = random_real(rng, 16, 12).householderQr().householderQ() *
                                  Eigen::MatrixXd::Identity(16, 12);
        Eigen::VectorXd sv(12);
        for (Eigen::Index k = 0; k < 12; ++k) {
            sv(k) = std::pow(10.0, -5.0 * static_cast<double>(k) / 11.0);
        }
        const Eigen::MatrixXd a = u * sv.asDiagonal() * v.transpose();
        std::uniform_int_distribution<int> bit(0, 1);
        Eigen::VectorXd c(16);
        for (Eigen::Index k = 0; k < 16; ++k) {
            c(k) = bit(rng);
        }
        const auto r = bvls(a, a * c, Eigen::VectorXd::Zero(16), Eigen::VectorXd::Ones(16));
        CHECK(r.converged);
        CHECK(r.residual <= 1e-13);
    }
}

TEST_CASE("bvls reports infeasible targets through the residual", "[solvers]") {
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3);
    const Eigen::VectorXd b = Eigen::VectorXd::Constant(3, 2.0);
    const auto res = bvls(a, b, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Ones(3));
    CHECK(res.x.isApprox(Eigen::VectorXd::Ones(3)));
    CHECK_THAT(res.residual, WithinAbs(std::sqrt(3.0), 1e-12));
    CHECK_THROWS(bvls(a, b, Eigen::VectorXd::Ones(3), Eigen::VectorXd::Zero(3)));
}

TEST_CASE("simplex solves small standard-form programs", "[solvers]") {
    SECTION("bounded optimum") {
        // min -x1 - 2 x2  s.t. x1 + x2 + s1 = 4, x2 + s2 = 3
        Eigen::MatrixXd a(2, 4);
        a << 1, 1, 1, 0, 0, 1, 0, 1;
        Eigen::VectorXd b(2);
        b << 4, 3;
        Eigen::VectorXd c(4);
        c << -1, -2, 0, 0;
        const auto r = solve_lp(a, b, c);
        REQUIRE(r.status == LpStatus::Optimal);
        CHECK_THAT(r.objective, WithinAbs(-7.0, 1e-12));
        CHECK_THAT(r.x(0), WithinAbs(1.0, 1e-12));
        CHECK_THAT(r.x(1), WithinAbs(3.0, 1e-12));
    }
    SECTION("infeasible") {
        Eigen::MatrixXd a(2, 2);
        a << 1, 1, 1, 1;
        Eigen::VectorXd b(2);
        b << 1, 2;
        CHECK(solve_lp(a, b, Eigen::VectorXd::Zero(2)).status == LpStatus::Infeasible);
    }
    SECTION("unbounded") {
        Eigen::MatrixXd a(1, 2);
        a << 1, -1;
        Eigen::VectorXd b(1);
        b << 1;
        Eigen::VectorXd c(2);
        c << -1, 0;
        CHECK(solve_lp(a, b, c).status == LpStatus::Unbounded);
    }
    SECTION("redundant rows and negative right-hand sides") {
        Eigen::MatrixXd a(3, 3);
        a << 1, 1, 1, 2, 2, 2, -1, 0, 1;
        Eigen::VectorXd b(3);
        b << 1, 2, -0.5;
        Eigen::VectorXd c(3);
        c << 0, 1, 0;
        const auto r = solve_lp(a, b, c);
        REQUIRE(r.status == LpStatus::Optimal);
        CHECK((a * r.x - b).norm() <= 1e-12);
        CHECK_THAT(r.objective, WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("simplex agrees with vertex enumeration", "[solvers]") {
    // Oracle: for A x = b, x >= 0 with 2 rows, every vertex has at most two
    // nonzeros; enumerate all column pairs.
    for (int t = 0; t < 200; ++t) {
        Rng rng = task_rng(23, static_cast<std::uint64_t>(t));
        const Eigen::Index n = 3 + t % 4;
        Eigen::MatrixXd a = random_real(rng, 2, n).cwiseAbs();
        const Eigen::VectorXd x0 = random_real(rng, n, 1).col(0).cwiseAbs();
        const Eigen::VectorXd b = a * x0;
        const Eigen::VectorXd c = random_real(rng, n, 1).col(0);
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = i + 1; j < n; ++j) {
                Eigen::Matrix2d bm;
                bm << a(0, i), a(0, j), a(1, i), a(1, j);
                if (std::abs(bm.determinant()) < 1e-12) {
                    continue;
                }
                const Eigen::Vector2d y = bm.inverse() * b;
                if (y.minCoeff() >= -1e-12) {
                    best = std::min(best, c(i) * y(0) + c(j) * y(1));
                }
            }
        }
        const auto r = solve_lp(a, b, c);
        // all columns positive => feasible region bounded
        REQUIRE(r.status == LpStatus::Optimal);
        CHECK_THAT(r.objective, WithinAbs(best, 1e-9));
    }
}
