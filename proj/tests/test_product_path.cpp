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

#include "locc/ensembles.hpp"
#include "locc/product_path.hpp"

using namespace locc;
using Catch::Matchers::WithinAbs;

namespace {

/// Exact product classification of grid points i/20 on the five-outcome
/// worked-example zonotope, ordered (psi11, psi21, psi22, psi31, psi32):
/// the operator is product iff one party's factor is diagonal with psi11
/// absent, or the diagonal-family condition holds.
bool exact_grid_product(const std::array<int, 5> &i) {
    const int g = i[0], a21 = i[1], b22 = i[2], a31 = i[3], b32 = i[4];
    if (g == 0 && b22 == 0 && b32 == 0) {
        return true;
    }
    if (g == 0 && a21 == 0 && a31 == 0) {
        return true;
    }
    return a21 == a31 && b22 == b32 && 3 * a31 * b32 == g * (2 * a31 + b32);
}

} // namespace

TEST_CASE("kkb_diagonal_family matches a direct minor oracle", "[product-path]") {
    const auto p = kkb_diagonal_family(0.7, 0.0, 0.0);
    CHECK(p.product);
    CHECK(proportional(p.op, kkb15_measurement()[0]));
    CHECK_FALSE(kkb_diagonal_family(9.0, 1.0, 0.5).product); // 9 vs 18
    CHECK_FALSE(kkb_diagonal_family(0.0, 1.0, 1.0).product);
    CHECK(kkb_diagonal_family(0.0, 0.0, 0.0).product);
    CHECK_THROWS(kkb_diagonal_family(-1.0, 0.0, 0.0));
    // on the curve: c11' = 18 c31 c32 / (c31 + 2 c32)
    const auto on = kkb_diagonal_family(18.0 * 0.3 * 0.2 / 0.7, 0.3, 0.2);
    CHECK(on.product);
    CHECK(nearest_product(on.op).residual <= 1e-12);
    for (int t = 0; t < 200; ++t) {
        Rng rng = task_rng(51, static_cast<std::uint64_t>(t));
        const double a = uniform01(rng), b = uniform01(rng), c = uniform01(rng);
        const auto x = kkb_diagonal_family(a, b, c);
        const Matrix &m = x.op.matrix();
        // diagonal (d00, d01, d10, d11) is product iff d00 d11 = d01 d10
        const double minor = (m(0, 0) * m(3, 3) - m(1, 1) * m(2, 2)).real();
        const double scale = std::abs((m(0, 0) * m(3, 3)).real()) + std::abs((m(1, 1) * m(2, 2)).real());
        CHECK(x.product == (std::abs(minor) <= 1e-12 * scale));
    }
}

TEST_CASE("generator segments of product measurements are product", "[product-path]") {
    const Povm m = kkb15_measurement();
    const Zonotope z(m);
    for (std::size_t j = 0; j < m.size(); ++j) {
        for (int k = 1; k <= 10; ++k) {
            HermitianOperator x = m[j];
            x *= 0.1 * k;
            CHECK(nearest_product(x).residual <= 1e-10);
            CHECK(contains(z, x).feasible);
        }
    }
}

TEST_CASE("sampler on reference zonotopes", "[product-path]") {
    SamplerOptions so;
    so.ap_iterations = 50;
    SECTION("Bell: every product point is a multiple of the identity") {
        const Zonotope z(bell_measurement());
        const auto pts = sample_products_in_zonotope(z, 2000, 5, so);
        REQUIRE(pts.size() > 100);
        for (const auto &p : pts) {
            const double q = p.op.trace() / 4.0;
            CHECK(trace_norm(Matrix(p.op.matrix() - q * Matrix::Identity(4, 4))) <= 1e-6);
        }
    }
    SECTION("worked example: multiples of every generator are found") {
        const Povm m = kkb15_measurement();
        const Zonotope z(m);
        const auto pts = sample_products_in_zonotope(z, 2000, 6, so);
        for (std::size_t j = 0; j < m.size(); ++j) {
            bool seen = false;
            for (const auto &p : pts) {
                seen = seen || (p.op.trace() > 1e-6 && segment_distance(p.op, m[j]).relative <= 1e-9);
            }
            CHECK(seen);
        }
    }
    SECTION("four-outcome measurement: every piecewise-local branch is visited") {
        const Povm m = footnote_measurement();
        const Zonotope z(m);
        const auto s = m.space();
        const auto pts = sample_products_in_zonotope(z, 4000, 7, so);
        const Matrix p0 = m[0].matrix() + m[1].matrix();
        const Matrix p1 = m[2].matrix() + m[3].matrix();
        // x = alpha a + beta b with alpha, beta > 0 (strictly inside a branch segment)
        auto inside = [&](const Matrix &x, const Matrix &a, const Matrix &b) {
            RealMatrix basis(16, 2);
            basis.col(0) = hermitian_coordinates(HermitianOperator(s, a));
            basis.col(1) = hermitian_coordinates(HermitianOperator(s, b));
            const RealVector v = hermitian_coordinates(HermitianOperator(s, x));
            const RealVector c = basis.colPivHouseholderQr().solve(v);
            const double t = x.trace().real();
            return (basis * c - v).norm() <= 1e-6 * t && c.minCoeff() > 1e-6 * t;
        };
        for (std::size_t l = 0; l < 4; ++l) {
            const Matrix &parent = l < 2 ? p0 : p1;
            std::size_t hits = 0;
            for (const auto &p : pts) {
                hits += inside(p.op.matrix(), parent, m[l].matrix()) ? 1 : 0;
            }
            CHECK(hits > 0);
        }
    }
    SECTION("accepted points scale down within the product tolerance") {
        const Zonotope z(kkb15_measurement());
        const auto pts = sample_products_in_zonotope(z, 400, 8, so);
        REQUIRE_FALSE(pts.empty());
        for (const auto &p : pts) {
            CHECK(p.product_residual <= so.product_tol);
            for (double t : {0.25, 0.5, 1.0}) {
                HermitianOperator x = p.op;
                x *= t;
                CHECK(nearest_product(x).residual <= t * so.product_tol + 1e-15);
                CHECK(contains(z, x).feasible);
            }
        }
    }
    SECTION("results do not depend on the thread count") {
        const Zonotope z(kkb15_measurement());
        const auto a = sample_products_in_zonotope(z, 300, 9, so);
        SamplerOptions so3 = so;
        so3.threads = 3;
        const auto b = sample_products_in_zonotope(z, 300, 9, so3);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].op.matrix() == b[i].op.matrix());
        }
    }
}

TEST_CASE("path search finds the four piecewise-local paths", "[product-path]") {
    const Povm m = footnote_measurement();
    const Zonotope z(m);
    for (std::size_t j = 0; j < 4; ++j) {
        const auto r = find_monotonic_product_path(z, j, {}, m.label(j));
        REQUIRE(r.found);
        CHECK(r.verification.passed());
        VerifyOptions o;
        o.step_cap = 0.08 + 1e-12;
        o.target = m[j];
        CHECK(verify_path(r.path, z, o).passed());
        CHECK(r.path.endpoint_scale > 0.0);
        CHECK(r.path.endpoint_scale <= 1.0 + 1e-9);
        const auto &pts = r.path.points;
        // non-acting parties keep their factor across every step
        std::size_t switches = 0;
        for (std::size_t i = 1; i < pts.size(); ++i) {
            REQUIRE(pts[i].has_acting_party);
            const std::size_t other = 1 - pts[i].acting_party;
            CHECK((pts[i].factors[other] - pts[i - 1].factors[other]).norm() <= 1e-6);
            if (i > 1 && pts[i].acting_party != pts[i - 1].acting_party) {
                ++switches;
            }
        }
        // A first, then B: the route passes through [a] (x) I
        CHECK(pts[1].acting_party == 0);
        CHECK(switches == 1);
        bool through_parent = false;
        const Matrix parent = j < 2 ? Matrix(m[0].matrix() + m[1].matrix())
                                    : Matrix(m[2].matrix() + m[3].matrix());
        for (const auto &p : pts) {
            through_parent = through_parent || (p.op.matrix() - parent).norm() <= 1e-9;
        }
        CHECK(through_parent);
    }
}

TEST_CASE("path search reports obstructions", "[product-path]") {
    SECTION("Bell measurement stalls at the identity") {
        const Povm m = bell_measurement();
        const Zonotope z(m);
        for (std::size_t j = 0; j < 4; ++j) {
            const auto r = find_monotonic_product_path(z, j);
            CHECK_FALSE(r.found);
            REQUIRE(r.obstruction.lowest_s_per_restart.size() == 4);
            for (std::size_t k = 0; k < 4; ++k) {
                CHECK(r.obstruction.lowest_s_per_restart[k] > 2.0);
                CHECK(r.obstruction.best_relative_distance_per_restart[k] >= 0.1);
            }
            CHECK(r.obstruction.heuristic);
        }
    }
    SECTION("worked example, psi11") {
        const Povm m = kkb15_measurement();
        const Zonotope z(m);
        PathSearchOptions o;
        o.restarts = 2;
        const auto r = find_monotonic_product_path(z, m[0], o, "psi11");
        CHECK_FALSE(r.found);
        CHECK(r.obstruction.target_label == "psi11");
        for (double d : r.obstruction.best_relative_distance_per_restart) {
            CHECK(d > 0.05);
        }
    }
    SECTION("targets must be generators") {
        const Zonotope z(footnote_measurement());
        CHECK_THROWS_AS(find_monotonic_product_path(z, HermitianOperator::identity(z.space())),
                        PathTargetError);
        CHECK_THROWS_AS(find_monotonic_product_path(z, std::size_t{9}), PathTargetError);
    }
}

TEST_CASE("isolation probe", "[product-path]") {
    SECTION("psi11 is isolated in the worked example") {
        const Povm m = kkb15_measurement();
        const Zonotope z(m);
        IsolationOptions o;
        o.samples = 4000;
        o.seed = 7;
        const auto r = isolation_probe(z, 0, o, "psi11");
        CHECK(r.hit_count > 0);
        CHECK(r.all_hits_on_segment);
        CHECK(r.off_segment_hits == 0);
        CHECK(r.max_on_segment_distance <= 1e-6);
    }
    SECTION("a piecewise-local route enters the ball of [0](x)[0]") {
        const Povm m = footnote_measurement();
        const Zonotope z(m);
        IsolationOptions o;
        o.samples = 4000;
        o.seed = 3;
        const auto r = isolation_probe(z, 0, o, "00");
        CHECK_FALSE(r.all_hits_on_segment);
        CHECK(r.off_segment_hits > 0);
        // every reported hit re-verifies independently
        for (const auto &h : r.hits) {
            CHECK(contains(z, h.op, o.membership_tol).feasible);
            CHECK(nearest_product(h.op).residual <= o.product_tol);
            CHECK(segment_distance(h.op, m[0]).relative <= o.epsilon + 1e-9);
        }
        // direct construction: [0] (x) [(1-x) I + x [0]] lies on the branch, is
        // product, in Z, and off the segment for x < 1
        const double x = 0.99;
        Matrix a = Matrix::Zero(2, 2);
        a(0, 0) = 1.0;
        Matrix b = Matrix::Identity(2, 2) * (1.0 - x);
        b(0, 0) += x;
        const HermitianOperator y = tensor(m.space(), {a, b});
        CHECK(contains(z, y).feasible);
        CHECK(segment_distance(y, m[0]).relative <= 0.05);
        CHECK(segment_distance(y, m[0]).distance > 1e-6);
    }
    SECTION("a zero radius only admits exact multiples") {
        const Povm m = footnote_measurement();
        const Zonotope z(m);
        IsolationOptions o;
        o.samples = 1000;
        o.epsilon = 0.0;
        const auto r = isolation_probe(z, 0, o);
        CHECK(r.all_hits_on_segment);
        for (const auto &h : r.hits) {
            CHECK(h.on_segment);
        }
    }
}

TEST_CASE("grid screen agrees with the exact product classification", "[product-path]") {
    // step 0.1 sub-grid of the 0.05 grid used in the full acceptance run
    const Zonotope z(kkb15_measurement());
    const auto t = detail::realigned_generators(z);
    std::size_t disagreements = 0;
    std::size_t products = 0;
    std::array<int, 5> i{};
    RealVector c(5);
    for (i[0] = 0; i[0] <= 20; i[0] += 2) {
        for (i[1] = 0; i[1] <= 20; i[1] += 2) {
            for (i[2] = 0; i[2] <= 20; i[2] += 2) {
                for (i[3] = 0; i[3] <= 20; i[3] += 2) {
                    for (i[4] = 0; i[4] <= 20; i[4] += 2) {
                        for (int k = 0; k < 5; ++k) {
                            c(k) = i[static_cast<std::size_t>(k)] / 20.0;
                        }
                        bool numeric = detail::rank_one_tail(t, c) <= 1e-6;
                        if (numeric) {
                            numeric = nearest_product(z.point(c)).residual <= 1e-6;
                        }
                        const bool exact = exact_grid_product(i);
                        products += exact ? 1 : 0;
                        disagreements += numeric != exact ? 1 : 0;
                    }
                }
            }
        }
    }
    CHECK(products > 11);
    CHECK(disagreements == 0);
}
