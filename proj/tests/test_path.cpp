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
#include "locc/path.hpp"

using namespace locc;
using Catch::Matchers::WithinAbs;

namespace {

Matrix diag2(double a, double b) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

PathPoint make_point(const PartitionedSpace &s, const Matrix &a, const Matrix &b) {
    const HermitianOperator op = tensor(s, {a, b});
    return {op, op.trace(), {}, 0.0, 0.0, {a, b}, 0, false};
}

/// I -> [0] (x) I -> [0] (x) [0] sampled uniformly in s, then a constant tail.
OperatorPath footnote_branch(int per_segment, int tail) {
    const PartitionedSpace s({2, 2});
    OperatorPath path;
    for (int i = 0; i < per_segment; ++i) {
        const double x = static_cast<double>(i) / per_segment;
        path.points.push_back(make_point(s, diag2(1.0, 1.0 - x), Matrix::Identity(2, 2)));
    }
    for (int i = 0; i <= per_segment; ++i) {
        const double x = static_cast<double>(i) / per_segment;
        path.points.push_back(make_point(s, diag2(1.0, 0.0), diag2(1.0, 1.0 - x)));
    }
    for (int i = 1; i <= tail; ++i) {
        PathPoint p = path.points.back();
        p.s = 1.0 - static_cast<double>(i) / tail;
        path.points.push_back(p);
    }
    path.endpoint_scale = 1.0;
    return path;
}

} // namespace

TEST_CASE("segment_distance finds the nearest multiple", "[path]") {
    const Povm f = footnote_measurement();
    const HermitianOperator &e = f[0];
    HermitianOperator x = e;
    x *= 0.4;
    auto d = segment_distance(x, e);
    CHECK_THAT(d.q, WithinAbs(0.4, 1e-9));
    CHECK(d.distance <= 1e-9);
    CHECK(d.relative <= 1e-8);
    // I is at relative distance 3/4 from any rank-one ray on two qubits
    d = segment_distance(HermitianOperator::identity(f.space()), e);
    CHECK_THAT(d.relative, WithinAbs(0.75, 1e-9));
    CHECK_THAT(d.distance, WithinAbs(3.0, 1e-9));
    // the zero operator has no meaningful relative distance
    d = segment_distance(HermitianOperator::zero(f.space()), e);
    CHECK(d.distance == 0.0);
    CHECK(std::isinf(d.relative));
}

TEST_CASE("verify_path accepts a piecewise-local branch with a constant tail", "[path]") {
    const Zonotope z(footnote_measurement());
    const OperatorPath path = footnote_branch(32, 8);
    VerifyOptions o;
    o.target = footnote_measurement()[0];
    o.step_cap = 0.1;
    const auto r = verify_path(path, z, o);
    CHECK(r.passed());
    CHECK(r.max_lipschitz_gap <= 1e-12);
    CHECK(r.max_product_residual <= 1e-12);
    CHECK(r.max_membership_residual <= 1e-8);
    CHECK(r.endpoint_checked);
    CHECK_THAT(r.endpoint_scale, WithinAbs(1.0, 1e-8));
}

TEST_CASE("verify_path flags injected defects at their index", "[path]") {
    const Zonotope z(footnote_measurement());
    const PartitionedSpace s({2, 2});
    SECTION("a non-product interior point") {
        OperatorPath path = footnote_branch(16, 0);
        const std::size_t k = 20;
        const Ensemble bell = bell_states();
        // same trace, with an entangling |00><11| coherence added
        Matrix m = path.points[k].op.matrix();
        m += 0.05 * (bell.states()[0].matrix() - bell.states()[1].matrix());
        path.points[k].op = HermitianOperator(s, m);
        path.points[k].factors.clear();
        const auto r = verify_path(path, z);
        REQUIRE(r.product_failures.size() == 1);
        CHECK(r.product_failures[0] == k);
        CHECK_FALSE(r.passed());
    }
    SECTION("a point outside the zonotope") {
        OperatorPath path = footnote_branch(16, 0);
        path.points[3].op *= 1.5;
        const auto r = verify_path(path, z);
        REQUIRE_FALSE(r.membership_failures.empty());
        CHECK(r.membership_failures[0] == 3);
    }
    SECTION("a trace increase and a long step") {
        OperatorPath path = footnote_branch(16, 0);
        std::swap(path.points[5], path.points[6]);
        VerifyOptions o;
        o.step_cap = 0.07;
        const auto r = verify_path(path, z, o);
        CHECK_FALSE(r.monotone_failures.empty());
        OperatorPath sparse;
        sparse.points = {path.points.front(), path.points.back()};
        const auto r2 = verify_path(sparse, z, o);
        CHECK(r2.step_failures == std::vector<std::size_t>{0});
    }
    SECTION("a non-nested step breaks the Lipschitz equality") {
        OperatorPath path;
        path.points.push_back(make_point(s, diag2(1.0, 0.0), Matrix::Identity(2, 2)));
        path.points.push_back(make_point(s, diag2(0.0, 0.9), Matrix::Identity(2, 2)));
        const auto r = verify_path(path, z);
        CHECK(r.lipschitz_failures == std::vector<std::size_t>{0});
    }
    SECTION("wrong endpoint and relative jumps") {
        const OperatorPath path = footnote_branch(16, 0);
        VerifyOptions o;
        o.target = footnote_measurement()[3];
        CHECK_FALSE(verify_path(path, z, o).endpoint_ok);
        o.target = footnote_measurement()[0];
        o.max_relative_jump = 1e-3;
        CHECK_FALSE(verify_path(path, z, o).relative_jump_failures.empty());
    }
}

TEST_CASE("certificates are rechecked when they do not hold", "[path]") {
    const Zonotope z(footnote_measurement());
    OperatorPath path = footnote_branch(8, 0);
    // corrupt stored coefficients and factors; verification falls back to solvers
    for (auto &p : path.points) {
        p.coefficients.assign(4, 0.0);
        for (auto &f : p.factors) {
            f *= 2.0;
        }
    }
    const auto r = verify_path(path, z);
    CHECK(r.passed());
}
