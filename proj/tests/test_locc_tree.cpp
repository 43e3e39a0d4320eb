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
#include "locc/locc_tree.hpp"
#include "locc/product.hpp"

using namespace locc;
using Catch::Matchers::WithinAbs;

namespace {

Matrix ket_proj(double a, double b) {
    Vector v(2);
    v << a, b;
    v /= v.norm();
    return v * v.adjoint();
}

/// A measures {[0], [1]}; B then measures {[0], [1]} after 0 and {[+], [-]} after 1.
LoccTree footnote_tree() {
    LoccTree t(PartitionedSpace({2, 2}));
    const auto a = t.apply_local_measurement(0, 0, {ket_proj(1, 0), ket_proj(0, 1)});
    t.apply_local_measurement(a[0], 1, {ket_proj(1, 0), ket_proj(0, 1)});
    t.apply_local_measurement(a[1], 1, {ket_proj(1, 1), ket_proj(1, -1)});
    return t;
}

Matrix normalized(const Matrix &m) { return m / m.norm(); }

} // namespace

TEST_CASE("local measurements split a node into children summing to it", "[locc]") {
    LoccTree t(PartitionedSpace({2, 2}));
    SECTION("computational basis on A") {
        const auto ids = t.apply_local_measurement(0, 0, {ket_proj(1, 0), ket_proj(0, 1)});
        REQUIRE(ids.size() == 2);
        CHECK((t.node(ids[0]).op.matrix() - tensor(t.space(), {ket_proj(1, 0), Matrix::Identity(2, 2)}).matrix()).norm() <= 1e-15);
        CHECK((t.node(ids[1]).op.matrix() - tensor(t.space(), {ket_proj(0, 1), Matrix::Identity(2, 2)}).matrix()).norm() <= 1e-15);
        CHECK(*t.node(ids[0]).acting_party == 0);
        CHECK(t.round_count() == 1);
    }
    SECTION("trivial measurement") {
        const auto ids = t.apply_local_measurement(0, 1, {Matrix::Identity(2, 2)});
        REQUIRE(ids.size() == 1);
        CHECK((t.node(ids[0]).op.matrix() - Matrix::Identity(4, 4)).norm() == 0.0);
        const Povm p = leaf_povm(t);
        REQUIRE(p.size() == 1);
        CHECK((p[0].matrix() - Matrix::Identity(4, 4)).norm() == 0.0);
    }
    SECTION("errors") {
        CHECK_THROWS_AS(t.apply_local_measurement(0, 0, {ket_proj(1, 0)}), LoccTreeError);
        CHECK_THROWS_AS(t.apply_local_measurement(0, 2, {Matrix::Identity(2, 2)}), LoccTreeError);
        CHECK_THROWS_AS(t.apply_local_measurement(0, 0, {Matrix::Identity(3, 3)}), DimensionError);
        Matrix neg = Matrix::Zero(2, 2);
        neg(0, 0) = 1.5;
        neg(1, 1) = 1.0;
        Matrix comp = Matrix::Zero(2, 2);
        comp(0, 0) = -0.5;
        CHECK_THROWS_AS(t.apply_local_measurement(0, 0, {neg, comp}), LoccTreeError);
        t.apply_local_measurement(0, 0, {Matrix::Identity(2, 2)});
        CHECK_THROWS_AS(t.apply_local_measurement(0, 0, {Matrix::Identity(2, 2)}), LoccTreeError);
        CHECK_THROWS_AS(branch_path(t, 0), LoccTreeError);
    }
}

TEST_CASE("the two-round four-outcome protocol", "[locc]") {
    const LoccTree t = footnote_tree();
    const auto rep = check_lemma4(t, 1e-12);
    CHECK(rep.passed());
    CHECK(rep.max_residual <= 1e-12);
    const Povm leaves = leaf_povm(t);
    const Povm ref = footnote_measurement();
    REQUIRE(leaves.size() == 4);
    for (std::size_t j = 0; j < 4; ++j) {
        CHECK((leaves[j].matrix() - ref[j].matrix()).norm() <= 1e-12);
    }
    CHECK(validate(leaves).valid());

    // branch to [1] (x) [+]: I -> [1] (x) I -> [1] (x) [+]
    const std::size_t leaf = t.leaves()[2];
    const OperatorPath path = branch_path(t, leaf, 16);
    const Zonotope z(leaves);
    VerifyOptions o;
    o.target = ref[2];
    const auto r = verify_path(path, z, o);
    CHECK(r.passed());
    CHECK(r.max_lipschitz_gap <= 1e-12);
    const Matrix mid = tensor(t.space(), {ket_proj(0, 1), Matrix::Identity(2, 2)}).matrix();
    bool through = false;
    for (const auto &p : path.points) {
        through = through || (p.op.matrix() - mid).norm() <= 1e-12;
    }
    CHECK(through);
    // 16 + 16 edge samples, the root, and a 16-point constant tail
    CHECK(path.points.size() == 1 + 16 + 16 + 16);
    CHECK(path.points.back().s == 0.0);
}

TEST_CASE("one-round branch is a straight local segment", "[locc]") {
    LoccTree t(PartitionedSpace({2, 2}));
    t.apply_local_measurement(0, 0, {ket_proj(1, 0), ket_proj(0, 1)});
    const OperatorPath path = branch_path(t, t.leaves()[0], 8);
    for (const auto &p : path.points) {
        CHECK(nearest_product(p.op).residual <= 1e-12);
        // (1 - x) I_A + x [0], tensored with I_B
        const Matrix &m = p.op.matrix();
        CHECK(std::abs(m(0, 0) - 1.0) <= 1e-12);
        CHECK((m - m.diagonal().asDiagonal().toDenseMatrix()).norm() <= 1e-15);
    }
}

TEST_CASE("random protocols", "[locc]") {
    const PartitionedSpace s({2, 2});
    CHECK(random_protocol(s, 0, 2, 1).size() == 1);
    const LoccTree a = random_protocol(s, 4, 2, 11);
    const LoccTree b = random_protocol(s, 4, 2, 11);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.node(i).op.matrix() == b.node(i).op.matrix());
    }
    CHECK(a.leaves().size() == 16);
    CHECK(check_lemma4(a, 1e-10).passed());
    CHECK(validate(leaf_povm(a)).valid());
    CHECK_THROWS(random_protocol(s, 2, 1, 0));
}

TEST_CASE("branch paths of random trees satisfy the monotone-path properties", "[locc]") {
    for (int t = 0; t < 12; ++t) {
        const PartitionedSpace s(t % 2 == 0 ? std::vector<std::size_t>{2, 2}
                                            : std::vector<std::size_t>{3, 3});
        const LoccTree tree = random_protocol(s, 1 + t % 3, 2 + t % 2, 100 + t);
        const Povm p = leaf_povm(tree);
        const Zonotope z(p);
        for (std::size_t leaf : tree.leaves()) {
            const OperatorPath path = branch_path(tree, leaf, 8);
            VerifyOptions o;
            o.target = tree.node(leaf).op;
            const auto r = verify_path(path, z, o);
            CHECK(r.passed());
            CHECK(r.max_lipschitz_gap <= 1e-8);
            // independent recomputation of residuals, without certificates
            for (std::size_t i = 0; i < path.points.size(); i += 5) {
                CHECK(contains(z, path.points[i].op).residual <= 1e-8);
                CHECK(nearest_product(path.points[i].op).residual <= 1e-8);
            }
            // only the acting party's factor moves along an edge
            for (std::size_t i = 1; i < path.points.size(); ++i) {
                const auto &cur = path.points[i];
                const auto &prev = path.points[i - 1];
                if (!cur.has_acting_party || prev.op.trace() == cur.op.trace()) {
                    continue;
                }
                const auto f0 = nearest_product(prev.op).factors;
                const auto f1 = nearest_product(cur.op).factors;
                for (std::size_t q = 0; q < f0.size(); ++q) {
                    if (q != cur.acting_party) {
                        CHECK((normalized(f0[q]) - normalized(f1[q])).norm() <= 1e-8);
                    }
                }
            }
        }
    }
}

TEST_CASE("refining a leaf can only enlarge the zonotope", "[locc]") {
    for (int t = 0; t < 10; ++t) {
        const PartitionedSpace s({2, 2});
        const LoccTree coarse = random_protocol(s, 2, 2, 200 + t);
        LoccTree fine = coarse;
        Rng rng = task_rng(201, static_cast<std::uint64_t>(t));
        const std::size_t leaf = coarse.leaves()[static_cast<std::size_t>(t) % coarse.leaves().size()];
        fine.apply_local_measurement(leaf, static_cast<std::size_t>(t % 2),
                                     random_local_measurement(rng, 2, 3));
        const Zonotope zc(leaf_povm(coarse));
        const Zonotope zf(leaf_povm(fine));
        const RealMatrix emb = refinement_embedding(coarse, fine);
        const auto with_warm = zonotope_nested(zc, zf, &emb);
        CHECK(with_warm.nested);
        CHECK(with_warm.exhaustive);
        CHECK(with_warm.vertices_checked == 16);
        CHECK(zonotope_nested(zc, zf).nested); // cold start agrees
        // the converse fails once the refinement is genuinely new
        CHECK_FALSE(zonotope_nested(zf, zc).nested);
    }
}

TEST_CASE("truncations converge monotonically in Hausdorff distance", "[locc]") {
    const PartitionedSpace s({2, 2});
    for (int t = 0; t < 5; ++t) {
        const LoccTree tree = random_protocol(s, 3, 2, 300 + t);
        const Zonotope full(leaf_povm(tree));
        double last = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r <= 3; ++r) {
            const LoccTree cut = truncate(tree, r);
            CHECK(cut.round_count() == r);
            CHECK(check_lemma4(cut).passed());
            DistanceOptions o;
            o.norm = DistanceNorm::Frobenius;
            const double h = hausdorff(Zonotope(leaf_povm(cut)), full, o).hausdorff;
            CHECK(h <= last + 1e-9);
            last = h;
        }
        CHECK(last <= 1e-9);
    }
}
