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
#include "locc/povm.hpp"
#include "locc/random.hpp"

using namespace locc;
using Catch::Matchers::WithinAbs;

namespace {

/// Random complete POVM: {U diag-split U^dagger} pieces from nested two-outcome splits.
Povm random_povm(Rng &rng, const PartitionedSpace &space, std::size_t outcomes) {
    const auto d = static_cast<Eigen::Index>(space.dim());
    std::vector<HermitianOperator> elems{HermitianOperator::identity(space)};
    while (elems.size() < outcomes) {
        const std::size_t k = rng() % elems.size();
        const Matrix s = psd_sqrt(elems[k].matrix());
        const Matrix m = random_contraction(rng, d, 0.1, 0.9);
        const HermitianOperator a(space, hermitian_part(s * m * s));
        HermitianOperator b = elems[k];
        b -= a;
        elems[k] = a;
        elems.push_back(b);
    }
    return {space, elems};
}

} // namespace

TEST_CASE("validate reports completeness and positivity", "[povm]") {
    const PartitionedSpace s({2, 2});
    SECTION("single identity element") {
        const auto r = validate(Povm(s, {HermitianOperator::identity(s)}));
        CHECK(r.valid());
        CHECK(r.completeness_residual == 0.0);
    }
    SECTION("Bell projectors") {
        const auto r = validate(bell_measurement());
        CHECK(r.valid());
        CHECK(r.completeness_residual <= 1e-12);
        REQUIRE(r.psd_margins.size() == 4);
    }
    SECTION("weighted product measurement of the worked example") {
        const Povm m = kkb15_measurement();
        CHECK(m.size() == 5);
        const auto r = validate(m);
        CHECK(r.valid());
        CHECK(r.completeness_residual <= 1e-10);
    }
    SECTION("incomplete and non-PSD sets are flagged") {
        Matrix neg = Matrix::Identity(4, 4);
        neg(0, 0) = -0.5;
        const auto r = validate(Povm(s, {HermitianOperator(s, neg)}));
        CHECK_FALSE(r.all_psd);
        CHECK_FALSE(r.complete);
        CHECK_THAT(r.completeness_residual, WithinAbs(1.5, 1e-12));
        CHECK_THAT(r.max_entry_deviation, WithinAbs(1.5, 1e-12));
    }
}

TEST_CASE("Povm construction checks shape, labels and the size cap", "[povm]") {
    const PartitionedSpace s({2, 2});
    const PartitionedSpace t({2, 3});
    CHECK_THROWS_AS(Povm(s, {}), std::invalid_argument);
    CHECK_THROWS_AS(Povm(s, {HermitianOperator::identity(t)}), DimensionError);
    CHECK_THROWS_AS(Povm(s, {HermitianOperator::identity(s)}, {"a", "b"}), std::invalid_argument);
    std::vector<HermitianOperator> many(5, HermitianOperator::identity(s));
    CHECK_THROWS_AS(Povm(s, many, {}, 4), PovmSizeError);
    const Povm f = footnote_measurement();
    CHECK(f.find("1+") == std::size_t{2});
    CHECK(f.find("3") == std::size_t{3});
    CHECK_FALSE(f.find("7").has_value());
    CHECK_FALSE(f.find("nope").has_value());
}

TEST_CASE("merge_proportional combines proportional outcomes", "[povm]") {
    const PartitionedSpace s({2, 2});
    Matrix e = Matrix::Zero(4, 4);
    e(0, 0) = 0.25;
    e(1, 1) = 0.25;
    const HermitianOperator E(s, e);
    HermitianOperator rest = HermitianOperator::identity(s);
    rest -= E;
    rest -= E;
    SECTION("exact duplicates") {
        const Povm m = merge_proportional(Povm(s, {E, E, rest}));
        REQUIRE(m.size() == 2);
        CHECK((m[0].matrix() - 2.0 * e).norm() <= 1e-15);
        CHECK((m[1].matrix() - rest.matrix()).norm() <= 1e-15);
    }
    SECTION("non-proportional sets are unchanged") {
        CHECK(merge_proportional(bell_measurement()).size() == 4);
        CHECK(merge_proportional(kkb15_measurement()).size() == 5);
    }
    SECTION("zero elements are dropped") {
        const Povm m = merge_proportional(Povm(s, {HermitianOperator::zero(s), E, E, rest}));
        CHECK(m.size() == 2);
    }
    SECTION("idempotence and sum preservation on random POVMs with duplicates") {
        for (int t = 0; t < 100; ++t) {
            Rng rng = task_rng(31, static_cast<std::uint64_t>(t));
            const Povm base = random_povm(rng, s, 2 + t % 5);
            // split a random element into three proportional pieces
            std::vector<HermitianOperator> el = base.elements();
            const std::size_t k = rng() % el.size();
            HermitianOperator a = el[k];
            a *= 0.2;
            HermitianOperator b = el[k];
            b *= 0.3;
            el[k] *= 0.5;
            el.push_back(a);
            el.push_back(b);
            const Povm dup(s, el);
            const Povm once = merge_proportional(dup);
            const Povm twice = merge_proportional(once);
            CHECK(once.size() == base.size());
            REQUIRE(twice.size() == once.size());
            for (std::size_t j = 0; j < once.size(); ++j) {
                CHECK((once[j].matrix() - twice[j].matrix()).norm() <= 1e-12);
            }
            CHECK((dup.sum().matrix() - once.sum().matrix()).norm() <= 1e-10);
        }
    }
}

TEST_CASE("completeness_weights on small examples", "[povm]") {
    SECTION("Bell projectors have the unique all-ones resolution") {
        const auto w = completeness_weights(bell_measurement().elements());
        REQUIRE(w.feasible);
        for (std::size_t k = 0; k < 4; ++k) {
            CHECK_THAT(w.weights[k], WithinAbs(1.0, 1e-10));
            CHECK_THAT(w.intervals[k].min, WithinAbs(1.0, 1e-9));
            CHECK_THAT(w.intervals[k].max, WithinAbs(1.0, 1e-9));
        }
    }
    SECTION("four-outcome product measurement") {
        const auto w = completeness_weights(footnote_measurement().elements());
        REQUIRE(w.feasible);
        for (double x : w.weights) {
            CHECK_THAT(x, WithinAbs(1.0, 1e-10));
        }
    }
    SECTION("infeasible systems report the best nonnegative residual") {
        const PartitionedSpace s({2, 2});
        const HermitianOperator p = HermitianOperator::projector(s, Vector::Unit(4, 0));
        const auto w = completeness_weights({p});
        CHECK_FALSE(w.feasible);
        CHECK_THAT(w.residual, WithinAbs(std::sqrt(3.0), 1e-10));
    }
}

TEST_CASE("completeness_weights excludes the psi12 outcome of the worked example", "[povm]") {
    const Ensemble p = kkb15_products();
    const auto w = completeness_weights(p.states());
    REQUIRE(w.feasible);
    REQUIRE(w.weights.size() == 6);
    CHECK(w.intervals[1].min >= -1e-12);
    CHECK(w.intervals[1].max <= 1e-8);
    CHECK(w.forced_zero(1));

    // Oracle: with psi12 removed the five projectors are linearly independent,
    // so ordinary least squares recovers the unique weights.
    RealMatrix a(16, 5);
    int col = 0;
    for (std::size_t k = 0; k < 6; ++k) {
        if (k != 1) {
            a.col(col++) = hermitian_coordinates(p.states()[k]);
        }
    }
    const RealVector b = hermitian_coordinates(HermitianOperator::identity(p.space()));
    const RealVector ref = a.colPivHouseholderQr().solve(b);
    CHECK((a * ref - b).norm() <= 1e-12);
    col = 0;
    for (std::size_t k = 0; k < 6; ++k) {
        if (k == 1) {
            continue;
        }
        CHECK_THAT(w.weights[k], WithinAbs(ref(col), 1e-9));
        CHECK_THAT(w.intervals[k].min, WithinAbs(ref(col), 1e-8));
        CHECK_THAT(w.intervals[k].max, WithinAbs(ref(col), 1e-8));
        ++col;
    }
}

TEST_CASE("completeness_weights properties on random POVMs", "[povm]") {
    const PartitionedSpace s({2, 2});
    for (int t = 0; t < 40; ++t) {
        Rng rng = task_rng(32, static_cast<std::uint64_t>(t));
        const Povm m = random_povm(rng, s, 2 + t % 6);
        const auto w = completeness_weights(m.elements());
        REQUIRE(w.feasible);
        for (std::size_t k = 0; k < m.size(); ++k) {
            // the all-ones vector is feasible, so 1 lies in every interval
            CHECK(w.intervals[k].min <= 1.0 + 1e-8);
            CHECK(w.intervals[k].max >= 1.0 - 1e-8);
        }
    }
    // deleting certified-zero weights keeps the system feasible
    const Ensemble p = kkb15_products();
    std::vector<HermitianOperator> kept;
    const auto w = completeness_weights(p.states());
    for (std::size_t k = 0; k < 6; ++k) {
        if (!w.forced_zero(k)) {
            kept.push_back(p.states()[k]);
        }
    }
    CHECK(kept.size() == 5);
    CHECK(completeness_weights(kept).feasible);
}
