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

// Builds a two-round protocol by hand (A measures in the computational basis,
// B answers in a basis that depends on A's outcome), then follows one branch
// of the tree as a product path through the zonotope of the final measurement.

#include <cstdio>

#include "locc/locc.hpp"

using namespace locc;

namespace {

Matrix ket_projector(double a, double b) {
    Vector v(2);
    v << a, b;
    v.normalize();
    return v * v.adjoint();
}

} // namespace

int main() {
    LoccTree tree(PartitionedSpace({2, 2}));
    const auto a = tree.apply_local_measurement(0, 0, {ket_projector(1, 0), ket_projector(0, 1)});
    tree.apply_local_measurement(a[0], 1, {ket_projector(1, 0), ket_projector(0, 1)});
    tree.apply_local_measurement(a[1], 1, {ket_projector(1, 1), ket_projector(1, -1)});

    std::printf("Tree: %zu nodes, %zu leaves, %zu rounds; node consistency residual %.2g\n", tree.size(),
                tree.leaves().size(), tree.round_count(), check_lemma4(tree).max_residual);

    const Povm leaves = leaf_povm(tree);
    const Zonotope z(leaves);
    std::printf("Leaf measurement valid: %s\n", validate(leaves).valid() ? "yes" : "no");

    const std::size_t leaf = tree.leaves()[2];
    const OperatorPath path = branch_path(tree, leaf, 4);
    VerifyOptions vo;
    vo.target = tree.node(leaf).op;
    const PathReport report = verify_path(path, z, vo);
    std::printf("\nBranch %s as a path (%zu points, verified: %s)\n", tree.node(leaf).label.c_str(),
                path.points.size(), report.passed() ? "yes" : "no");
    std::printf("  %8s %8s %14s %14s\n", "trace", "party", "membership", "product");
    for (const auto &p : path.points) {
        const std::string party = p.has_acting_party ? std::to_string(p.acting_party) : "-";
        std::printf("  %8.4f %8s %14.2e %14.2e\n", p.s, party.c_str(), contains(z, p.op).residual,
                    nearest_product(p.op).residual);
    }

    // the same outcome reached by the generic path search
    PathSearchOptions po;
    po.seed = 1;
    const PathSearchResult r = find_monotonic_product_path(z, 2, po, leaves.label(2));
    std::printf("\nPath search toward the same outcome: %s, %zu points, endpoint scale %.6f\n",
                r.found ? "found" : "not found", r.path.points.size(), r.path.endpoint_scale);
    return 0;
}
