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

// Walks through the three-state two-qubit example: which product projectors
// can complete a measurement, why the states' complement has no product
// vector, and why no product path leads from I to the first outcome.

#include <cstdio>

#include "locc/locc.hpp"

using namespace locc;

int main() {
    const Ensemble products = kkb15_products();
    const std::vector<HermitianOperator> ops = products.states();
    const WeightSolution w = completeness_weights(ops);
    std::printf("Completeness weights over the six product projectors (feasible: %s)\n",
                w.feasible ? "yes" : "no");
    for (std::size_t k = 0; k < ops.size(); ++k) {
        std::printf("  %-6s weight %.6f, feasible range [%.6f, %.6f]%s\n", products.name(k).c_str(),
                    w.weights[k], w.intervals[k].min, w.intervals[k].max,
                    w.forced_zero(k) ? "  <- forced to zero" : "");
    }

    const Povm m = kkb15_measurement();
    std::printf("\nThe resulting %zu-outcome measurement: completeness residual %.2g\n", m.size(),
                validate(m).completeness_residual);

    const Ensemble states = kkb15_states();
    const auto kernel = orthocomplement(states);
    const KernelProductResult k = kernel_product_search(states, 1);
    std::printf("\nOrthocomplement of the three states: dimension %zu\n", kernel.size());
    std::printf("  closest unit product vector is at distance %.9f from it (product found: %s)\n",
                k.residual, k.found ? "yes" : "no");

    const Zonotope z(m);
    IsolationOptions io;
    io.samples = 20000;
    io.grid_step = 0.25;
    io.seed = 7;
    const IsolationProbeReport iso = isolation_probe(z, 0, io, m.label(0));
    std::printf("\nProduct points within relative trace distance %.2f of the psi11 ray:\n", io.epsilon);
    std::printf("  %zu tested, %zu hits, %zu off the ray\n", iso.samples_tested, iso.hit_count,
                iso.off_segment_hits);

    PathSearchOptions po;
    po.restarts = 1;
    const PathSearchResult r = find_monotonic_product_path(z, 0, po, m.label(0));
    std::printf("\nMonotone product path from I toward psi11: %s\n", r.found ? "found" : "not found");
    if (!r.found) {
        for (std::size_t i = 0; i < r.obstruction.lowest_s_per_restart.size(); ++i) {
            std::printf("  attempt %zu stalled at trace %.4f, relative distance to the ray %.4f\n", i,
                        r.obstruction.lowest_s_per_restart[i],
                        r.obstruction.best_relative_distance_per_restart[i]);
        }
    }
    return 0;
}
