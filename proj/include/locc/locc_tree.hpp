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

/**
 * @file
 * Finite-round LOCC protocol trees in positive-operator bookkeeping: every
 * node carries a PSD product operator F_n = A_n (x) B_n (x) ..., children of a
 * node are produced by one party's complete local measurement and sum to
 * their parent exactly. Provides leaf POVMs, the piecewise-local branch paths
 * from the identity to each leaf, random protocols, and truncations.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "operator.hpp"
#include "path.hpp"
#include "povm.hpp"
#include "random.hpp"
#include "zonotope.hpp"

namespace locc {

inline constexpr double kLocalCompletenessTol = 1e-10;
inline constexpr std::size_t kDefaultSamplesPerSegment = 32;

class LoccTreeError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct LoccNode {
    std::vector<Matrix> local_ops; ///< one PSD factor per party
    HermitianOperator op;          ///< tensor product of local_ops
    std::vector<std::size_t> children;
    std::optional<std::size_t> parent;
    std::optional<std::size_t> acting_party; ///< party whose measurement produced this node
    std::size_t depth = 0;
    std::string label; ///< outcome indices from the root, e.g. "0.2.1"; empty at the root
};

/**
 * @brief An LOCC protocol tree stored as an arena of nodes; node 0 is the
 * root, carrying the identity.
 */
class LoccTree {
  public:
    explicit LoccTree(PartitionedSpace space) : space_(std::move(space)) {
        std::vector<Matrix> ops;
        for (std::size_t p = 0; p < space_.parties(); ++p) {
            const auto d = static_cast<Eigen::Index>(space_.party_dim(p));
            ops.emplace_back(Matrix::Identity(d, d));
        }
        nodes_.push_back(LoccNode{ops, HermitianOperator::identity(space_), {}, std::nullopt,
                                  std::nullopt, 0, ""});
    }

    [[nodiscard]] const PartitionedSpace &space() const { return space_; }
    [[nodiscard]] std::size_t size() const { return nodes_.size(); }
    [[nodiscard]] const LoccNode &node(std::size_t i) const { return nodes_.at(i); }
    [[nodiscard]] const std::vector<LoccNode> &nodes() const { return nodes_; }
    [[nodiscard]] static constexpr std::size_t root() { return 0; }
    [[nodiscard]] bool is_leaf(std::size_t i) const { return nodes_.at(i).children.empty(); }

    /// Number of measurement rounds along the deepest branch.
    [[nodiscard]] std::size_t round_count() const {
        std::size_t r = 0;
        for (const auto &n : nodes_) {
            r = std::max(r, n.depth);
        }
        return r;
    }

    /// Leaves in depth-first order (children in outcome order).
    [[nodiscard]] std::vector<std::size_t> leaves() const {
        std::vector<std::size_t> out;
        std::vector<std::size_t> stack{0};
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            const auto &c = nodes_[i].children;
            if (c.empty()) {
                out.push_back(i);
            }
            for (auto it = c.rbegin(); it != c.rend(); ++it) {
                stack.push_back(*it);
            }
        }
        return out;
    }

    /// Root-to-node chain of node indices.
    [[nodiscard]] std::vector<std::size_t> ancestry(std::size_t i) const {
        std::vector<std::size_t> chain{i};
        while (nodes_.at(chain.back()).parent) {
            chain.push_back(*nodes_[chain.back()].parent);
        }
        std::reverse(chain.begin(), chain.end());
        return chain;
    }

    /**
     * @brief Party `party` measures {M_k} at leaf `node`.
     *
     * Child k has local factor A^{1/2} M_k A^{1/2} for the measuring party
     * (A its current factor) and the parent's factors elsewhere; the last
     * child takes A minus the others, so children sum to the parent exactly.
     * Returns the new node indices.
     */
    std::vector<std::size_t> apply_local_measurement(std::size_t node, std::size_t party,
                                                     const std::vector<Matrix> &elements,
                                                     double tol = kLocalCompletenessTol) {
        if (node >= nodes_.size()) {
            throw LoccTreeError("apply_local_measurement: no node " + std::to_string(node));
        }
        if (!is_leaf(node)) {
            throw LoccTreeError("apply_local_measurement: node " + std::to_string(node) +
                                " is not a leaf");
        }
        if (party >= space_.parties()) {
            throw LoccTreeError("apply_local_measurement: no party " + std::to_string(party));
        }
        if (elements.empty()) {
            throw LoccTreeError("apply_local_measurement: empty measurement");
        }
        const auto d = static_cast<Eigen::Index>(space_.party_dim(party));
        Matrix sum = Matrix::Zero(d, d);
        for (const auto &m : elements) {
            if (m.rows() != d || m.cols() != d) {
                throw DimensionError("apply_local_measurement: element of size " +
                                     std::to_string(m.rows()) + " for a party of dimension " +
                                     std::to_string(d));
            }
            sum += m;
        }
        const double defect = (sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
        if (defect > tol) {
            throw LoccTreeError("apply_local_measurement: elements sum to identity only within " +
                                std::to_string(defect));
        }
        for (const auto &m : elements) {
            if (hermiticity_defect(m) > 1e-10 * std::max(1.0, m.norm())) {
                throw LoccTreeError("apply_local_measurement: element is not Hermitian");
            }
            Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
            if (es.eigenvalues()(0) < -kPsdTol) {
                throw LoccTreeError("apply_local_measurement: element is not PSD");
            }
        }
        const Matrix a = nodes_[node].local_ops[party];
        const Matrix root_a = psd_sqrt(a);
        std::vector<Matrix> factors;
        Matrix used = Matrix::Zero(d, d);
        for (std::size_t k = 0; k < elements.size(); ++k) {
            if (k + 1 < elements.size()) {
                factors.push_back(hermitian_part(root_a * elements[k] * root_a));
                used += factors.back();
            } else {
                factors.push_back(hermitian_part(a - used));
            }
        }
        return add_children(node, party, factors);
    }

    /**
     * @brief Attaches children whose `party` factors are given directly (they
     * must sum to the node's factor). Used to copy subtrees verbatim.
     */
    std::vector<std::size_t> add_children(std::size_t node, std::size_t party,
                                          const std::vector<Matrix> &factors) {
        if (node >= nodes_.size() || !is_leaf(node)) {
            throw LoccTreeError("add_children: node " + std::to_string(node) + " is not a leaf");
        }
        if (party >= space_.parties() || factors.empty()) {
            throw LoccTreeError("add_children: bad party or empty factor list");
        }
        const Matrix &a = nodes_[node].local_ops[party];
        Matrix sum = Matrix::Zero(a.rows(), a.cols());
        for (const auto &f : factors) {
            if (f.rows() != a.rows() || f.cols() != a.cols()) {
                throw DimensionError("add_children: factor size does not match the party");
            }
            sum += f;
        }
        if ((sum - a).norm() > kLocalCompletenessTol * std::max(1.0, a.norm())) {
            throw LoccTreeError("add_children: factors do not sum to the parent factor");
        }
        std::vector<std::size_t> ids;
        for (std::size_t k = 0; k < factors.size(); ++k) {
            std::vector<Matrix> ops = nodes_[node].local_ops;
            ops.at(party) = factors[k];
            HermitianOperator op = tensor(space_, std::span<const Matrix>(ops));
            std::string label = nodes_[node].label.empty()
                                    ? std::to_string(k)
                                    : nodes_[node].label + "." + std::to_string(k);
            LoccNode child{std::move(ops), std::move(op), {}, node, party,
                           nodes_[node].depth + 1, std::move(label)};
            ids.push_back(nodes_.size());
            nodes_.push_back(std::move(child));
        }
        nodes_[node].children = ids;
        return ids;
    }

  private:
    PartitionedSpace space_;
    std::vector<LoccNode> nodes_;
};

// ---------------------------------------------------------------------------
// Consistency checks and induced measurements
// ---------------------------------------------------------------------------

struct Lemma4Report {
    std::vector<double> node_residuals; ///< ||F_n - sum of descendant leaves||_F
    double max_residual = 0.0;
    double max_children_residual = 0.0; ///< ||F_n - sum of children||_F
    double max_factor_residual = 0.0;   ///< ||F_n - (x) local_ops||_F
    std::size_t local_violations = 0;   ///< nodes where a non-acting factor changed
    bool root_is_identity = true;
    double tol = 0.0;

    [[nodiscard]] bool passed() const {
        return root_is_identity && local_violations == 0 && max_residual <= tol &&
               max_children_residual <= tol && max_factor_residual <= tol;
    }
};

/**
 * @brief Every node's operator equals the sum of its descendant leaves; also
 * checks the product structure and that only the acting party's factor changes.
 */
inline Lemma4Report check_lemma4(const LoccTree &tree, double tol = 1e-10) {
    const std::size_t n = tree.size();
    Lemma4Report r;
    r.tol = tol;
    r.node_residuals.assign(n, 0.0);
    const auto d = static_cast<Eigen::Index>(tree.space().dim());
    std::vector<Matrix> leaf_sum(n, Matrix::Zero(d, d));
    // children always have larger indices than their parent
    for (std::size_t i = n; i-- > 0;) {
        const auto &node = tree.node(i);
        if (node.children.empty()) {
            leaf_sum[i] = node.op.matrix();
        } else {
            Matrix children = Matrix::Zero(d, d);
            for (std::size_t c : node.children) {
                leaf_sum[i] += leaf_sum[c];
                children += tree.node(c).op.matrix();
            }
            r.max_children_residual =
                std::max(r.max_children_residual, (children - node.op.matrix()).norm());
        }
        r.node_residuals[i] = (leaf_sum[i] - node.op.matrix()).norm();
        r.max_residual = std::max(r.max_residual, r.node_residuals[i]);
        const Matrix prod = tensor(tree.space(), std::span<const Matrix>(node.local_ops)).matrix();
        r.max_factor_residual = std::max(r.max_factor_residual, (prod - node.op.matrix()).norm());
        if (node.parent) {
            const auto &par = tree.node(*node.parent);
            for (std::size_t p = 0; p < node.local_ops.size(); ++p) {
                if (node.acting_party && p == *node.acting_party) {
                    continue;
                }
                if ((node.local_ops[p] - par.local_ops[p]).norm() > tol) {
                    ++r.local_violations;
                }
            }
        }
    }
    r.root_is_identity =
        (tree.node(0).op.matrix() - Matrix::Identity(d, d)).norm() <= tol;
    return r;
}

/// The measurement implemented by the tree: one element per leaf (depth-first order).
inline Povm leaf_povm(const LoccTree &tree) {
    std::vector<HermitianOperator> el;
    std::vector<std::string> labels;
    for (std::size_t leaf : tree.leaves()) {
        el.push_back(tree.node(leaf).op);
        labels.push_back(tree.node(leaf).label.empty() ? "root" : tree.node(leaf).label);
    }
    return {tree.space(), std::move(el), std::move(labels), std::max(kMaxPovmElements, el.size())};
}

// ---------------------------------------------------------------------------
// Branch paths
// ---------------------------------------------------------------------------

/**
 * @brief The piecewise-local path from I to a leaf, parametrized by trace.
 *
 * On the edge n -> n+1 the path is
 * Pi(s) = ([s - Tr F_{n+1}] F_n + [Tr F_n - s] F_{n+1}) / (Tr F_n - Tr F_{n+1}),
 * sampled at samples_per_segment points per edge (shared endpoints once;
 * edges with no trace change are skipped), followed by the constant piece
 * Pi(s) = F_leaf for s from Tr F_leaf down to 0. Every point carries exact
 * certificates: its factors (only the acting party's factor moves) and its
 * zonotope coefficients (interpolated leaf indicators of Z(leaf_povm(tree))).
 */
inline OperatorPath branch_path(const LoccTree &tree, std::size_t leaf,
                                std::size_t samples_per_segment = kDefaultSamplesPerSegment) {
    if (leaf >= tree.size() || !tree.is_leaf(leaf)) {
        throw LoccTreeError("branch_path: node " + std::to_string(leaf) + " is not a leaf of the tree");
    }
    if (samples_per_segment == 0) {
        throw std::invalid_argument("branch_path: samples_per_segment must be positive");
    }
    const auto leaves = tree.leaves();
    std::vector<std::size_t> leaf_pos(tree.size(), 0);
    for (std::size_t k = 0; k < leaves.size(); ++k) {
        leaf_pos[leaves[k]] = k;
    }
    // indicator of descendant leaves for each node on the chain
    const auto chain = tree.ancestry(leaf);
    auto indicator = [&](std::size_t node) {
        std::vector<double> v(leaves.size(), 0.0);
        std::vector<std::size_t> stack{node};
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            if (tree.is_leaf(i)) {
                v[leaf_pos[i]] = 1.0;
            }
            for (std::size_t c : tree.node(i).children) {
                stack.push_back(c);
            }
        }
        return v;
    };
    std::vector<std::vector<double>> ind;
    for (std::size_t nd : chain) {
        ind.push_back(indicator(nd));
    }

    OperatorPath path;
    path.target_index = leaf_pos[leaf];
    path.target_label = tree.node(leaf).label.empty() ? "root" : tree.node(leaf).label;
    path.endpoint_scale = 1.0;
    const auto make = [&](std::size_t e, double w0) {
        // w0 F_n + (1 - w0) F_{n+1} on edge e = (chain[e], chain[e+1])
        const auto &a = tree.node(chain[e]);
        const auto &b = tree.node(chain[e + 1]);
        const double w1 = 1.0 - w0;
        std::vector<Matrix> f = b.local_ops;
        const std::size_t p = *b.acting_party;
        f[p] = w0 * a.local_ops[p] + w1 * b.local_ops[p];
        HermitianOperator op(tree.space(), Matrix(w0 * a.op.matrix() + w1 * b.op.matrix()));
        std::vector<double> c(leaves.size());
        for (std::size_t k = 0; k < c.size(); ++k) {
            c[k] = w0 * ind[e][k] + w1 * ind[e + 1][k];
        }
        PathPoint pt{std::move(op), 0.0, std::move(c), 0.0, 0.0, std::move(f), p, true};
        return pt;
    };

    const auto &root = tree.node(chain.front());
    path.points.push_back(PathPoint{root.op, root.op.trace(), ind.front(), 0.0, 0.0, root.local_ops,
                                    0, false});
    for (std::size_t e = 0; e + 1 < chain.size(); ++e) {
        const double t0 = tree.node(chain[e]).op.trace();
        const double t1 = tree.node(chain[e + 1]).op.trace();
        const double dt = t0 - t1;
        if (!(dt > 1e-14 * std::max(1.0, t0))) {
            continue; // degenerate edge: the child equals the parent
        }
        for (std::size_t k = 1; k <= samples_per_segment; ++k) {
            const double s = t0 - dt * static_cast<double>(k) / static_cast<double>(samples_per_segment);
            const double w0 = (s - t1) / dt;
            PathPoint pt = make(e, k == samples_per_segment ? 0.0 : w0);
            pt.s = k == samples_per_segment ? t1 : s;
            path.points.push_back(std::move(pt));
        }
    }
    // constant final piece
    const auto &lf = tree.node(leaf);
    const double tl = lf.op.trace();
    if (tl > 0.0) {
        for (std::size_t k = 1; k <= samples_per_segment; ++k) {
            PathPoint pt = path.points.back();
            pt.s = tl * (1.0 - static_cast<double>(k) / static_cast<double>(samples_per_segment));
            path.points.push_back(std::move(pt));
        }
    }
    return path;
}

// ---------------------------------------------------------------------------
// Random protocols and truncations
// ---------------------------------------------------------------------------

/// Complete measurement with `outcomes` elements on C^d, built from nested
/// two-outcome splits {S^{1/2} M S^{1/2}, S - S^{1/2} M S^{1/2}} with M a random contraction.
inline std::vector<Matrix> random_local_measurement(Rng &rng, Eigen::Index d, std::size_t outcomes) {
    if (outcomes == 0) {
        throw std::invalid_argument("random_local_measurement: need at least one outcome");
    }
    std::vector<Matrix> el{Matrix::Identity(d, d)};
    while (el.size() < outcomes) {
        const std::size_t k = static_cast<std::size_t>(rng() % el.size());
        const Matrix s = psd_sqrt(el[k]);
        const Matrix m = random_contraction(rng, d, 0.05, 0.95);
        const Matrix a = hermitian_part(s * m * s);
        const Matrix b = hermitian_part(el[k] - a);
        el[k] = a;
        el.push_back(b);
    }
    return el;
}

/**
 * @brief Random `rounds`-round protocol: each round one randomly chosen party
 * measures every current leaf with a random `branching`-outcome measurement.
 */
inline LoccTree random_protocol(const PartitionedSpace &space, std::size_t rounds,
                                std::size_t branching, std::uint64_t seed) {
    if (branching < 2 && rounds > 0) {
        throw std::invalid_argument("random_protocol: branching must be at least 2");
    }
    LoccTree tree(space);
    Rng rng = task_rng(seed, 0);
    for (std::size_t r = 0; r < rounds; ++r) {
        const std::size_t party = static_cast<std::size_t>(rng() % space.parties());
        const auto d = static_cast<Eigen::Index>(space.party_dim(party));
        for (std::size_t leaf : tree.leaves()) {
            tree.apply_local_measurement(leaf, party, random_local_measurement(rng, d, branching));
        }
    }
    return tree;
}

/// The protocol stopped after `rounds` rounds (nodes deeper than that are cut).
inline LoccTree truncate(const LoccTree &tree, std::size_t rounds) {
    LoccTree out(tree.space());
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}}; // (old, new)
    while (!stack.empty()) {
        const auto [old_id, new_id] = stack.back();
        stack.pop_back();
        const auto &node = tree.node(old_id);
        if (node.children.empty() || node.depth >= rounds) {
            continue;
        }
        const std::size_t party = *tree.node(node.children.front()).acting_party;
        std::vector<Matrix> factors;
        for (std::size_t c : node.children) {
            factors.push_back(tree.node(c).local_ops[party]);
        }
        const auto ids = out.add_children(new_id, party, factors);
        for (std::size_t k = ids.size(); k-- > 0;) {
            stack.emplace_back(node.children[k], ids[k]);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Zonotope nesting
// ---------------------------------------------------------------------------

struct NestingReport {
    bool nested = true;
    double max_residual = 0.0;
    std::size_t vertices_checked = 0;
    bool exhaustive = false; ///< all 2^m vertices of the inner zonotope were checked
};

/**
 * @brief Checks inner \subseteq outer via contains() on vertices of inner: all
 * of them up to exhaustive_limit generators, otherwise the two extreme
 * vertices plus `samples` random subset sums.
 *
 * `embedding`, when given, maps inner coefficients (original indexing) to a
 * warm start for outer coefficients (rows: outer generators).
 */
inline NestingReport zonotope_nested(const Zonotope &inner, const Zonotope &outer,
                                     const RealMatrix *embedding = nullptr, std::uint64_t seed = 0,
                                     std::size_t exhaustive_limit = 12, std::size_t samples = 1024,
                                     double tol = kMembershipTol) {
    NestingReport r;
    const std::size_t m = inner.size();
    // each vertex is a 0/1 selection over the nonzero generators of `inner`
    std::vector<std::vector<char>> picks;
    if (m <= exhaustive_limit) {
        r.exhaustive = true;
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
            std::vector<char> b(m);
            for (std::size_t k = 0; k < m; ++k) {
                b[k] = static_cast<char>((mask >> k) & 1U);
            }
            picks.push_back(std::move(b));
        }
    } else {
        picks.emplace_back(m, 0);
        picks.emplace_back(m, 1);
        for (std::size_t i = 0; i < samples; ++i) {
            Rng rng = task_rng(seed, i);
            std::vector<char> b(m);
            for (std::size_t k = 0; k < m; ++k) {
                b[k] = static_cast<char>(rng() & 1U);
            }
            picks.push_back(std::move(b));
        }
    }
    for (const auto &b : picks) {
        std::vector<double> c(inner.original_size(), 0.0);
        for (std::size_t k = 0; k < m; ++k) {
            if (b[k] != 0) {
                c[inner.original_index(k)] = 1.0;
            }
        }
        const HermitianOperator v = inner.point(inner.compress(c));
        std::vector<double> warm;
        if (embedding != nullptr) {
            const Eigen::Map<const RealVector> cv(c.data(), static_cast<Eigen::Index>(c.size()));
            const RealVector w = (*embedding) * cv;
            warm.assign(w.data(), w.data() + w.size());
        }
        const auto res = contains(outer, v, tol, embedding != nullptr ? &warm : nullptr);
        r.max_residual = std::max(r.max_residual, res.residual);
        r.nested = r.nested && res.feasible;
        ++r.vertices_checked;
    }
    return r;
}

/**
 * @brief Leaf-descent matrix between a tree and a refinement of it: entry
 * (j, k) is 1 when leaf j of `refined` descends from (or equals) leaf k of
 * `coarse`, matched by outcome labels.
 */
inline RealMatrix refinement_embedding(const LoccTree &coarse, const LoccTree &refined) {
    const auto lc = coarse.leaves();
    const auto lr = refined.leaves();
    RealMatrix e = RealMatrix::Zero(static_cast<Eigen::Index>(lr.size()),
                                    static_cast<Eigen::Index>(lc.size()));
    for (std::size_t j = 0; j < lr.size(); ++j) {
        const std::string &a = refined.node(lr[j]).label;
        for (std::size_t k = 0; k < lc.size(); ++k) {
            const std::string &b = coarse.node(lc[k]).label;
            if (b.empty() || a == b || (a.size() > b.size() && a.compare(0, b.size(), b) == 0 &&
                                        a[b.size()] == '.')) {
                e(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = 1.0;
            }
        }
    }
    return e;
}

} // namespace locc
