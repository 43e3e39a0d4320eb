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
 * State ensembles, built-in fixtures (Bell states, the KKB two-qubit example,
 * a four-outcome product measurement), joint kernels, product-vector search in
 * a kernel, discrimination partitions, and the normalized-path certificate
 * R(s) = Pi(s) / sum_mu Tr(Pi(s) rho_mu).
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "operator.hpp"
#include "path.hpp"
#include "povm.hpp"
#include "product.hpp"
#include "random.hpp"

namespace locc {

inline constexpr double kStateTraceTol = 1e-10;
inline constexpr double kDiscriminationTol = 1e-9;

/// A family of density operators on one space; pure members keep their vectors.
class Ensemble {
  public:
    Ensemble(PartitionedSpace space, std::vector<HermitianOperator> states,
             std::vector<std::string> names = {}, std::vector<Vector> vectors = {})
        : space_(std::move(space)), states_(std::move(states)), names_(std::move(names)),
          vectors_(std::move(vectors)) {
        if (states_.empty()) {
            throw std::invalid_argument("Ensemble: at least one state is required");
        }
        for (std::size_t m = 0; m < states_.size(); ++m) {
            if (!(states_[m].space() == space_)) {
                throw DimensionError("Ensemble: state " + std::to_string(m) + " lives on " +
                                     states_[m].space().to_string() + ", expected " +
                                     space_.to_string());
            }
            if (!is_psd(states_[m])) {
                throw std::invalid_argument("Ensemble: state " + std::to_string(m) + " is not PSD");
            }
            if (std::abs(states_[m].trace() - 1.0) > kStateTraceTol) {
                throw std::invalid_argument("Ensemble: state " + std::to_string(m) +
                                            " does not have unit trace");
            }
        }
        if (!names_.empty() && names_.size() != states_.size()) {
            throw std::invalid_argument("Ensemble: names do not match states");
        }
        if (!vectors_.empty() && vectors_.size() != states_.size()) {
            throw std::invalid_argument("Ensemble: vectors do not match states");
        }
    }

    /// Pure-state ensemble from (unnormalized) vectors.
    static Ensemble pure(const PartitionedSpace &space, const std::vector<Vector> &vectors,
                         std::vector<std::string> names = {}) {
        std::vector<HermitianOperator> states;
        std::vector<Vector> normalized;
        for (const auto &v : vectors) {
            if (v.size() != static_cast<Eigen::Index>(space.dim())) {
                throw DimensionError("Ensemble: vector of length " + std::to_string(v.size()) +
                                     " on " + space.to_string());
            }
            states.push_back(HermitianOperator::projector(space, v));
            normalized.push_back(v / v.norm());
        }
        return {space, std::move(states), std::move(names), std::move(normalized)};
    }

    [[nodiscard]] const PartitionedSpace &space() const { return space_; }
    [[nodiscard]] const std::vector<HermitianOperator> &states() const { return states_; }
    [[nodiscard]] const std::vector<std::string> &names() const { return names_; }
    /// Normalized state vectors when every member is pure; otherwise empty.
    [[nodiscard]] const std::vector<Vector> &vectors() const { return vectors_; }
    [[nodiscard]] std::size_t size() const { return states_.size(); }
    [[nodiscard]] std::string name(std::size_t m) const {
        return names_.empty() ? std::to_string(m) : names_.at(m);
    }
    [[nodiscard]] HermitianOperator sum() const {
        HermitianOperator s = HermitianOperator::zero(space_);
        for (const auto &r : states_) {
            s += r;
        }
        return s;
    }
    /// The states as rank-one (or general) operators, e.g. for completeness weights.
    [[nodiscard]] Povm as_povm_candidates() const { return {space_, states_, names_}; }

  private:
    PartitionedSpace space_;
    std::vector<HermitianOperator> states_;
    std::vector<std::string> names_;
    std::vector<Vector> vectors_;
};

// ---------------------------------------------------------------------------
// Built-in fixtures
// ---------------------------------------------------------------------------

class UnknownBuiltinError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

namespace kkb {

/// Two-qubit vector a|00> + b|01> + c|10> + d|11>.
inline Vector two_qubit(double a, double b, double c, double d) {
    Vector v(4);
    v << a, b, c, d;
    return v;
}

inline Vector qubit(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

inline const double kSqrt2 = std::sqrt(2.0);
inline const double kSqrt3 = std::sqrt(3.0);
inline const double kSqrt6 = std::sqrt(6.0);
inline const double kQuart3 = std::pow(3.0, 0.25); // 3^{1/4}

/// The three orthogonal states of the worked example (unnormalized).
inline std::vector<Vector> states() {
    return {
        two_qubit(1, 0, 0, 0),
        two_qubit(0, 2, -(kSqrt3 + 1), -kSqrt6 * kQuart3),
        two_qubit(0, 2, -(kSqrt3 - 1), kSqrt2 * kQuart3),
    };
}

/// The unique (up to phase) state orthogonal to all three (unnormalized).
inline Vector orthogonal_state() {
    return two_qubit(0, 2 * kQuart3, kQuart3 * (kSqrt3 + 1), -kSqrt2);
}

/// Per-party factors of the six product states psi11, psi12, psi21, psi22, psi31, psi32.
inline std::vector<std::pair<Vector, Vector>> product_factors() {
    return {
        {qubit(1, 0), qubit(1, 0)},
        {qubit(kSqrt2 * kQuart3, -1), qubit(kQuart3 * (kSqrt3 + 1), -kSqrt2)},
        {qubit(kQuart3, -kSqrt2), qubit(0, 1)},
        {qubit(0, 1), qubit(kQuart3 * (kSqrt3 + 1), kSqrt2)},
        {qubit(kQuart3 * kSqrt3, kSqrt2), qubit(0, 1)},
        {qubit(0, 1), qubit(kQuart3 * kSqrt3 * kSqrt2, -(kSqrt3 + 1))},
    };
}

inline std::vector<std::string> product_names() {
    return {"psi11", "psi12", "psi21", "psi22", "psi31", "psi32"};
}

} // namespace kkb

inline PartitionedSpace two_qubits() { return PartitionedSpace({2, 2}); }

inline Ensemble bell_states() {
    const double r = 1.0 / std::sqrt(2.0);
    return Ensemble::pure(two_qubits(),
                          {kkb::two_qubit(r, 0, 0, r), kkb::two_qubit(r, 0, 0, -r),
                           kkb::two_qubit(0, r, r, 0), kkb::two_qubit(0, r, -r, 0)},
                          {"phi+", "phi-", "psi+", "psi-"});
}

inline Ensemble kkb15_states() {
    return Ensemble::pure(two_qubits(), kkb::states(), {"psi1", "psi2", "psi3"});
}

inline Ensemble kkb15_products() {
    std::vector<Vector> v;
    for (const auto &[a, b] : kkb::product_factors()) {
        v.push_back(kron(Vector(a / a.norm()), Vector(b / b.norm())));
    }
    return Ensemble::pure(two_qubits(), v, kkb::product_names());
}

/// Rank-one measurement on the KKB product states with completeness weights;
/// outcomes whose weight is certified zero (psi12) are dropped.
inline Povm kkb15_measurement() {
    const Ensemble p = kkb15_products();
    const auto w = completeness_weights(p.states());
    return weighted_povm(p.states(), w, p.names());
}

inline Ensemble footnote_states() {
    const double r = 1.0 / std::sqrt(2.0);
    return Ensemble::pure(two_qubits(),
                          {kkb::two_qubit(1, 0, 0, 0), kkb::two_qubit(0, 1, 0, 0),
                           kkb::two_qubit(0, 0, r, r), kkb::two_qubit(0, 0, r, -r)},
                          {"00", "01", "1+", "1-"});
}

/// {[0](x)[0], [0](x)[1], [1](x)[+], [1](x)[-]}.
inline Povm footnote_measurement() {
    const Ensemble s = footnote_states();
    return {s.space(), s.states(), s.names()};
}

inline Povm bell_measurement() {
    const Ensemble s = bell_states();
    return {s.space(), s.states(), s.names()};
}

using Builtin = std::variant<Ensemble, Povm>;

inline std::vector<std::string> builtin_names() {
    return {"bell-states",        "bell-states-as-povm",  "kkb15",          "kkb15-products",
            "kkb15-measurement", "footnote-measurement", "footnote-states"};
}

inline Builtin builtin(const std::string &name) {
    if (name == "bell-states") {
        return bell_states();
    }
    if (name == "bell-states-as-povm") {
        return bell_measurement();
    }
    if (name == "kkb15") {
        return kkb15_states();
    }
    if (name == "kkb15-products") {
        return kkb15_products();
    }
    if (name == "kkb15-measurement") {
        return kkb15_measurement();
    }
    if (name == "footnote-measurement") {
        return footnote_measurement();
    }
    if (name == "footnote-states") {
        return footnote_states();
    }
    throw UnknownBuiltinError("unknown builtin '" + name + "'");
}

// ---------------------------------------------------------------------------
// Kernels and product vectors
// ---------------------------------------------------------------------------

/// Orthonormal basis of the joint kernel of the ensemble (null space of sum_mu rho_mu).
inline std::vector<Vector> orthocomplement(const Ensemble &ensemble, double tol = 1e-10) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(ensemble.sum().matrix());
    const RealVector &lam = es.eigenvalues();
    const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
    std::vector<Vector> out;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) <= tol * scale) {
            out.emplace_back(es.eigenvectors().col(i));
        }
    }
    return out;
}

struct KernelProductOptions {
    std::size_t starts = 64;
    std::size_t max_sweeps = 500;
    double sweep_tol = 1e-15;
    double found_tol = 1e-8;
};

/**
 * @brief Closest approach of a unit product vector to a kernel subspace.
 *
 * residual = ||(I - P_K) v|| for the best unit product vector v found; zero
 * iff v lies in the kernel. An empty kernel gives residual 1 and found = false.
 */
struct KernelProductResult {
    std::size_t kernel_dimension = 0;
    bool found = false;
    double residual = 1.0;
    Vector best;                 ///< best unit product vector
    std::vector<Vector> factors; ///< its per-party unit factors
    std::size_t starts = 0;
};

namespace detail {

inline Vector kron_all(const std::vector<Vector> &v) {
    Vector out = v.front();
    for (std::size_t p = 1; p < v.size(); ++p) {
        out = kron(out, v[p]);
    }
    return out;
}

} // namespace detail

inline KernelProductResult kernel_product_search(const std::vector<Vector> &kernel,
                                                 const PartitionedSpace &space, std::uint64_t seed,
                                                 const KernelProductOptions &opts = {}) {
    KernelProductResult out;
    out.kernel_dimension = kernel.size();
    out.starts = opts.starts;
    if (kernel.empty()) {
        return out;
    }
    const auto d = static_cast<Eigen::Index>(space.dim());
    Matrix k(d, static_cast<Eigen::Index>(kernel.size()));
    for (std::size_t i = 0; i < kernel.size(); ++i) {
        k.col(static_cast<Eigen::Index>(i)) = kernel[i];
    }
    const Matrix proj = k * k.adjoint();
    const auto residual_of = [&](const Vector &v) { return (v - proj * v).norm(); };

    for (std::size_t st = 0; st < opts.starts; ++st) {
        Rng rng = task_rng(seed, st);
        std::vector<Vector> f;
        for (std::size_t p = 0; p < space.parties(); ++p) {
            f.push_back(random_unit_vector(rng, static_cast<Eigen::Index>(space.party_dim(p))));
        }
        double last = std::numeric_limits<double>::infinity();
        for (std::size_t sweep = 0; sweep < opts.max_sweeps; ++sweep) {
            for (std::size_t p = 0; p < space.parties(); ++p) {
                const auto dp = static_cast<Eigen::Index>(space.party_dim(p));
                Matrix w(d, dp);
                for (Eigen::Index i = 0; i < dp; ++i) {
                    auto g = f;
                    g[p] = Vector::Unit(dp, i);
                    w.col(i) = detail::kron_all(g);
                }
                const Matrix m = w.adjoint() * proj * w;
                Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m));
                f[p] = es.eigenvectors().col(dp - 1);
            }
            const double r = residual_of(detail::kron_all(f));
            if (last - r <= opts.sweep_tol) {
                last = std::min(last, r);
                break;
            }
            last = r;
        }
        if (last < out.residual || out.best.size() == 0) {
            out.residual = last;
            out.factors = f;
            out.best = detail::kron_all(f);
        }
    }
    out.found = out.residual <= opts.found_tol;
    return out;
}

inline KernelProductResult kernel_product_search(const Ensemble &ensemble, std::uint64_t seed,
                                                 const KernelProductOptions &opts = {}) {
    return kernel_product_search(orthocomplement(ensemble), ensemble.space(), seed, opts);
}

// ---------------------------------------------------------------------------
// Discrimination partitions
// ---------------------------------------------------------------------------

/**
 * @brief Assignment of outcomes to the states they respond to.
 *
 * ok = false when some outcome responds to two states (conflict holds the
 * outcome and the two state indices); such a POVM cannot discriminate
 * perfectly. Outcomes that respond to no state are left unassigned.
 */
struct DiscriminationPartition {
    bool ok = true;
    std::vector<std::optional<std::size_t>> assignment; ///< per outcome
    std::vector<std::vector<std::size_t>> sets;         ///< per state: J_mu
    struct Conflict {
        std::size_t outcome = 0;
        std::size_t first = 0;
        std::size_t second = 0;
    };
    std::optional<Conflict> conflict;
};

inline DiscriminationPartition discrimination_partition(const Povm &povm, const Ensemble &ensemble,
                                                        double tol = kDiscriminationTol) {
    if (!(povm.space() == ensemble.space())) {
        throw DimensionError("discrimination_partition: POVM on " + povm.space().to_string() +
                             ", ensemble on " + ensemble.space().to_string());
    }
    DiscriminationPartition out;
    out.assignment.assign(povm.size(), std::nullopt);
    out.sets.assign(ensemble.size(), {});
    for (std::size_t j = 0; j < povm.size(); ++j) {
        for (std::size_t m = 0; m < ensemble.size(); ++m) {
            const double p = (povm[j].matrix() * ensemble.states()[m].matrix()).trace().real();
            if (p <= tol) {
                continue;
            }
            if (out.assignment[j]) {
                out.ok = false;
                out.conflict = DiscriminationPartition::Conflict{j, *out.assignment[j], m};
                return out;
            }
            out.assignment[j] = m;
        }
        if (out.assignment[j]) {
            out.sets[*out.assignment[j]].push_back(j);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Normalized-path certificate
// ---------------------------------------------------------------------------

/// The normalization sum_mu Tr(Pi rho_mu) vanished somewhere along the path.
class VanishingDenominatorError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

struct Prop1Options {
    double normalization_tol = 1e-10;
    double orthogonality_tol = 1e-8;
    double product_tol = 1e-8;
    double psd_tol = 1e-10;
    double endpoint_tol = 1e-8;
    double continuity_tol = 0.05;
    double denominator_floor = 1e-14;
};

struct Prop1Sample {
    double s = 0.0;
    HermitianOperator r;
    double f = 0.0;                ///< max_mu Tr(R rho_mu)
    double normalization = 0.0;    ///< sum_mu Tr(R rho_mu)
    double max_cross_overlap = 0.0; ///< max_{mu != nu} |Tr(R rho_mu R rho_nu)|
    double product_residual = 0.0;
    double min_eigenvalue = 0.0;
};

/**
 * @brief R(s) = Pi(s) / sum_mu Tr(Pi(s) rho_mu) along a path, with the
 * conditions a continuous discrimination sweep must meet: normalization,
 * pairwise orthogonality Tr(R rho_mu R rho_nu) = 0, PSD product form,
 * f(start) = 1/N, f(end) = 1, and no jump in f above continuity_tol.
 */
struct Prop1Certificate {
    std::vector<Prop1Sample> sweep;
    std::size_t states = 0;
    bool normalized = true;
    bool orthogonal = true;
    bool product = true;
    bool psd = true;
    bool f_start_ok = false;
    bool f_end_ok = false;
    bool continuous = true;
    double f_start = 0.0;
    double f_end = 0.0;
    double max_f_gap = 0.0;
    double max_cross_overlap = 0.0;
    double max_product_residual = 0.0;

    [[nodiscard]] bool passed() const {
        return !sweep.empty() && normalized && orthogonal && product && psd && f_start_ok &&
               f_end_ok && continuous;
    }
};

inline Prop1Certificate prop1_certificate(const OperatorPath &path, const Ensemble &ensemble,
                                          const Prop1Options &opts = {}) {
    if (path.points.empty()) {
        throw std::invalid_argument("prop1_certificate: empty path");
    }
    if (!(path.points.front().op.space() == ensemble.space())) {
        throw DimensionError("prop1_certificate: path on " +
                             path.points.front().op.space().to_string() + ", ensemble on " +
                             ensemble.space().to_string());
    }
    Prop1Certificate cert;
    const std::size_t n = ensemble.size();
    cert.states = n;
    const auto &rho = ensemble.states();
    for (std::size_t i = 0; i < path.points.size(); ++i) {
        const auto &pt = path.points[i];
        double den = 0.0;
        for (const auto &r : rho) {
            den += (pt.op.matrix() * r.matrix()).trace().real();
        }
        if (!(den > opts.denominator_floor)) {
            throw VanishingDenominatorError("prop1_certificate: sum_mu Tr(Pi rho_mu) vanishes at sample " +
                                            std::to_string(i));
        }
        HermitianOperator r = pt.op;
        r *= 1.0 / den;
        Prop1Sample smp{pt.s, r, 0.0, 0.0, 0.0, 0.0, r.min_eigenvalue()};
        std::vector<Matrix> rr;
        for (const auto &rm : rho) {
            const Matrix m = r.matrix() * rm.matrix();
            const double p = m.trace().real();
            smp.normalization += p;
            smp.f = std::max(smp.f, p);
            rr.push_back(m);
        }
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                smp.max_cross_overlap =
                    std::max(smp.max_cross_overlap, std::abs((rr[a] * rr[b]).trace()));
            }
        }
        smp.product_residual = detail::certified_product_residual(pt, opts.product_tol * den) / den;
        cert.normalized = cert.normalized && std::abs(smp.normalization - 1.0) <= opts.normalization_tol;
        cert.orthogonal = cert.orthogonal && smp.max_cross_overlap <= opts.orthogonality_tol;
        cert.product = cert.product && smp.product_residual <= opts.product_tol;
        cert.psd = cert.psd && smp.min_eigenvalue >= -opts.psd_tol;
        cert.max_cross_overlap = std::max(cert.max_cross_overlap, smp.max_cross_overlap);
        cert.max_product_residual = std::max(cert.max_product_residual, smp.product_residual);
        if (!cert.sweep.empty()) {
            cert.max_f_gap = std::max(cert.max_f_gap, std::abs(smp.f - cert.sweep.back().f));
        }
        cert.sweep.push_back(std::move(smp));
    }
    cert.f_start = cert.sweep.front().f;
    cert.f_end = cert.sweep.back().f;
    cert.f_start_ok = std::abs(cert.f_start - 1.0 / static_cast<double>(n)) <= opts.endpoint_tol;
    cert.f_end_ok = std::abs(cert.f_end - 1.0) <= opts.endpoint_tol;
    cert.continuous = cert.max_f_gap <= opts.continuity_tol;
    return cert;
}

} // namespace locc
