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
 * The zonotope Z = sum_j [0, E_j] generated by PSD operators: membership,
 * subset-sum vertices, and directed/Hausdorff distances between zonotopes.
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
#include <vector>

#include "operator.hpp"
#include "povm.hpp"
#include "random.hpp"
#include "solvers/bvls.hpp"

namespace locc {

inline constexpr double kMembershipTol = 1e-8;
inline constexpr std::size_t kVertexCap = 20;

/// Raised when exhaustive vertex enumeration is requested beyond the cap.
class VertexCapError : public std::length_error {
  public:
    using std::length_error::length_error;
};

struct MembershipResult {
    bool feasible = false;
    std::vector<double> coefficients; ///< one per original generator, in [0, 1]
    double residual = 0.0;            ///< ||X - sum_j c_j E_j||_F at the optimum
};

/**
 * @brief Z = { sum_j c_j E_j : 0 <= c_j <= 1 }.
 *
 * Zero generators are dropped on construction; coefficients reported to
 * callers are always indexed by the original generator list.
 */
class Zonotope {
  public:
    explicit Zonotope(const std::vector<HermitianOperator> &generators) {
        if (generators.empty()) {
            throw std::invalid_argument("Zonotope: no generators");
        }
        space_.emplace(generators.front().space());
        original_count_ = generators.size();
        for (std::size_t j = 0; j < generators.size(); ++j) {
            generators[j].require_same_space(generators.front());
            if (generators[j].frobenius_norm() > 0.0) {
                gens_.push_back(generators[j]);
                index_.push_back(j);
            }
        }
        const auto d = static_cast<Eigen::Index>(space_->dim());
        coords_.resize(d * d, static_cast<Eigen::Index>(gens_.size()));
        for (std::size_t k = 0; k < gens_.size(); ++k) {
            coords_.col(static_cast<Eigen::Index>(k)) = hermitian_coordinates(gens_[k]);
        }
    }

    explicit Zonotope(const Povm &povm) : Zonotope(povm.elements()) {}

    [[nodiscard]] const PartitionedSpace &space() const { return *space_; }
    /// Nonzero generators, in original order.
    [[nodiscard]] const std::vector<HermitianOperator> &generators() const { return gens_; }
    [[nodiscard]] std::size_t size() const { return gens_.size(); }
    [[nodiscard]] std::size_t original_size() const { return original_count_; }
    [[nodiscard]] std::size_t original_index(std::size_t k) const { return index_.at(k); }
    /// Real coordinates of the nonzero generators, one column each.
    [[nodiscard]] const RealMatrix &coordinates() const { return coords_; }

    /// sum_k c_k E_k for coefficients over the nonzero generators.
    [[nodiscard]] HermitianOperator point(const RealVector &c) const {
        const RealVector v = coords_ * c;
        return {*space_, from_hermitian_coordinates(v, space_->dim())};
    }

    /// Expands coefficients over nonzero generators to the original indexing.
    [[nodiscard]] std::vector<double> expand(const RealVector &c) const {
        std::vector<double> out(original_count_, 0.0);
        for (std::size_t k = 0; k < gens_.size(); ++k) {
            out[index_[k]] = c(static_cast<Eigen::Index>(k));
        }
        return out;
    }

    /// Restricts original-indexed coefficients to the nonzero generators.
    [[nodiscard]] RealVector compress(const std::vector<double> &c) const {
        RealVector out(static_cast<Eigen::Index>(gens_.size()));
        for (std::size_t k = 0; k < gens_.size(); ++k) {
            out(static_cast<Eigen::Index>(k)) = c.at(index_[k]);
        }
        return out;
    }

  private:
    std::optional<PartitionedSpace> space_;
    std::vector<HermitianOperator> gens_;
    std::vector<std::size_t> index_;
    std::size_t original_count_ = 0;
    RealMatrix coords_;
};

/**
 * @brief Nearest point of Z to a coordinate vector, as box-constrained least
 * squares. Returns coefficients over the nonzero generators.
 */
inline solvers::BvlsResult project_coordinates(const Zonotope &z, const RealVector &target,
                                               const RealVector *warm_start = nullptr) {
    const auto m = static_cast<Eigen::Index>(z.size());
    if (m == 0) {
        solvers::BvlsResult r;
        r.x = RealVector::Zero(0);
        r.residual = target.norm();
        r.converged = true;
        return r;
    }
    return solvers::bvls(z.coordinates(), target, RealVector::Zero(m), RealVector::Ones(m),
                         warm_start);
}

/**
 * @brief Membership of X in Z: min_c ||X - sum c_j E_j||_F over c in [0,1]^m;
 * feasible iff the optimum is at most tol.
 *
 * warm_start, when given, holds coefficients over the original generators.
 */
inline MembershipResult contains(const Zonotope &z, const HermitianOperator &x,
                                 double tol = kMembershipTol,
                                 const std::vector<double> *warm_start = nullptr) {
    if (!(x.space() == z.space())) {
        throw DimensionError("contains: operator lives on " + x.space().to_string() +
                             ", zonotope on " + z.space().to_string());
    }
    RealVector warm;
    if (warm_start != nullptr) {
        warm = z.compress(*warm_start);
    }
    const auto r = project_coordinates(z, hermitian_coordinates(x),
                                       warm_start != nullptr ? &warm : nullptr);
    MembershipResult out;
    out.coefficients = z.expand(r.x);
    out.residual = r.residual;
    out.feasible = r.residual <= tol;
    return out;
}

/// Subset sum sum_{k in mask} E_k over the nonzero generators, as coordinates.
inline RealVector subset_sum(const Zonotope &z, std::uint64_t mask) {
    RealVector v = RealVector::Zero(z.coordinates().rows());
    for (std::size_t k = 0; k < z.size(); ++k) {
        if ((mask >> k) & 1U) {
            v += z.coordinates().col(static_cast<Eigen::Index>(k));
        }
    }
    return v;
}

/**
 * @brief All 2^m subset sums of the generators, deduplicated within `dedup_tol`
 * (Frobenius). Order: first occurrence in increasing subset mask.
 */
inline std::vector<HermitianOperator> vertices(const Zonotope &z, std::size_t cap = kVertexCap,
                                               double dedup_tol = 1e-10) {
    if (z.size() > cap) {
        throw VertexCapError("vertices: " + std::to_string(z.size()) +
                             " generators exceed the cap of " + std::to_string(cap));
    }
    const std::uint64_t count = std::uint64_t{1} << z.size();
    std::vector<RealVector> pts;
    pts.reserve(count);
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        pts.push_back(subset_sum(z, mask));
    }
    // Sweep in order of the first coordinate; duplicates lie within dedup_tol.
    std::vector<std::size_t> order(pts.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pts[a](0) < pts[b](0) || (pts[a](0) == pts[b](0) && a < b);
    });
    std::vector<char> keep(pts.size(), 1);
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (!keep[order[i]]) {
            continue;
        }
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            if (pts[order[j]](0) - pts[order[i]](0) > dedup_tol) {
                break;
            }
            if (keep[order[j]] && (pts[order[j]] - pts[order[i]]).norm() <= dedup_tol) {
                // keep the lower mask
                const std::size_t lo = std::min(order[i], order[j]);
                const std::size_t hi = std::max(order[i], order[j]);
                keep[hi] = 0;
                if (lo != order[i]) {
                    break;
                }
            }
        }
    }
    std::vector<HermitianOperator> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (keep[i]) {
            out.emplace_back(z.space(), from_hermitian_coordinates(pts[i], z.space().dim()));
        }
    }
    return out;
}

enum class DistanceNorm { Trace, Frobenius };
enum class DistanceMethod { Vertex, Sampled };

inline std::string to_string(DistanceNorm n) { return n == DistanceNorm::Trace ? "trace" : "frobenius"; }
inline std::string to_string(DistanceMethod m) { return m == DistanceMethod::Vertex ? "vertex" : "sampled"; }

struct DistanceOptions {
    DistanceNorm norm = DistanceNorm::Trace;
    DistanceMethod method = DistanceMethod::Vertex;
    std::size_t samples = 4096;    ///< random coefficient vectors (sampled method)
    std::size_t subset_size = 10;  ///< generators whose subset sums are added (sampled method)
    std::uint64_t seed = 0;
    std::size_t vertex_cap = kVertexCap;
    std::size_t threads = 1;
};

/**
 * @brief sup_{z1 in Z1} inf_{z2 in Z2} ||z1 - z2||.
 *
 * Inner problems are Frobenius projections. For the trace norm, `value` is
 * the exact trace norm of the Frobenius-optimal difference at the maximizing
 * point: an upper bound on the true inner trace distance at that point,
 * while `frobenius` is a lower bound on it (||Y||_1 >= ||Y||_F) and
 * sqrt(D) * frobenius bounds it from above.
 */
struct DirectedDistance {
    double value = 0.0;
    double frobenius = 0.0;
    double trace_upper_bound = 0.0; ///< sqrt(D) * frobenius
    DistanceNorm norm = DistanceNorm::Trace;
    DistanceMethod method = DistanceMethod::Vertex;
    bool certified = false; ///< true when every extreme point of Z1 was examined
    std::size_t points_examined = 0;
};

namespace detail {

struct PointScore {
    double frobenius = 0.0;
    double trace = 0.0;
};

inline PointScore score_point(const Zonotope &z2, const RealVector &p, bool want_trace) {
    const auto r = project_coordinates(z2, p);
    PointScore s;
    s.frobenius = r.residual;
    if (want_trace) {
        const RealVector diff = p - (z2.size() ? RealVector(z2.coordinates() * r.x)
                                               : RealVector::Zero(p.size()));
        s.trace = trace_norm(from_hermitian_coordinates(diff, z2.space().dim()));
    }
    return s;
}

} // namespace detail

inline DirectedDistance directed_distance(const Zonotope &z1, const Zonotope &z2,
                                          const DistanceOptions &opts = {}) {
    if (!(z1.space() == z2.space())) {
        throw DimensionError("directed_distance: zonotopes live on different spaces");
    }
    const bool want_trace = opts.norm == DistanceNorm::Trace;
    std::vector<RealVector> pts;
    DirectedDistance out;
    out.norm = opts.norm;
    out.method = opts.method;

    if (opts.method == DistanceMethod::Vertex) {
        if (z1.size() > opts.vertex_cap) {
            throw VertexCapError("directed_distance: " + std::to_string(z1.size()) +
                                 " generators exceed the vertex cap of " +
                                 std::to_string(opts.vertex_cap) + "; use the sampled method");
        }
        const std::uint64_t count = std::uint64_t{1} << z1.size();
        pts.reserve(count);
        for (std::uint64_t mask = 0; mask < count; ++mask) {
            pts.push_back(subset_sum(z1, mask));
        }
        out.certified = true;
    } else {
        Rng pick = task_rng(opts.seed, 0);
        std::vector<std::size_t> ids(z1.size());
        for (std::size_t k = 0; k < ids.size(); ++k) {
            ids[k] = k;
        }
        std::shuffle(ids.begin(), ids.end(), pick);
        ids.resize(std::min(ids.size(), opts.subset_size));
        const std::uint64_t count = std::uint64_t{1} << ids.size();
        for (std::uint64_t mask = 0; mask < count; ++mask) {
            std::uint64_t full = 0;
            for (std::size_t b = 0; b < ids.size(); ++b) {
                if ((mask >> b) & 1U) {
                    full |= std::uint64_t{1} << ids[b];
                }
            }
            pts.push_back(subset_sum(z1, full));
        }
        for (std::size_t i = 0; i < opts.samples; ++i) {
            Rng rng = task_rng(opts.seed, i + 1);
            RealVector c(static_cast<Eigen::Index>(z1.size()));
            for (Eigen::Index k = 0; k < c.size(); ++k) {
                c(k) = uniform01(rng);
            }
            pts.emplace_back(z1.coordinates() * c);
        }
        out.certified = false;
    }

    std::vector<detail::PointScore> scores(pts.size());
    parallel_for(pts.size(), opts.threads, [&](std::size_t i) {
        scores[i] = detail::score_point(z2, pts[i], want_trace);
    });
    for (const auto &s : scores) {
        out.frobenius = std::max(out.frobenius, s.frobenius);
        if (want_trace) {
            out.value = std::max(out.value, s.trace);
        }
    }
    if (!want_trace) {
        out.value = out.frobenius;
    }
    out.trace_upper_bound = std::sqrt(static_cast<double>(z1.space().dim())) * out.frobenius;
    out.points_examined = pts.size();
    return out;
}

struct HausdorffReport {
    DirectedDistance d12;
    DirectedDistance d21;
    double hausdorff = 0.0;
    DistanceNorm norm = DistanceNorm::Trace;
    DistanceMethod method = DistanceMethod::Vertex;
    bool certified = false;
};

inline HausdorffReport hausdorff(const Zonotope &z1, const Zonotope &z2,
                                 const DistanceOptions &opts = {}) {
    HausdorffReport r;
    r.d12 = directed_distance(z1, z2, opts);
    r.d21 = directed_distance(z2, z1, opts);
    r.hausdorff = std::max(r.d12.value, r.d21.value);
    r.norm = opts.norm;
    r.method = opts.method;
    r.certified = r.d12.certified && r.d21.certified;
    return r;
}

} // namespace locc
