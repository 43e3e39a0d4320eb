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
 * Operator-valued paths: sampled points with membership and product
 * certificates, distances to outcome segments (0, E], and path verification.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "operator.hpp"
#include "product.hpp"
#include "zonotope.hpp"

namespace locc {

/**
 * @brief One sample of a path.
 *
 * `coefficients` (indexed by the zonotope's original generators) certify
 * membership; `factors`, when present, certify the product form with
 * product_residual = ||operator - factors[0] (x) ... ||_F.
 */
struct PathPoint {
    HermitianOperator op;
    double s = 0.0;
    std::vector<double> coefficients;
    double product_residual = 0.0;
    double membership_residual = 0.0;
    std::vector<Matrix> factors; ///< unnormalized; empty when not known
    std::size_t acting_party = 0; ///< party changed on the step into this point
    bool has_acting_party = false;
};

/**
 * @brief Points ordered by decreasing s, starting at the identity (s = D)
 * and ending near endpoint_scale * target.
 */
struct OperatorPath {
    std::vector<PathPoint> points;
    double endpoint_scale = 0.0;
    std::size_t target_index = 0;
    std::string target_label;
};

struct SegmentDistance {
    double q = 0.0;        ///< minimizing scale
    double distance = 0.0; ///< min_q ||X - q E||_1
    double relative = 0.0; ///< distance / Tr X (infinity for Tr X <= 0)
};

/**
 * @brief Trace-norm distance from X to the ray {q E : q >= 0}, with the
 * minimizing q. The objective is convex in q; golden-section search.
 */
inline SegmentDistance segment_distance(const Matrix &x, const Matrix &e) {
    const double tx = x.trace().real();
    const double te = e.trace().real();
    SegmentDistance out;
    auto f = [&](double q) { return trace_norm(Matrix(x - q * e)); };
    if (!(te > 0.0)) {
        out.distance = f(0.0);
    } else {
        double lo = 0.0;
        double hi = std::max(2.0 * std::abs(tx), trace_norm(x)) / te + 1e-300;
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = hi - g * (hi - lo);
        double b = lo + g * (hi - lo);
        double fa = f(a);
        double fb = f(b);
        for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
            if (fa <= fb) {
                hi = b;
                b = a;
                fb = fa;
                a = hi - g * (hi - lo);
                fa = f(a);
            } else {
                lo = a;
                a = b;
                fa = fb;
                b = lo + g * (hi - lo);
                fb = f(b);
            }
        }
        out.q = 0.5 * (lo + hi);
        out.distance = f(out.q);
        const double f0 = f(0.0);
        if (f0 <= out.distance) {
            out.q = 0.0;
            out.distance = f0;
        }
    }
    out.relative = tx > 0.0 ? out.distance / tx : std::numeric_limits<double>::infinity();
    return out;
}

inline SegmentDistance segment_distance(const HermitianOperator &x, const HermitianOperator &e) {
    x.require_same_space(e);
    return segment_distance(x.matrix(), e.matrix());
}

struct VerifyOptions {
    double product_tol = 1e-8;
    double membership_tol = kMembershipTol;
    double psd_tol = 1e-10;
    double lipschitz_tol = 1e-8;
    double monotone_tol = 1e-10;
    double step_cap = std::numeric_limits<double>::infinity();
    /// When set, the last point must lie within endpoint_tol * Tr of (0, target].
    std::optional<HermitianOperator> target;
    double endpoint_tol = 1e-6;
    /// With a target: bound on the change of relative segment distance per step.
    /// Absolute step caps shrink to nothing near 0, so this keeps a discretized
    /// path from hopping onto the segment through the region around 0.
    double max_relative_jump = std::numeric_limits<double>::infinity();
};

/**
 * @brief Outcome of verify_path. Failure lists hold point indices (for pair
 * checks, the index of the first point of the pair).
 */
struct PathReport {
    std::size_t points = 0;
    std::vector<std::size_t> psd_failures;
    std::vector<std::size_t> product_failures;
    std::vector<std::size_t> membership_failures;
    std::vector<std::size_t> monotone_failures;
    std::vector<std::size_t> step_failures;
    std::vector<std::size_t> lipschitz_failures;
    std::vector<std::size_t> relative_jump_failures;
    double min_eigenvalue = std::numeric_limits<double>::infinity();
    double max_product_residual = 0.0;
    double max_membership_residual = 0.0;
    double max_step = 0.0;
    double max_lipschitz_gap = 0.0;
    double max_relative_jump = 0.0;
    bool endpoint_checked = false;
    bool endpoint_ok = true;
    double endpoint_relative_distance = 0.0;
    double endpoint_scale = 0.0;

    [[nodiscard]] bool passed() const {
        return points > 0 && psd_failures.empty() && product_failures.empty() &&
               membership_failures.empty() && monotone_failures.empty() && step_failures.empty() &&
               lipschitz_failures.empty() && relative_jump_failures.empty() && endpoint_ok;
    }
};

namespace detail {

/// Product residual of a point: its own factor certificate if it holds, else nearest_product.
inline double certified_product_residual(const PathPoint &p, double tol) {
    if (p.factors.size() == p.op.space().parties()) {
        bool psd = true;
        for (const auto &f : p.factors) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(f), Eigen::EigenvaluesOnly);
            psd = psd && es.eigenvalues()(0) >= -kPsdTol * std::max(1.0, f.norm());
        }
        if (psd) {
            const double r = (p.op.matrix() -
                              tensor(p.op.space(), std::span<const Matrix>(p.factors)).matrix())
                                 .norm();
            if (r <= tol) {
                return r;
            }
        }
    }
    return nearest_product(p.op).residual;
}

/// Membership residual of a point: its own coefficient certificate if it holds, else contains().
inline double certified_membership_residual(const PathPoint &p, const Zonotope &z, double tol) {
    if (p.coefficients.size() == z.original_size()) {
        const RealVector c = z.compress(p.coefficients);
        const bool boxed = c.size() == 0 || (c.minCoeff() >= 0.0 && c.maxCoeff() <= 1.0);
        if (boxed) {
            const double r = (hermitian_coordinates(p.op) - z.coordinates() * c).norm();
            if (r <= tol) {
                return r;
            }
        }
    }
    const auto m = contains(z, p.op, tol,
                            p.coefficients.size() == z.original_size() ? &p.coefficients : nullptr);
    return m.residual;
}

} // namespace detail

/**
 * @brief Checks a path point by point (PSD, product, membership in z) and
 * pair by pair (non-increasing trace, strictly decreasing s, trace-norm
 * step <= step_cap, and the Lipschitz equality
 * | ||P_i - P_{i+1}||_1 - (Tr P_i - Tr P_{i+1}) | <= lipschitz_tol,
 * which holds exactly when consecutive differences are PSD). With a target,
 * the endpoint and the per-step change of relative segment distance are
 * checked as well.
 *
 * Stored coefficient and factor certificates are accepted when they verify
 * within tolerance; otherwise the residuals are recomputed from scratch.
 */
inline PathReport verify_path(const OperatorPath &path, const Zonotope &z,
                              const VerifyOptions &opts = {}) {
    PathReport r;
    r.points = path.points.size();
    for (std::size_t i = 0; i < path.points.size(); ++i) {
        const auto &p = path.points[i];
        const double lam = p.op.min_eigenvalue();
        r.min_eigenvalue = std::min(r.min_eigenvalue, lam);
        if (lam < -opts.psd_tol) {
            r.psd_failures.push_back(i);
        }
        const double pr = detail::certified_product_residual(p, opts.product_tol);
        r.max_product_residual = std::max(r.max_product_residual, pr);
        if (pr > opts.product_tol) {
            r.product_failures.push_back(i);
        }
        const double mr = detail::certified_membership_residual(p, z, opts.membership_tol);
        r.max_membership_residual = std::max(r.max_membership_residual, mr);
        if (mr > opts.membership_tol) {
            r.membership_failures.push_back(i);
        }
        if (i + 1 < path.points.size()) {
            const auto &n = path.points[i + 1];
            const double t0 = p.op.trace();
            const double t1 = n.op.trace();
            if (t1 > t0 + opts.monotone_tol || !(n.s < p.s)) {
                r.monotone_failures.push_back(i);
            }
            const double step = trace_norm(Matrix(p.op.matrix() - n.op.matrix()));
            r.max_step = std::max(r.max_step, step);
            if (step > opts.step_cap) {
                r.step_failures.push_back(i);
            }
            const double gap = std::abs(step - (t0 - t1));
            r.max_lipschitz_gap = std::max(r.max_lipschitz_gap, gap);
            if (gap > opts.lipschitz_tol) {
                r.lipschitz_failures.push_back(i);
            }
        }
    }
    if (opts.target && path.points.size() > 1 && std::isfinite(opts.max_relative_jump)) {
        double prev = segment_distance(path.points.front().op, *opts.target).relative;
        for (std::size_t i = 0; i + 1 < path.points.size(); ++i) {
            const double next = segment_distance(path.points[i + 1].op, *opts.target).relative;
            const double jump = std::abs(next - prev);
            r.max_relative_jump = std::max(r.max_relative_jump, jump);
            if (!(jump <= opts.max_relative_jump)) {
                r.relative_jump_failures.push_back(i);
            }
            prev = next;
        }
    }
    if (opts.target && !path.points.empty()) {
        const auto sd = segment_distance(path.points.back().op, *opts.target);
        r.endpoint_checked = true;
        r.endpoint_relative_distance = sd.relative;
        r.endpoint_scale = sd.q;
        r.endpoint_ok = sd.relative <= opts.endpoint_tol && sd.q > 0.0;
    }
    return r;
}

} // namespace locc
