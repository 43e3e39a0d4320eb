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
 * Product operators inside a zonotope: sampling, continuation search for
 * monotonic product paths from the identity to an outcome segment (0, E],
 * and probes for isolated segments.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "operator.hpp"
#include "path.hpp"
#include "product.hpp"
#include "random.hpp"
#include "zonotope.hpp"

namespace locc {

/// Raised when a path target is not proportional to any generator.
class PathTargetError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Original index of the first generator proportional to `target`.
inline std::size_t find_generator(const Zonotope &z, const HermitianOperator &target,
                                  double tol = kProportionalityTol) {
    for (std::size_t k = 0; k < z.size(); ++k) {
        if (proportional(z.generators()[k], target, tol)) {
            return z.original_index(k);
        }
    }
    throw PathTargetError("target is not proportional to any generator of the zonotope");
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

using OperatorFilter = std::function<bool(const HermitianOperator &)>;

struct SamplerOptions {
    double product_tol = 1e-6;
    double membership_tol = kMembershipTol;
    /// Alternating-projection refinements for zonotope-first samples (0 = none).
    std::size_t ap_iterations = 0;
    std::size_t bisection_steps = 40;
    double dedup_tol = 1e-10;
    std::size_t threads = 1;
    /// Optional acceptance filter; should be invariant under positive scaling.
    OperatorFilter filter;
};

namespace detail {

/// Sum of generator traces: no point of Z has a larger trace.
inline double max_trace(const Zonotope &z) {
    double t = 0.0;
    for (const auto &g : z.generators()) {
        t += g.trace();
    }
    return t;
}

/// True when P lies in the cone generated by Z (relative residual <= tol).
inline bool in_cone(const Zonotope &z, const RealVector &p, double tol) {
    const auto m = static_cast<Eigen::Index>(z.size());
    if (m == 0) {
        return p.norm() == 0.0;
    }
    const auto r = solvers::bvls(z.coordinates(), p, RealVector::Zero(m),
                                 RealVector::Constant(m, std::numeric_limits<double>::infinity()));
    return r.residual <= tol * std::max(p.norm(), 1e-300);
}

/// Largest t in [0, t_hi] with t * P in Z (bisection; Z is convex and contains 0).
inline std::optional<PathPoint> max_scale_point(const Zonotope &z, const HermitianOperator &p,
                                                const std::vector<Matrix> &factors, double t_hi,
                                                const SamplerOptions &opts) {
    const RealVector pc = hermitian_coordinates(p);
    double lo = 0.0;
    double hi = t_hi;
    RealVector best_c;
    double best_res = 0.0;
    RealVector warm;
    for (std::size_t it = 0; it < opts.bisection_steps; ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto r = project_coordinates(z, RealVector(mid * pc), warm.size() ? &warm : nullptr);
        if (r.residual <= opts.membership_tol) {
            lo = mid;
            best_c = r.x;
            best_res = r.residual;
            warm = r.x;
        } else {
            hi = mid;
        }
    }
    if (lo <= 0.0) {
        return std::nullopt;
    }
    PathPoint pt{p, 0.0, {}, 0.0, 0.0, {}, 0, false};
    pt.op *= lo;
    pt.s = pt.op.trace();
    pt.coefficients = z.expand(best_c);
    pt.membership_residual = best_res;
    pt.factors = factors;
    pt.factors[0] *= lo;
    return pt;
}

/// Alternating projections between the PSD product set and Z, to stagnation.
struct ApResult {
    RealVector c; ///< zonotope coefficients of the final iterate
    HermitianOperator y;
    double product_residual = 0.0;
    double membership_residual = 0.0;
    ProductFactorization factorization;
    std::size_t iterations = 0;
};

inline ApResult alternating_projection(const Zonotope &z, const HermitianOperator &start,
                                       std::size_t max_iterations, double stagnation = 1e-15) {
    HermitianOperator y = start;
    RealVector c;
    double mres = 0.0;
    {
        const auto r = project_coordinates(z, hermitian_coordinates(y));
        c = r.x;
        mres = r.residual;
        y = z.point(c);
    }
    ProductFactorization pf = nearest_product(y);
    std::size_t it = 0;
    for (; it < max_iterations; ++it) {
        if (pf.residual == 0.0) {
            break;
        }
        const HermitianOperator p = product_operator(y.space(), pf);
        const auto r = project_coordinates(z, hermitian_coordinates(p), &c);
        const HermitianOperator next = z.point(r.x);
        const double move = (next.matrix() - y.matrix()).norm();
        y = next;
        c = r.x;
        mres = 0.0;
        pf = nearest_product(y);
        if (move <= stagnation * (1.0 + y.frobenius_norm())) {
            ++it;
            break;
        }
    }
    return {c, y, pf.residual, mres, pf, it};
}

inline std::vector<PathPoint> dedup_points(std::vector<PathPoint> pts, double tol) {
    std::vector<RealVector> coords;
    coords.reserve(pts.size());
    for (const auto &p : pts) {
        coords.push_back(hermitian_coordinates(p.op));
    }
    std::vector<std::size_t> order(pts.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto &x = coords[a];
        const auto &y = coords[b];
        for (Eigen::Index k = 0; k < x.size(); ++k) {
            if (x(k) != y(k)) {
                return x(k) < y(k);
            }
        }
        return a < b;
    });
    std::vector<PathPoint> out;
    const RealVector *last = nullptr;
    for (std::size_t idx : order) {
        if (last != nullptr && (coords[idx] - *last).norm() <= tol) {
            continue;
        }
        out.push_back(std::move(pts[idx]));
        last = &coords[idx];
    }
    return out;
}

inline std::vector<Matrix> random_product_factors(Rng &rng, const PartitionedSpace &space) {
    std::vector<Matrix> f;
    for (std::size_t p = 0; p < space.parties(); ++p) {
        const auto d = static_cast<Eigen::Index>(space.party_dim(p));
        const auto rank = 1 + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(d));
        Matrix a = random_psd(rng, d, rank);
        a /= a.trace().real();
        f.push_back(std::move(a));
    }
    return f;
}

} // namespace detail

/**
 * @brief Product operators in Z found by two interleaved strategies.
 *
 * Even attempts draw random PSD product directions and scale them as far as
 * membership allows; odd attempts draw random coefficients c and keep
 * sum_j c_j E_j when it is product (optionally after alternating-projection
 * refinement). Deterministic for a fixed seed; deduplicated.
 */
inline std::vector<PathPoint> sample_products_in_zonotope(const Zonotope &z, std::size_t n,
                                                          std::uint64_t seed,
                                                          const SamplerOptions &opts = {}) {
    const auto &space = z.space();
    const double t_hi = detail::max_trace(z);
    std::vector<std::optional<PathPoint>> slots(n);
    parallel_for(n, opts.threads, [&](std::size_t i) {
        Rng rng = task_rng(seed, i);
        if (i % 2 == 0) {
            const auto f = detail::random_product_factors(rng, space);
            const HermitianOperator p = tensor(space, std::span<const Matrix>(f));
            if (!detail::in_cone(z, hermitian_coordinates(p), opts.membership_tol)) {
                return;
            }
            if (opts.filter && !opts.filter(p)) {
                return;
            }
            slots[i] = detail::max_scale_point(z, p, f, t_hi / p.trace(), opts);
            return;
        }
        RealVector c(static_cast<Eigen::Index>(z.size()));
        for (Eigen::Index k = 0; k < c.size(); ++k) {
            c(k) = uniform01(rng);
        }
        if ((i / 2) % 4 == 0 && c.size() > 0) {
            // every fourth coefficient draw is supported on a single generator
            const auto keep = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(c.size()));
            const double v = c(keep);
            c.setZero();
            c(keep) = v;
        }
        HermitianOperator x = z.point(c);
        ProductFactorization pf = nearest_product(x);
        double mres = 0.0;
        if (pf.residual > opts.product_tol && opts.ap_iterations > 0) {
            auto ap = detail::alternating_projection(z, x, opts.ap_iterations);
            x = ap.y;
            c = ap.c;
            pf = ap.factorization;
            mres = ap.membership_residual;
        }
        if (pf.residual > opts.product_tol || !(x.trace() > 1e-12)) {
            return;
        }
        if (opts.filter && !opts.filter(x)) {
            return;
        }
        PathPoint pt{x, x.trace(), z.expand(c), pf.residual, mres, pf.factors, 0, false};
        pt.factors[0] *= pf.scale;
        slots[i] = std::move(pt);
    });
    std::vector<PathPoint> pts;
    for (auto &s : slots) {
        if (s) {
            pts.push_back(std::move(*s));
        }
    }
    return detail::dedup_points(std::move(pts), opts.dedup_tol);
}

// ---------------------------------------------------------------------------
// Path search
// ---------------------------------------------------------------------------

struct PathSearchOptions {
    double s_step = 0.0;   ///< trace decrement per step; 0 selects D / 200
    double step_cap = 0.0; ///< trace-norm cap per step; 0 selects 4 * s_step
    std::size_t restarts = 4;
    std::uint64_t seed = 0;
    double product_tol = 1e-8;
    double membership_tol = kMembershipTol;
    double endpoint_tol = 1e-6; ///< relative: min_q ||X - qE||_1 <= endpoint_tol * Tr X
    /// Largest change of relative segment distance allowed per step.
    double max_relative_jump = 0.1;
    double restart_perturbation = 0.05;
    std::size_t corrector_iterations = 100;
    std::size_t stall_samples = 256;
    std::size_t max_steps = 0; ///< 0 selects 20 * D / s_step
    std::size_t threads = 1;
};

/**
 * @brief Why a search stopped short: per-restart lowest trace reached and
 * best relative distance to the target segment, plus the number of product
 * points sampled near the final stall point. Heuristic evidence, not proof.
 */
struct ObstructionReport {
    std::size_t target_index = 0;
    std::string target_label;
    std::vector<double> lowest_s_per_restart;
    std::vector<double> best_relative_distance_per_restart;
    std::size_t stall_neighborhood_hits = 0;
    std::size_t stall_samples = 0;
    double stall_radius = 0.0;
    bool heuristic = true;
};

struct PathSearchResult {
    bool found = false;
    OperatorPath path;            ///< valid when found
    ObstructionReport obstruction; ///< filled when not found
    std::size_t restarts_used = 0;
    PathReport verification;       ///< verify_path of the returned path
};

namespace detail {

struct TraceOutcome {
    std::vector<PathPoint> points;
    bool reached = false;
    double best_relative = std::numeric_limits<double>::infinity();
};

/// max mu >= 0 with A - mu T PSD (0 when T leaves the support of A).
inline double max_subtractable(const Matrix &a, const Matrix &t) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(a));
    const RealVector &lam = es.eigenvalues();
    const double top = std::max(lam.maxCoeff(), 0.0);
    if (top <= 0.0) {
        return 0.0;
    }
    const double cut = 1e-12 * top;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) > cut) {
            keep.push_back(i);
        }
    }
    const Matrix tt = es.eigenvectors().adjoint() * t * es.eigenvectors();
    double outside = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) <= cut) {
            outside += std::abs(tt(i, i));
        }
    }
    if (outside > 1e-12 * std::max(1.0, t.norm())) {
        return 0.0;
    }
    const auto k = static_cast<Eigen::Index>(keep.size());
    Matrix w(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) {
            w(i, j) = tt(keep[i], keep[j]) / std::sqrt(lam(keep[i]) * lam(keep[j]));
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> ws(hermitian_part(w), Eigen::EigenvaluesOnly);
    const double wmax = ws.eigenvalues().maxCoeff();
    return wmax > 0.0 ? 1.0 / wmax : 0.0;
}

class PathTracer {
  public:
    PathTracer(const Zonotope &z, const HermitianOperator &target, std::vector<Matrix> target_factors,
               const PathSearchOptions &opts)
        : z_(z), target_(target), tf_(std::move(target_factors)), o_(opts) {}

    TraceOutcome run(Rng &rng) {
        const auto &space = z_.space();
        TraceOutcome out;
        std::vector<Matrix> f;
        for (std::size_t p = 0; p < space.parties(); ++p) {
            const auto d = static_cast<Eigen::Index>(space.party_dim(p));
            f.emplace_back(Matrix::Identity(d, d));
        }
        PathPoint cur{HermitianOperator::identity(space), 0.0, {}, 0.0, 0.0, f, 0, false};
        cur.s = cur.op.trace();
        const auto m0 = contains(z_, cur.op, o_.membership_tol);
        if (!m0.feasible) {
            // the identity is not in Z: nothing to trace
            out.points.push_back(cur);
            return out;
        }
        cur.coefficients = m0.coefficients;
        cur.membership_residual = m0.residual;
        double delta = segment_distance(cur.op, target_).relative;
        out.best_relative = delta;
        out.points.push_back(cur);

        for (std::size_t step = 0; step < o_.max_steps; ++step) {
            if (delta <= o_.endpoint_tol) {
                out.reached = true;
                break;
            }
            std::optional<PathPoint> best;
            double best_delta = delta;
            for (std::size_t p = 0; p < space.parties(); ++p) {
                auto cand = local_move(cur, p);
                if (!cand) {
                    continue;
                }
                const double d = segment_distance(cand->op, target_).relative;
                if (d < best_delta - 1e-12 && delta - d <= o_.max_relative_jump) {
                    best_delta = d;
                    best = std::move(cand);
                }
            }
            if (!best) {
                auto cand = corrected_move(cur, rng);
                if (cand) {
                    const double d = segment_distance(cand->op, target_).relative;
                    if (d < delta - 1e-12 && delta - d <= o_.max_relative_jump) {
                        best_delta = d;
                        best = std::move(cand);
                    }
                }
            }
            if (!best) {
                break; // stall
            }
            cur = std::move(*best);
            delta = best_delta;
            out.best_relative = std::min(out.best_relative, delta);
            out.points.push_back(cur);
        }
        if (!out.reached && delta <= o_.endpoint_tol) {
            out.reached = true;
        }
        return out;
    }

  private:
    /// Accepts `op` as the next point if it is in Z and a valid monotone step.
    std::optional<PathPoint> admit(const PathPoint &cur, HermitianOperator op,
                                   std::vector<Matrix> factors, double product_residual) const {
        const double drop = cur.op.trace() - op.trace();
        if (!(drop > 0.0) || !(op.trace() > 0.0)) {
            return std::nullopt;
        }
        const Matrix diff = cur.op.matrix() - op.matrix();
        const double step = trace_norm(diff);
        if (step > o_.step_cap || std::abs(step - drop) > 1e-9 * std::max(1.0, cur.op.trace())) {
            return std::nullopt; // too long, or not nested (difference not PSD)
        }
        const auto m = contains(z_, op, o_.membership_tol, &cur.coefficients);
        if (!m.feasible) {
            return std::nullopt;
        }
        PathPoint pt{std::move(op), 0.0, m.coefficients, product_residual, m.residual,
                     std::move(factors), 0, false};
        pt.s = pt.op.trace();
        return pt;
    }

    /// Party p's factor moves toward the largest multiple of its target factor below it.
    std::optional<PathPoint> local_move(const PathPoint &cur, std::size_t p) const {
        const auto &a = cur.factors[p];
        const double mu = max_subtractable(a, tf_[p]);
        const Matrix delta = hermitian_part(a - mu * tf_[p]);
        const double tr_delta = delta.trace().real();
        if (!(tr_delta > 1e-14 * std::max(1.0, a.trace().real()))) {
            return std::nullopt;
        }
        double others = 1.0;
        for (std::size_t q = 0; q < cur.factors.size(); ++q) {
            if (q != p) {
                others *= cur.factors[q].trace().real();
            }
        }
        const double y = std::min(1.0, o_.s_step / (tr_delta * others));
        std::vector<Matrix> f = cur.factors;
        f[p] = psd_projection(a - y * delta);
        HermitianOperator op = tensor(z_.space(), std::span<const Matrix>(f));
        auto pt = admit(cur, std::move(op), std::move(f), 0.0);
        if (pt) {
            pt->acting_party = p;
            pt->has_acting_party = true;
        }
        return pt;
    }

    /// Direct step toward the segment followed by product/zonotope alternating projections.
    std::optional<PathPoint> corrected_move(const PathPoint &cur, Rng &rng) const {
        const auto sd = segment_distance(cur.op, target_);
        Matrix dir = cur.op.matrix() - sd.q * target_.matrix();
        const double tr = dir.trace().real();
        if (!(tr > 0.0)) {
            return std::nullopt;
        }
        // small random tilt so repeated restarts explore different correctors
        const Matrix tilt = random_hermitian(rng, dir.rows());
        dir += 1e-3 * tr * tilt / std::max(tilt.norm(), 1e-300);
        HermitianOperator y(cur.op.space(), Matrix(cur.op.matrix() - o_.s_step * dir / tr));
        HermitianOperator best_p = cur.op;
        ProductFactorization pf;
        for (std::size_t it = 0; it < o_.corrector_iterations; ++it) {
            pf = nearest_product(y);
            const HermitianOperator p = product_operator(y.space(), pf);
            const auto r = project_coordinates(z_, hermitian_coordinates(p));
            const HermitianOperator next = z_.point(r.x);
            const double move = (next.matrix() - y.matrix()).norm();
            y = next;
            best_p = p;
            if (move <= 1e-14 * (1.0 + y.frobenius_norm())) {
                break;
            }
        }
        pf = nearest_product(best_p);
        std::vector<Matrix> f = pf.factors;
        f[0] *= pf.scale;
        HermitianOperator op = tensor(z_.space(), std::span<const Matrix>(f));
        const double pres = (op.matrix() - best_p.matrix()).norm();
        // shrink toward 0 if needed to stay inside Z and below the current point
        for (int k = 0; k < 30; ++k) {
            auto pt = admit(cur, op, f, pres);
            if (pt) {
                return pt;
            }
            op *= 0.9;
            f[0] *= 0.9;
        }
        return std::nullopt;
    }

    const Zonotope &z_;
    const HermitianOperator &target_;
    std::vector<Matrix> tf_;
    PathSearchOptions o_;
};

inline std::vector<Matrix> perturbed_factors(const std::vector<Matrix> &f, double magnitude, Rng &rng) {
    std::vector<Matrix> out;
    for (const auto &a : f) {
        const Matrix h = random_hermitian(rng, a.rows());
        Matrix b = psd_projection(a + magnitude * h / std::max(h.norm(), 1e-300));
        const double n = b.norm();
        out.push_back(n > 0.0 ? Matrix(b / n) : a);
    }
    return out;
}

} // namespace detail

/**
 * @brief Continuation search for a monotonic path of PSD product operators
 * in Z from the identity to (0, E_j].
 *
 * Each step lowers the trace by s_step. Preferred moves change one party's
 * factor toward the target's factor (piecewise-local steps); otherwise a
 * direct step toward the segment is corrected by alternating projections
 * between the product set and Z. A step is accepted only if it stays in Z,
 * is nested below the previous point, is within step_cap in trace norm, and
 * strictly reduces the relative distance to the segment by at most
 * max_relative_jump.
 */
inline PathSearchResult find_monotonic_product_path(const Zonotope &z, std::size_t target_index,
                                                    PathSearchOptions opts = {},
                                                    const std::string &target_label = {}) {
    std::optional<std::size_t> pos;
    for (std::size_t k = 0; k < z.size(); ++k) {
        if (z.original_index(k) == target_index) {
            pos = k;
        }
    }
    if (!pos) {
        throw PathTargetError("target index " + std::to_string(target_index) +
                              " is not a nonzero generator");
    }
    const HermitianOperator &target = z.generators()[*pos];
    const auto d = static_cast<double>(z.space().dim());
    if (opts.s_step <= 0.0) {
        opts.s_step = d / 200.0;
    }
    if (opts.step_cap <= 0.0) {
        opts.step_cap = 4.0 * opts.s_step;
    }
    if (opts.max_steps == 0) {
        opts.max_steps = static_cast<std::size_t>(std::ceil(20.0 * d / opts.s_step));
    }

    PathSearchResult res;
    res.obstruction.target_index = target_index;
    res.obstruction.target_label = target_label;
    const auto tf = nearest_product(target).factors;
    const std::size_t attempts = std::max<std::size_t>(1, opts.restarts);

    VerifyOptions vo;
    vo.product_tol = opts.product_tol;
    vo.membership_tol = opts.membership_tol;
    vo.step_cap = opts.step_cap * (1.0 + 1e-12);
    vo.target = target;
    vo.endpoint_tol = opts.endpoint_tol;
    vo.max_relative_jump = opts.max_relative_jump * (1.0 + 1e-9);

    std::vector<PathPoint> stall_points;
    for (std::size_t r = 0; r < attempts; ++r) {
        Rng rng = task_rng(opts.seed, r);
        const auto factors = r == 0 ? tf : detail::perturbed_factors(tf, opts.restart_perturbation, rng);
        detail::PathTracer tracer(z, target, factors, opts);
        auto outcome = tracer.run(rng);
        res.restarts_used = r + 1;
        if (outcome.reached) {
            OperatorPath path;
            path.points = std::move(outcome.points);
            path.target_index = target_index;
            path.target_label = target_label;
            path.endpoint_scale = segment_distance(path.points.back().op, target).q;
            auto report = verify_path(path, z, vo);
            if (report.passed()) {
                res.found = true;
                res.path = std::move(path);
                res.verification = std::move(report);
                return res;
            }
        }
        res.obstruction.lowest_s_per_restart.push_back(outcome.points.back().s);
        res.obstruction.best_relative_distance_per_restart.push_back(outcome.best_relative);
        stall_points.push_back(outcome.points.back());
    }

    // Local geometry at the deepest stall point.
    std::size_t deepest = 0;
    for (std::size_t i = 1; i < stall_points.size(); ++i) {
        if (stall_points[i].s < stall_points[deepest].s) {
            deepest = i;
        }
    }
    const HermitianOperator centre = stall_points[deepest].op;
    const double radius = 2.0 * opts.step_cap;
    SamplerOptions so;
    so.product_tol = opts.product_tol;
    so.membership_tol = opts.membership_tol;
    so.ap_iterations = 50;
    so.threads = opts.threads;
    so.filter = [&](const HermitianOperator &x) { return trace_distance(x, centre) <= radius; };
    const auto hits = sample_products_in_zonotope(z, opts.stall_samples,
                                                  splitmix64(opts.seed ^ 0xa5a5a5a5ULL), so);
    res.obstruction.stall_neighborhood_hits = hits.size();
    res.obstruction.stall_samples = opts.stall_samples;
    res.obstruction.stall_radius = radius;
    return res;
}

inline PathSearchResult find_monotonic_product_path(const Zonotope &z, const HermitianOperator &target,
                                                    const PathSearchOptions &opts = {},
                                                    const std::string &target_label = {}) {
    return find_monotonic_product_path(z, find_generator(z, target), opts, target_label);
}

// ---------------------------------------------------------------------------
// Isolation probe
// ---------------------------------------------------------------------------

struct IsolationOptions {
    double epsilon = 0.05;        ///< relative trace-norm radius around (0, E]
    std::size_t samples = 100000; ///< random product samples (rejection)
    std::size_t ap_seeds = 0;     ///< ball-seeded local optimizations; 0 selects max(64, samples / 1000)
    std::size_t ap_iterations = 2000;
    double grid_step = 0.0;       ///< coefficient grid spacing; 0 disables the grid
    double product_tol = 1e-6;
    double membership_tol = kMembershipTol;
    double on_segment_tol = 1e-6; ///< absolute trace-norm distance to the ray through E
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    std::size_t max_stored_hits = 64;
};

struct IsolationHit {
    HermitianOperator op;
    std::vector<double> coefficients;
    double product_residual = 0.0;
    double membership_residual = 0.0;
    double segment_distance = 0.0;  ///< min_q ||X - qE||_1
    double relative_distance = 0.0; ///< segment_distance / Tr X
    double q = 0.0;
    bool on_segment = false;
    std::string source; ///< "random", "local", or "grid"
};

/**
 * @brief Product points of Z within the epsilon-neighbourhood of (0, E],
 * classified as on-segment (multiples of E) or off-segment.
 *
 * The neighbourhood is scale-relative: min_q ||X - qE||_1 <= epsilon * Tr X.
 * all_hits_on_segment is evidence of isolation, not proof.
 */
struct IsolationProbeReport {
    std::size_t target_index = 0;
    std::string target_label;
    double epsilon = 0.0;
    double product_tol = 0.0;
    double membership_tol = 0.0;
    double on_segment_tol = 0.0;
    std::size_t random_samples = 0;
    std::size_t local_seeds = 0;
    std::size_t grid_points = 0;
    std::size_t samples_tested = 0;
    std::size_t hit_count = 0;
    std::size_t on_segment_hits = 0;
    std::size_t off_segment_hits = 0;
    double max_on_segment_distance = 0.0;
    std::vector<IsolationHit> hits; ///< all off-segment hits and a sample of on-segment ones (capped)
    bool all_hits_on_segment = true;
};

namespace detail {

class HitCollector {
  public:
    HitCollector(const Zonotope &z, const HermitianOperator &target, const IsolationOptions &o)
        : z_(z), target_(target), o_(o) {}

    /// Classifies a candidate already known to be in Z; returns a hit when it is
    /// product-feasible and inside the neighbourhood.
    std::optional<IsolationHit> classify(const HermitianOperator &x, const std::vector<double> &c,
                                         double membership_residual, double product_residual,
                                         const char *source) const {
        if (membership_residual > o_.membership_tol || product_residual > o_.product_tol ||
            !(x.trace() > 0.0)) {
            return std::nullopt;
        }
        const auto sd = segment_distance(x, target_);
        if (sd.relative > o_.epsilon + 1e-12) {
            return std::nullopt;
        }
        IsolationHit h{x, c, product_residual, membership_residual, sd.distance, sd.relative, sd.q,
                       sd.distance <= o_.on_segment_tol, source};
        return h;
    }

  private:
    const Zonotope &z_;
    const HermitianOperator &target_;
    const IsolationOptions &o_;
};

/// Realigned coordinates of each generator (bipartite fast product screen).
inline std::vector<RealMatrix> realigned_generators(const Zonotope &z) {
    std::vector<RealMatrix> out;
    const auto &space = z.space();
    for (const auto &g : z.generators()) {
        out.push_back(hermitian_realignment(g.matrix(), space.party_dim(0), space.party_dim(1)));
    }
    return out;
}

/// Frobenius distance of sum_k c_k T_k to rank one (lower bound on product residual).
inline double rank_one_tail(const std::vector<RealMatrix> &t, const RealVector &c) {
    RealMatrix m = RealMatrix::Zero(t.front().rows(), t.front().cols());
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (c(static_cast<Eigen::Index>(k)) != 0.0) {
            m += c(static_cast<Eigen::Index>(k)) * t[k];
        }
    }
    const RealMatrix g = m.rows() <= m.cols() ? RealMatrix(m * m.transpose())
                                              : RealMatrix(m.transpose() * m);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(g, Eigen::EigenvaluesOnly);
    const auto &lam = es.eigenvalues();
    const double tail = lam.sum() - lam(lam.size() - 1);
    return std::sqrt(std::max(0.0, tail));
}

} // namespace detail

inline IsolationProbeReport isolation_probe(const Zonotope &z, std::size_t target_index,
                                            const IsolationOptions &opts = {},
                                            const std::string &target_label = {}) {
    std::optional<std::size_t> pos;
    for (std::size_t k = 0; k < z.size(); ++k) {
        if (z.original_index(k) == target_index) {
            pos = k;
        }
    }
    if (!pos) {
        throw PathTargetError("target index " + std::to_string(target_index) +
                              " is not a nonzero generator");
    }
    const HermitianOperator &target = z.generators()[*pos];
    const auto &space = z.space();
    const detail::HitCollector collect(z, target, opts);

    IsolationProbeReport rep;
    rep.target_index = target_index;
    rep.target_label = target_label;
    rep.epsilon = opts.epsilon;
    rep.product_tol = opts.product_tol;
    rep.membership_tol = opts.membership_tol;
    rep.on_segment_tol = opts.on_segment_tol;

    std::vector<IsolationHit> on_hits;
    std::vector<IsolationHit> off_hits;
    auto record = [&](IsolationHit h) {
        ++rep.hit_count;
        if (h.on_segment) {
            ++rep.on_segment_hits;
            rep.max_on_segment_distance = std::max(rep.max_on_segment_distance, h.segment_distance);
            if (on_hits.size() < opts.max_stored_hits) {
                on_hits.push_back(std::move(h));
            }
        } else {
            ++rep.off_segment_hits;
            if (off_hits.size() < opts.max_stored_hits) {
                off_hits.push_back(std::move(h));
            }
        }
    };
    const auto in_ball = [&](const HermitianOperator &x) {
        return segment_distance(x, target).relative <= opts.epsilon + 1e-12;
    };

    // 1. Random samples kept by rejection: half from the generic sampler, half
    //    from product directions drawn around the target's own factors.
    {
        const std::size_t n_generic = opts.samples - opts.samples / 2;
        SamplerOptions so;
        so.product_tol = opts.product_tol;
        so.membership_tol = opts.membership_tol;
        so.threads = opts.threads;
        so.filter = in_ball;
        const auto pts = sample_products_in_zonotope(z, n_generic, opts.seed, so);
        for (const auto &p : pts) {
            if (auto h = collect.classify(p.op, p.coefficients, p.membership_residual,
                                          p.product_residual, "random")) {
                record(std::move(*h));
            }
        }
        const std::size_t n_near = opts.samples / 2;
        const auto tf = nearest_product(target).factors;
        const double t_hi = detail::max_trace(z);
        std::vector<std::optional<PathPoint>> slots(n_near);
        parallel_for(n_near, opts.threads, [&](std::size_t i) {
            Rng rng = task_rng(splitmix64(opts.seed ^ 0x1f2e3d4cULL), i);
            const double radius = opts.epsilon * uniform01(rng);
            std::vector<Matrix> f;
            for (const auto &a : tf) {
                const Matrix h = random_hermitian(rng, a.rows());
                f.push_back(psd_projection(a + radius * h / std::max(h.norm(), 1e-300)));
            }
            const HermitianOperator p = tensor(space, std::span<const Matrix>(f));
            if (!(p.trace() > 0.0) ||
                !detail::in_cone(z, hermitian_coordinates(p), opts.membership_tol) || !in_ball(p)) {
                return;
            }
            SamplerOptions so2;
            so2.membership_tol = opts.membership_tol;
            slots[i] = detail::max_scale_point(z, p, f, t_hi / p.trace(), so2);
        });
        for (auto &s : slots) {
            if (s) {
                if (auto h = collect.classify(s->op, s->coefficients, s->membership_residual,
                                              s->product_residual, "random")) {
                    record(std::move(*h));
                }
            }
        }
        rep.random_samples = opts.samples;
    }

    // 2. Local optimization seeded inside the ball, polished to stagnation.
    {
        const std::size_t seeds = opts.ap_seeds ? opts.ap_seeds : std::max<std::size_t>(64, opts.samples / 1000);
        std::vector<std::optional<IsolationHit>> slots(seeds);
        parallel_for(seeds, opts.threads, [&](std::size_t i) {
            Rng rng = task_rng(splitmix64(opts.seed ^ 0x77aa55ccULL), i);
            const double q = 0.05 + 0.95 * uniform01(rng);
            const Matrix h = random_hermitian(rng, static_cast<Eigen::Index>(space.dim()));
            const double radius = opts.epsilon * uniform01(rng) * target.trace();
            const HermitianOperator x0(space,
                                       Matrix(q * (target.matrix() + radius * h / std::max(trace_norm(h), 1e-300))));
            const auto ap = detail::alternating_projection(z, x0, opts.ap_iterations);
            slots[i] = collect.classify(ap.y, z.expand(ap.c), ap.membership_residual,
                                        ap.product_residual, "local");
        });
        for (auto &s : slots) {
            if (s) {
                record(std::move(*s));
            }
        }
        rep.local_seeds = seeds;
    }

    // 3. Full coefficient grid.
    if (opts.grid_step > 0.0) {
        const auto levels = static_cast<std::uint64_t>(std::llround(1.0 / opts.grid_step)) + 1;
        const std::size_t m = z.size();
        std::uint64_t total = 1;
        for (std::size_t k = 0; k < m; ++k) {
            total *= levels;
        }
        const bool bipartite = space.parties() == 2;
        const auto realigned = bipartite ? detail::realigned_generators(z) : std::vector<RealMatrix>{};
        const std::uint64_t chunk = 8192;
        const std::size_t chunks = static_cast<std::size_t>((total + chunk - 1) / chunk);
        std::vector<std::vector<IsolationHit>> found(chunks);
        parallel_for(chunks, opts.threads, [&](std::size_t ci) {
            const std::uint64_t begin = ci * chunk;
            const std::uint64_t end = std::min(total, begin + chunk);
            RealVector c(static_cast<Eigen::Index>(m));
            for (std::uint64_t idx = begin; idx < end; ++idx) {
                std::uint64_t rest = idx;
                for (std::size_t k = 0; k < m; ++k) {
                    c(static_cast<Eigen::Index>(k)) =
                        std::min(1.0, static_cast<double>(rest % levels) * opts.grid_step);
                    rest /= levels;
                }
                if (c.sum() == 0.0) {
                    continue;
                }
                double bound = 0.0;
                if (bipartite) {
                    bound = detail::rank_one_tail(realigned, c);
                    if (bound > opts.product_tol) {
                        continue;
                    }
                }
                const HermitianOperator x = z.point(c);
                if (!bipartite && product_residual_bound(x) > opts.product_tol) {
                    continue;
                }
                const double pres = nearest_product(x).residual;
                if (auto h = collect.classify(x, z.expand(c), 0.0, pres, "grid")) {
                    found[ci].push_back(std::move(*h));
                }
            }
        });
        for (auto &v : found) {
            for (auto &h : v) {
                record(std::move(h));
            }
        }
        rep.grid_points = static_cast<std::size_t>(total);
    }

    rep.samples_tested = rep.random_samples + rep.local_seeds + rep.grid_points;
    rep.all_hits_on_segment = rep.off_segment_hits == 0;
    rep.hits = std::move(off_hits);
    for (auto &h : on_hits) {
        if (rep.hits.size() >= opts.max_stored_hits) {
            break;
        }
        rep.hits.push_back(std::move(h));
    }
    return rep;
}

inline IsolationProbeReport isolation_probe(const Zonotope &z, const HermitianOperator &target,
                                            const IsolationOptions &opts = {},
                                            const std::string &target_label = {}) {
    return isolation_probe(z, find_generator(z, target), opts, target_label);
}

// ---------------------------------------------------------------------------
// The diagonal family of the KKB worked example
// ---------------------------------------------------------------------------

struct DiagonalFamilyPoint {
    HermitianOperator op;
    bool product = false;
    double criterion = 0.0; ///< 18 c31 c32 - c11' (c31 + 2 c32)
};

/**
 * @brief (1 + sqrt3) diag(c11', 3 c31, 12 c32, 2 c31 + 4 c32) on two qubits,
 * with the exact product test 18 c31 c32 = c11' (c31 + 2 c32).
 *
 * The test is the vanishing 2x2 minor d00 d11 - d01 d10 of the diagonal,
 * evaluated with a tolerance relative to the size of its terms.
 */
inline DiagonalFamilyPoint kkb_diagonal_family(double c11p, double c31, double c32) {
    if (c11p < 0.0 || c31 < 0.0 || c32 < 0.0) {
        throw std::invalid_argument("kkb_diagonal_family: coefficients must be nonnegative");
    }
    const PartitionedSpace space({2, 2});
    const double k = 1.0 + std::sqrt(3.0);
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = k * c11p;
    m(1, 1) = k * 3.0 * c31;
    m(2, 2) = k * 12.0 * c32;
    m(3, 3) = k * (2.0 * c31 + 4.0 * c32);
    const double lhs = 18.0 * c31 * c32;
    const double rhs = c11p * (c31 + 2.0 * c32);
    const double scale = std::max({lhs, rhs, 1e-300});
    DiagonalFamilyPoint out{HermitianOperator(space, m), false, lhs - rhs};
    out.product = std::abs(lhs - rhs) <= 1e-12 * scale || (lhs == 0.0 && rhs == 0.0);
    return out;
}

} // namespace locc
