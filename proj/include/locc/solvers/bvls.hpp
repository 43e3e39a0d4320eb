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
 * Bounded-variable least squares: min ||A x - b||_2 s.t. lower <= x <= upper.
 *
 * Active-set method of Stark and Parker. Free-variable subproblems are solved
 * with a complete orthogonal decomposition, so rank-deficient A is handled by
 * minimum-norm steps.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace locc::solvers {

struct BvlsOptions {
    std::size_t max_iterations = 0; ///< 0 selects 10 * (n + 10)
    double kkt_rel_tol = 1e-15;     ///< gradient tolerance relative to ||A||_F * ||b||
    double zero_residual_rel = 1e-15;
};

struct BvlsResult {
    Eigen::VectorXd x;
    double residual = 0.0; ///< ||A x - b||_2
    std::size_t iterations = 0;
    bool converged = false;
};

namespace detail {
enum class VarState { Lower, Upper, Free };
} // namespace detail

inline BvlsResult bvls(const Eigen::MatrixXd &a, const Eigen::VectorXd &b,
                       const Eigen::VectorXd &lower, const Eigen::VectorXd &upper,
                       const Eigen::VectorXd *warm_start = nullptr, const BvlsOptions &opts = {}) {
    using detail::VarState;
    const Eigen::Index n = a.cols();
    if (a.rows() != b.size() || lower.size() != n || upper.size() != n) {
        throw std::invalid_argument("bvls: inconsistent dimensions");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(lower(i) <= upper(i))) {
            throw std::invalid_argument("bvls: lower bound exceeds upper bound");
        }
    }

    BvlsResult out;
    Eigen::VectorXd x(n);
    std::vector<VarState> state(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        double v = 0.0;
        if (warm_start != nullptr && warm_start->size() == n) {
            v = (*warm_start)(i);
        }
        v = std::clamp(v, lower(i), upper(i));
        x(i) = v;
        auto &s = state[static_cast<std::size_t>(i)];
        if (std::isfinite(lower(i)) && v <= lower(i)) {
            s = VarState::Lower;
        } else if (std::isfinite(upper(i)) && v >= upper(i)) {
            s = VarState::Upper;
        } else {
            s = VarState::Free;
        }
    }

    const double bnorm = b.norm();
    const double anorm = a.norm();
    const double kkt_tol = opts.kkt_rel_tol * std::max(anorm * std::max(bnorm, 1.0), 1e-300);
    const double zero_res = opts.zero_residual_rel * std::max(bnorm, 1.0);
    const std::size_t max_it =
        opts.max_iterations ? opts.max_iterations : 10 * (static_cast<std::size_t>(n) + 10);

    std::vector<Eigen::Index> free_idx;
    auto collect_free = [&] {
        free_idx.clear();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (state[static_cast<std::size_t>(i)] == VarState::Free) {
                free_idx.push_back(i);
            }
        }
    };

    // Least-squares values for the free variables with bound variables fixed.
    // Among the minimizers (the free columns may be dependent) this takes the
    // one nearest the current iterate, so a variable freed for its gradient
    // always moves in the descent direction.
    auto solve_free = [&]() -> Eigen::VectorXd {
        const Eigen::VectorXd r = b - a * x;
        Eigen::MatrixXd af(a.rows(), static_cast<Eigen::Index>(free_idx.size()));
        Eigen::VectorXd xf(static_cast<Eigen::Index>(free_idx.size()));
        for (std::size_t k = 0; k < free_idx.size(); ++k) {
            af.col(static_cast<Eigen::Index>(k)) = a.col(free_idx[k]);
            xf(static_cast<Eigen::Index>(k)) = x(free_idx[k]);
        }
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(af);
        return xf + cod.solve(r);
    };

    // Moves the free set toward its unconstrained optimum, pinning variables
    // that reach a bound, until the optimum is interior.
    auto settle = [&](Eigen::VectorXd z, std::size_t &budget) {
        while (true) {
            if (free_idx.empty()) {
                return;
            }
            double alpha = 1.0;
            for (std::size_t k = 0; k < free_idx.size(); ++k) {
                const Eigen::Index i = free_idx[k];
                const double zi = z(static_cast<Eigen::Index>(k));
                if (zi < lower(i)) {
                    alpha = std::min(alpha, (x(i) - lower(i)) / (x(i) - zi));
                } else if (zi > upper(i)) {
                    alpha = std::min(alpha, (upper(i) - x(i)) / (zi - x(i)));
                }
            }
            alpha = std::clamp(alpha, 0.0, 1.0);
            bool pinned = false;
            for (std::size_t k = 0; k < free_idx.size(); ++k) {
                const Eigen::Index i = free_idx[k];
                const double zi = z(static_cast<Eigen::Index>(k));
                double xi = x(i) + alpha * (zi - x(i));
                auto &s = state[static_cast<std::size_t>(i)];
                if (alpha < 1.0) {
                    const double span = std::max(1.0, std::abs(upper(i) - lower(i)));
                    const double eps = 1e-14 * (std::isfinite(span) ? span : 1.0);
                    if (zi < lower(i) && xi <= lower(i) + eps) {
                        xi = lower(i);
                        s = VarState::Lower;
                        pinned = true;
                    } else if (zi > upper(i) && xi >= upper(i) - eps) {
                        xi = upper(i);
                        s = VarState::Upper;
                        pinned = true;
                    }
                }
                x(i) = std::clamp(xi, lower(i), upper(i));
            }
            if (alpha >= 1.0) {
                return;
            }
            if (!pinned) {
                // alpha was limited by round-off: pin the most violating variable
                double worst = -1.0;
                std::size_t wk = 0;
                for (std::size_t k = 0; k < free_idx.size(); ++k) {
                    const Eigen::Index i = free_idx[k];
                    const double zi = z(static_cast<Eigen::Index>(k));
                    const double v = std::max(lower(i) - zi, zi - upper(i));
                    if (v > worst) {
                        worst = v;
                        wk = k;
                    }
                }
                const Eigen::Index i = free_idx[wk];
                const double zi = z(static_cast<Eigen::Index>(wk));
                auto &s = state[static_cast<std::size_t>(i)];
                s = zi < lower(i) ? VarState::Lower : VarState::Upper;
                x(i) = s == VarState::Lower ? lower(i) : upper(i);
            }
            if (budget == 0) {
                return;
            }
            --budget;
            collect_free();
            if (free_idx.empty()) {
                return;
            }
            z = solve_free();
        }
    };

    std::size_t budget = max_it;
    collect_free();
    if (!free_idx.empty()) {
        settle(solve_free(), budget);
    }

    std::vector<char> blocked(static_cast<std::size_t>(n), 0);
    std::size_t it = 0;
    bool converged = false;
    for (; it < max_it && budget > 0; ++it) {
        const Eigen::VectorXd r = b - a * x;
        if (r.norm() <= zero_res) {
            converged = true;
            break;
        }
        const Eigen::VectorXd w = a.transpose() * r;
        Eigen::Index pick = -1;
        double best = kkt_tol;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (blocked[static_cast<std::size_t>(i)]) {
                continue;
            }
            const auto s = state[static_cast<std::size_t>(i)];
            double viol = 0.0;
            if (s == VarState::Lower && upper(i) > lower(i)) {
                viol = w(i);
            } else if (s == VarState::Upper && upper(i) > lower(i)) {
                viol = -w(i);
            }
            if (viol > best) {
                best = viol;
                pick = i;
            }
        }
        if (pick < 0) {
            converged = true;
            break;
        }
        const auto prev = state[static_cast<std::size_t>(pick)];
        state[static_cast<std::size_t>(pick)] = VarState::Free;
        collect_free();
        Eigen::VectorXd z = solve_free();
        const auto pos = static_cast<Eigen::Index>(
            std::find(free_idx.begin(), free_idx.end(), pick) - free_idx.begin());
        const double zp = z(pos);
        const bool wrong_way = (prev == VarState::Lower) ? zp <= x(pick) : zp >= x(pick);
        if (wrong_way) {
            state[static_cast<std::size_t>(pick)] = prev;
            blocked[static_cast<std::size_t>(pick)] = 1;
            continue;
        }
        std::fill(blocked.begin(), blocked.end(), 0);
        settle(std::move(z), budget);
    }

    out.x = std::move(x);
    out.residual = (a * out.x - b).norm();
    out.iterations = it;
    out.converged = converged;
    return out;
}

} // namespace locc::solvers
