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
 * Dense two-phase simplex for min c^T x s.t. A x = b, x >= 0.
 *
 * Bland's rule throughout, so it cannot cycle. Meant for the small, dense
 * problems that come out of Hermitian coordinatizations (a few hundred rows).
 */

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace locc::solvers {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Eigen::VectorXd x;
    double objective = 0.0;
    double infeasibility = 0.0; ///< phase-one optimum (sum of artificials)
};

struct SimplexOptions {
    double pivot_tol = 1e-11;
    double feas_tol = 1e-9;
    std::size_t max_pivots = 20000;
};

namespace detail {

class Tableau {
  public:
    Tableau(const Eigen::MatrixXd &a, const Eigen::VectorXd &b)
        : m_(a.rows()), n_(a.cols()), t_(a.rows(), a.cols() + a.rows() + 1),
          basis_(static_cast<std::size_t>(a.rows())) {
        t_.setZero();
        for (Eigen::Index i = 0; i < m_; ++i) {
            const double sgn = b(i) < 0.0 ? -1.0 : 1.0;
            t_.row(i).head(n_) = sgn * a.row(i);
            t_(i, n_ + i) = 1.0;
            t_(i, cols() - 1) = sgn * b(i);
            basis_[static_cast<std::size_t>(i)] = n_ + i;
        }
        active_.assign(static_cast<std::size_t>(m_), 1);
    }

    [[nodiscard]] Eigen::Index cols() const { return t_.cols(); }
    [[nodiscard]] double rhs(Eigen::Index i) const { return t_(i, cols() - 1); }

    void pivot(Eigen::Index r, Eigen::Index c) {
        t_.row(r) /= t_(r, c);
        for (Eigen::Index i = 0; i < m_; ++i) {
            if (i != r && t_(i, c) != 0.0) {
                t_.row(i) -= t_(i, c) * t_.row(r);
            }
        }
        basis_[static_cast<std::size_t>(r)] = c;
    }

    /// Minimizes cost over columns [0, limit); returns false on unboundedness.
    LpStatus optimize(const Eigen::VectorXd &cost, Eigen::Index limit, const SimplexOptions &o) {
        for (std::size_t k = 0; k < o.max_pivots; ++k) {
            Eigen::Index enter = -1;
            for (Eigen::Index j = 0; j < limit; ++j) {
                if (is_basic(j)) {
                    continue;
                }
                double rc = cost(j);
                for (Eigen::Index i = 0; i < m_; ++i) {
                    if (active_[static_cast<std::size_t>(i)]) {
                        rc -= cost(basis_[static_cast<std::size_t>(i)]) * t_(i, j);
                    }
                }
                if (rc < -o.pivot_tol) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) {
                return LpStatus::Optimal;
            }
            Eigen::Index leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < m_; ++i) {
                if (!active_[static_cast<std::size_t>(i)] || t_(i, enter) <= o.pivot_tol) {
                    continue;
                }
                const double ratio = rhs(i) / t_(i, enter);
                if (ratio < best - 1e-15 ||
                    (std::abs(ratio - best) <= 1e-15 && leave >= 0 &&
                     basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave < 0) {
                return LpStatus::Unbounded;
            }
            pivot(leave, enter);
        }
        return LpStatus::IterationLimit;
    }

    /// Pivots artificial variables out of the basis; drops redundant rows.
    void expel_artificials(const SimplexOptions &o) {
        for (Eigen::Index i = 0; i < m_; ++i) {
            if (basis_[static_cast<std::size_t>(i)] < n_) {
                continue;
            }
            Eigen::Index col = -1;
            for (Eigen::Index j = 0; j < n_; ++j) {
                if (!is_basic(j) && std::abs(t_(i, j)) > o.pivot_tol) {
                    col = j;
                    break;
                }
            }
            if (col >= 0) {
                pivot(i, col);
            } else {
                active_[static_cast<std::size_t>(i)] = 0;
            }
        }
    }

    [[nodiscard]] Eigen::VectorXd solution() const {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
        for (Eigen::Index i = 0; i < m_; ++i) {
            const auto bi = basis_[static_cast<std::size_t>(i)];
            if (active_[static_cast<std::size_t>(i)] && bi < n_) {
                x(bi) = std::max(0.0, rhs(i));
            }
        }
        return x;
    }

    [[nodiscard]] double artificial_sum() const {
        double s = 0.0;
        for (Eigen::Index i = 0; i < m_; ++i) {
            if (basis_[static_cast<std::size_t>(i)] >= n_) {
                s += rhs(i);
            }
        }
        return s;
    }

  private:
    [[nodiscard]] bool is_basic(Eigen::Index j) const {
        for (Eigen::Index i = 0; i < m_; ++i) {
            if (active_[static_cast<std::size_t>(i)] && basis_[static_cast<std::size_t>(i)] == j) {
                return true;
            }
        }
        return false;
    }

    Eigen::Index m_;
    Eigen::Index n_;
    Eigen::MatrixXd t_;
    std::vector<Eigen::Index> basis_;
    std::vector<char> active_;
};

} // namespace detail

inline LpResult solve_lp(const Eigen::MatrixXd &a, const Eigen::VectorXd &b,
                         const Eigen::VectorXd &c, const SimplexOptions &opts = {}) {
    if (a.rows() != b.size() || a.cols() != c.size()) {
        throw std::invalid_argument("solve_lp: inconsistent dimensions");
    }
    const Eigen::Index n = a.cols();
    const Eigen::Index m = a.rows();
    detail::Tableau tab(a, b);

    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n + m);
    phase1.tail(m).setOnes();
    LpResult out;
    const auto s1 = tab.optimize(phase1, n + m, opts);
    out.infeasibility = tab.artificial_sum();
    if (s1 == LpStatus::IterationLimit) {
        out.status = s1;
        return out;
    }
    if (out.infeasibility > opts.feas_tol * std::max(1.0, b.lpNorm<1>())) {
        out.status = LpStatus::Infeasible;
        out.x = tab.solution();
        return out;
    }
    tab.expel_artificials(opts);

    Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(n + m);
    phase2.head(n) = c;
    out.status = tab.optimize(phase2, n, opts);
    out.x = tab.solution();
    out.objective = c.dot(out.x);
    return out;
}

} // namespace locc::solvers
