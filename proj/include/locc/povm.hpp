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
 * POVMs: validation, merging of proportional elements, and nonnegative
 * weights that turn a set of projectors into a complete measurement.
 */

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "operator.hpp"
#include "random.hpp"
#include "solvers/bvls.hpp"
#include "solvers/simplex.hpp"

namespace locc {

inline constexpr std::size_t kMaxPovmElements = 4096;
inline constexpr double kCompletenessTol = 1e-10;
inline constexpr double kProportionalityTol = 1e-8;

/// Raised when a POVM exceeds the configured element cap.
class PovmSizeError : public std::length_error {
  public:
    using std::length_error::length_error;
};

/**
 * @brief A finite list of operators on one space, with optional outcome labels.
 *
 * Construction checks structure only (shared space, element count, label
 * count). Positivity and completeness are checked by validate().
 */
class Povm {
  public:
    Povm(PartitionedSpace space, std::vector<HermitianOperator> elements,
         std::vector<std::string> labels = {}, std::size_t max_elements = kMaxPovmElements)
        : space_(std::move(space)), elements_(std::move(elements)), labels_(std::move(labels)) {
        if (elements_.empty()) {
            throw std::invalid_argument("Povm: at least one element is required");
        }
        if (elements_.size() > max_elements) {
            throw PovmSizeError("Povm: " + std::to_string(elements_.size()) +
                                " elements exceed the cap of " + std::to_string(max_elements));
        }
        for (std::size_t j = 0; j < elements_.size(); ++j) {
            if (!(elements_[j].space() == space_)) {
                throw DimensionError("Povm: element " + std::to_string(j) + " lives on " +
                                     elements_[j].space().to_string() + ", expected " +
                                     space_.to_string());
            }
        }
        if (!labels_.empty() && labels_.size() != elements_.size()) {
            throw std::invalid_argument("Povm: " + std::to_string(labels_.size()) + " labels for " +
                                        std::to_string(elements_.size()) + " elements");
        }
    }

    [[nodiscard]] const PartitionedSpace &space() const { return space_; }
    [[nodiscard]] const std::vector<HermitianOperator> &elements() const { return elements_; }
    [[nodiscard]] const std::vector<std::string> &labels() const { return labels_; }
    [[nodiscard]] std::size_t size() const { return elements_.size(); }
    [[nodiscard]] const HermitianOperator &operator[](std::size_t j) const { return elements_.at(j); }

    /// Label of outcome j, or its index when no labels were given.
    [[nodiscard]] std::string label(std::size_t j) const {
        return labels_.empty() ? std::to_string(j) : labels_.at(j);
    }

    /// Index of the outcome called `name` (labels first, then decimal indices).
    [[nodiscard]] std::optional<std::size_t> find(const std::string &name) const {
        for (std::size_t j = 0; j < labels_.size(); ++j) {
            if (labels_[j] == name) {
                return j;
            }
        }
        if (!name.empty() && name.find_first_not_of("0123456789") == std::string::npos) {
            const std::size_t j = std::stoul(name);
            if (j < elements_.size()) {
                return j;
            }
        }
        return std::nullopt;
    }

    [[nodiscard]] HermitianOperator sum() const {
        HermitianOperator s = HermitianOperator::zero(space_);
        for (const auto &e : elements_) {
            s += e;
        }
        return s;
    }

  private:
    PartitionedSpace space_;
    std::vector<HermitianOperator> elements_;
    std::vector<std::string> labels_;
};

struct ValidationReport {
    std::vector<double> psd_margins;   ///< minimum eigenvalue of each element
    double completeness_residual = 0;  ///< ||sum_j E_j - I||_F
    double max_entry_deviation = 0;    ///< max |(sum_j E_j - I)_ab|
    double psd_tol = kPsdTol;
    double completeness_tol = kCompletenessTol;
    bool all_psd = true;
    bool complete = true;

    [[nodiscard]] bool valid() const { return all_psd && complete; }
};

inline ValidationReport validate(const Povm &povm, double completeness_tol = kCompletenessTol,
                                 double psd_tol = kPsdTol) {
    ValidationReport r;
    r.psd_tol = psd_tol;
    r.completeness_tol = completeness_tol;
    for (const auto &e : povm.elements()) {
        const double m = e.min_eigenvalue();
        r.psd_margins.push_back(m);
        r.all_psd = r.all_psd && m >= -psd_tol;
    }
    const Matrix dev = povm.sum().matrix() - HermitianOperator::identity(povm.space()).matrix();
    r.completeness_residual = dev.norm();
    r.max_entry_deviation = dev.cwiseAbs().maxCoeff();
    r.complete = r.max_entry_deviation <= completeness_tol;
    return r;
}

/// True when E and F are proportional (normalized Frobenius distance <= tol).
inline bool proportional(const HermitianOperator &e, const HermitianOperator &f,
                         double tol = kProportionalityTol) {
    const double ne = e.frobenius_norm();
    const double nf = f.frobenius_norm();
    if (ne == 0.0 || nf == 0.0) {
        return ne == 0.0 && nf == 0.0;
    }
    return (e.matrix() / ne - f.matrix() / nf).norm() <= tol;
}

/**
 * @brief One summed element per proportionality class; zero elements dropped.
 *
 * Classes are formed greedily in element order against each class's first
 * member; merged labels are joined with '+'.
 */
inline Povm merge_proportional(const Povm &povm, double tol = kProportionalityTol) {
    std::vector<HermitianOperator> reps;
    std::vector<HermitianOperator> sums;
    std::vector<std::string> labels;
    const bool labelled = !povm.labels().empty();
    for (std::size_t j = 0; j < povm.size(); ++j) {
        const auto &e = povm[j];
        if (e.frobenius_norm() == 0.0) {
            continue;
        }
        bool placed = false;
        for (std::size_t k = 0; k < reps.size(); ++k) {
            if (proportional(reps[k], e, tol)) {
                sums[k] += e;
                if (labelled) {
                    labels[k] += "+" + povm.label(j);
                }
                placed = true;
                break;
            }
        }
        if (!placed) {
            reps.push_back(e);
            sums.push_back(e);
            if (labelled) {
                labels.push_back(povm.label(j));
            }
        }
    }
    if (sums.empty()) {
        // every element was zero; keep a single zero element so the result is a list
        sums.push_back(HermitianOperator::zero(povm.space()));
        if (labelled) {
            labels.push_back(povm.label(0));
        }
    }
    return {povm.space(), std::move(sums), std::move(labels)};
}

struct WeightOptions {
    double feasibility_tol = 1e-9; ///< Frobenius residual accepted as exact
    std::size_t threads = 1;       ///< interval LPs run over this many workers (0 = all cores)
};

struct WeightInterval {
    double min = 0.0;
    double max = 0.0; ///< +infinity when unbounded
};

/**
 * @brief Nonnegative weights c with sum_k c_k P_k = I.
 *
 * When feasible, `weights` is a feasible point and `intervals` holds the
 * exact range of each weight over the whole feasible set. When infeasible,
 * `weights` is the nonnegative least-squares best approximation and
 * `residual` its Frobenius residual.
 */
struct WeightSolution {
    bool feasible = false;
    std::vector<double> weights;
    std::vector<WeightInterval> intervals;
    double residual = 0.0;

    /// True when weight k is certified to vanish on the whole feasible set.
    [[nodiscard]] bool forced_zero(std::size_t k, double tol = 1e-8) const {
        return feasible && intervals.at(k).max <= tol;
    }
};

namespace detail {

inline RealMatrix coordinate_matrix(const std::vector<HermitianOperator> &ops) {
    const auto d = static_cast<Eigen::Index>(ops.front().dim());
    RealMatrix a(d * d, static_cast<Eigen::Index>(ops.size()));
    for (std::size_t k = 0; k < ops.size(); ++k) {
        a.col(static_cast<Eigen::Index>(k)) = hermitian_coordinates(ops[k]);
    }
    return a;
}

} // namespace detail

inline WeightSolution completeness_weights(const std::vector<HermitianOperator> &projectors,
                                           const WeightOptions &opts = {}) {
    if (projectors.empty()) {
        throw std::invalid_argument("completeness_weights: no operators");
    }
    for (const auto &p : projectors) {
        p.require_same_space(projectors.front());
    }
    const auto n = static_cast<Eigen::Index>(projectors.size());
    const RealMatrix a = detail::coordinate_matrix(projectors);
    const RealVector b = hermitian_coordinates(HermitianOperator::identity(projectors.front().space()));

    WeightSolution out;
    const auto lp = solvers::solve_lp(a, b, RealVector::Zero(n));
    if (lp.status != solvers::LpStatus::Optimal) {
        const RealVector lo = RealVector::Zero(n);
        const RealVector hi = RealVector::Constant(n, std::numeric_limits<double>::infinity());
        const auto ls = solvers::bvls(a, b, lo, hi);
        out.weights.assign(ls.x.data(), ls.x.data() + n);
        out.residual = ls.residual;
        out.feasible = false;
        return out;
    }

    // Polish the vertex by least squares on its support.
    RealVector x = lp.x;
    std::vector<Eigen::Index> support;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (x(k) > 0.0) {
            support.push_back(k);
        }
    }
    if (!support.empty()) {
        RealMatrix as(a.rows(), static_cast<Eigen::Index>(support.size()));
        for (std::size_t k = 0; k < support.size(); ++k) {
            as.col(static_cast<Eigen::Index>(k)) = a.col(support[k]);
        }
        const RealVector z = Eigen::CompleteOrthogonalDecomposition<RealMatrix>(as).solve(b);
        if (z.minCoeff() >= 0.0) {
            RealVector polished = RealVector::Zero(n);
            for (std::size_t k = 0; k < support.size(); ++k) {
                polished(support[k]) = z(static_cast<Eigen::Index>(k));
            }
            if ((a * polished - b).norm() <= (a * x - b).norm()) {
                x = polished;
            }
        }
    }
    out.weights.assign(x.data(), x.data() + n);
    out.residual = (a * x - b).norm();
    out.feasible = out.residual <= opts.feasibility_tol;
    if (!out.feasible) {
        return out;
    }

    out.intervals.resize(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), opts.threads, [&](std::size_t k) {
        RealVector c = RealVector::Zero(n);
        c(static_cast<Eigen::Index>(k)) = 1.0;
        const auto lo = solvers::solve_lp(a, b, c);
        const auto hi = solvers::solve_lp(a, b, -c);
        WeightInterval iv;
        iv.min = lo.status == solvers::LpStatus::Optimal ? std::max(0.0, lo.objective) : 0.0;
        iv.max = hi.status == solvers::LpStatus::Unbounded ? std::numeric_limits<double>::infinity()
                                                           : std::max(0.0, -hi.objective);
        out.intervals[k] = iv;
    });
    return out;
}

/**
 * @brief The measurement {w_k P_k} from a feasible weight solution, keeping
 * only operators whose weight is not certified zero.
 */
inline Povm weighted_povm(const std::vector<HermitianOperator> &projectors,
                          const WeightSolution &weights,
                          const std::vector<std::string> &labels = {}, double zero_tol = 1e-8) {
    if (!weights.feasible) {
        throw std::invalid_argument("weighted_povm: weights are infeasible");
    }
    std::vector<HermitianOperator> elements;
    std::vector<std::string> kept;
    for (std::size_t k = 0; k < projectors.size(); ++k) {
        if (weights.forced_zero(k, zero_tol) || weights.weights[k] <= zero_tol) {
            continue;
        }
        HermitianOperator e = projectors[k];
        e *= weights.weights[k];
        elements.push_back(std::move(e));
        if (!labels.empty()) {
            kept.push_back(labels.at(k));
        }
    }
    return {projectors.front().space(), std::move(elements), std::move(kept)};
}

} // namespace locc
