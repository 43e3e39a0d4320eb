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
 * Nearest PSD product operator A_1 (x) ... (x) A_P to a Hermitian operator.
 */

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/SVD>

#include "operator.hpp"

namespace locc {

struct NearestProductOptions {
    std::size_t max_iters = 200;
    double tol = 1e-10;
};

/**
 * @brief scale * (factors[0] (x) ... (x) factors[P-1]) with unit-Frobenius
 * PSD factors.
 *
 * residual is the Frobenius distance from the input operator.
 */
struct ProductFactorization {
    std::vector<Matrix> factors;
    double scale = 0.0;
    double residual = 0.0;
    std::size_t iterations = 0;
    bool iterations_exhausted = false;
};

inline HermitianOperator product_operator(const PartitionedSpace &space,
                                          const ProductFactorization &pf) {
    HermitianOperator out = tensor(space, std::span<const Matrix>(pf.factors));
    out *= pf.scale;
    return out;
}

namespace detail {

/**
 * Unnormalized least-squares update for factor p with the others fixed:
 * out(a, c) = sum over the other indices of X((..a..),(..c..)) * prod conj(F_q).
 */
inline Matrix contract_except(const Matrix &x, const PartitionedSpace &space,
                              const std::vector<Matrix> &factors, std::size_t p) {
    const auto dp = static_cast<Eigen::Index>(space.party_dim(p));
    const std::size_t dim = space.dim();
    const std::size_t parties = space.parties();
    Matrix out = Matrix::Zero(dp, dp);

    // digits cached per global index
    std::vector<std::size_t> digits(dim * parties);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t q = 0; q < parties; ++q) {
            digits[i * parties + q] = space.digit(i, q);
        }
    }
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            const Complex xv = x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            if (xv == Complex(0.0, 0.0)) {
                continue;
            }
            Complex w = xv;
            for (std::size_t q = 0; q < parties; ++q) {
                if (q == p) {
                    continue;
                }
                w *= std::conj(factors[q](static_cast<Eigen::Index>(digits[r * parties + q]),
                                          static_cast<Eigen::Index>(digits[c * parties + q])));
            }
            out(static_cast<Eigen::Index>(digits[r * parties + p]),
                static_cast<Eigen::Index>(digits[c * parties + p])) += w;
        }
    }
    return hermitian_part(out);
}

/// Partial trace onto party p.
inline Matrix partial_trace_onto(const Matrix &x, const PartitionedSpace &space, std::size_t p) {
    std::vector<Matrix> ids;
    ids.reserve(space.parties());
    for (std::size_t q = 0; q < space.parties(); ++q) {
        const auto d = static_cast<Eigen::Index>(space.party_dim(q));
        ids.emplace_back(Matrix::Identity(d, d));
    }
    return contract_except(x, space, ids, p);
}

/// Coefficients of a d1^2 x d2^2 real matrix T with X = sum T_ij G_i (x) H_j.
inline RealMatrix hermitian_realignment(const Matrix &x, std::size_t d1, std::size_t d2) {
    const Matrix r = realign(x, d1, d2);
    const auto gb = hermitian_basis(d1);
    const auto hb = hermitian_basis(d2);
    // T_ij = sum R((a,c),(b,d)) G_i(c,a) H_j(d,b)
    Matrix gm(r.rows(), static_cast<Eigen::Index>(gb.size()));
    for (std::size_t i = 0; i < gb.size(); ++i) {
        const Matrix gt = gb[i].transpose();
        gm.col(static_cast<Eigen::Index>(i)) = gt.reshaped<Eigen::RowMajor>();
    }
    Matrix hm(r.cols(), static_cast<Eigen::Index>(hb.size()));
    for (std::size_t j = 0; j < hb.size(); ++j) {
        const Matrix ht = hb[j].transpose();
        hm.col(static_cast<Eigen::Index>(j)) = ht.reshaped<Eigen::RowMajor>();
    }
    return (gm.transpose() * r * hm).real();
}

inline Matrix combine_basis(const std::vector<Matrix> &basis, const RealVector &coef) {
    Matrix out = Matrix::Zero(basis.front().rows(), basis.front().cols());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        out += coef(static_cast<Eigen::Index>(i)) * basis[i];
    }
    return out;
}

inline Matrix sign_fixed_psd(const Matrix &m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
    const auto &lam = es.eigenvalues();
    const bool flip = std::abs(lam(0)) > std::abs(lam(lam.size() - 1));
    return psd_projection(flip ? Matrix(-m) : m);
}

} // namespace detail

/**
 * @brief Frobenius distance from x to the set of (not necessarily PSD)
 * Hermitian product operators across contiguous cuts, maximized over cuts.
 *
 * Exact for two parties; a lower bound on the distance to the full P-party
 * product set otherwise. nearest_product().residual never falls below it.
 */
inline double product_residual_bound(const HermitianOperator &x) {
    const auto &space = x.space();
    double bound = 0.0;
    std::size_t left = 1;
    for (std::size_t k = 0; k + 1 < space.parties(); ++k) {
        left *= space.party_dim(k);
        const std::size_t right = space.dim() / left;
        const Matrix r = realign(x.matrix(), left, right);
        Eigen::JacobiSVD<Matrix> svd(r);
        const auto &sv = svd.singularValues();
        const double tail = std::sqrt(std::max(0.0, sv.squaredNorm() - sv(0) * sv(0)));
        bound = std::max(bound, tail);
    }
    return bound;
}

/**
 * @brief Nearest PSD product operator in Frobenius norm.
 *
 * Two parties: the best rank-one approximation of the realigned operator,
 * taken in an orthonormal Hermitian basis so both factors come out Hermitian,
 * is sign-fixed and clipped to PSD. More parties: factors start from partial
 * traces. Both refine by alternating single-factor least squares with PSD
 * clipping until the normalized factors move less than opts.tol.
 */
inline ProductFactorization nearest_product(const HermitianOperator &x,
                                            const NearestProductOptions &opts = {}) {
    const auto &space = x.space();
    const std::size_t parties = space.parties();
    ProductFactorization out;

    auto unit_identity = [&](std::size_t p) {
        const auto d = static_cast<Eigen::Index>(space.party_dim(p));
        return Matrix(Matrix::Identity(d, d) / std::sqrt(static_cast<double>(d)));
    };

    const double xnorm = x.frobenius_norm();
    if (xnorm == 0.0) {
        for (std::size_t p = 0; p < parties; ++p) {
            out.factors.push_back(unit_identity(p));
        }
        return out;
    }

    std::vector<Matrix> f(parties);
    if (parties == 2) {
        const std::size_t d1 = space.party_dim(0);
        const std::size_t d2 = space.party_dim(1);
        const RealMatrix t = detail::hermitian_realignment(x.matrix(), d1, d2);
        Eigen::JacobiSVD<RealMatrix> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const double s0 = svd.singularValues()(0);
        f[0] = detail::combine_basis(hermitian_basis(d1), svd.matrixU().col(0) * std::sqrt(s0));
        f[1] = detail::combine_basis(hermitian_basis(d2), svd.matrixV().col(0) * std::sqrt(s0));
        Eigen::SelfAdjointEigenSolver<Matrix> es(f[0], Eigen::EigenvaluesOnly);
        const auto &lam = es.eigenvalues();
        if (std::abs(lam(0)) > std::abs(lam(lam.size() - 1))) {
            f[0] = -f[0];
            f[1] = -f[1];
        }
        f[0] = psd_projection(f[0]);
        f[1] = psd_projection(f[1]);
    } else {
        for (std::size_t p = 0; p < parties; ++p) {
            f[p] = detail::sign_fixed_psd(detail::partial_trace_onto(x.matrix(), space, p));
        }
    }
    for (std::size_t p = 0; p < parties; ++p) {
        if (f[p].norm() == 0.0) {
            f[p] = unit_identity(p);
        }
    }

    bool degenerate = false;
    bool converged = false;
    std::size_t it = 0;
    for (; it < opts.max_iters; ++it) {
        double change = 0.0;
        for (std::size_t p = 0; p < parties; ++p) {
            double others = 1.0;
            for (std::size_t q = 0; q < parties; ++q) {
                if (q != p) {
                    others *= f[q].squaredNorm();
                }
            }
            Matrix next = psd_projection(detail::contract_except(x.matrix(), space, f, p) / others);
            const double nn = next.norm();
            if (nn == 0.0) {
                degenerate = true;
                break;
            }
            change = std::max(change, (next / nn - f[p] / f[p].norm()).norm());
            f[p] = std::move(next);
        }
        if (degenerate) {
            break;
        }
        if (change < opts.tol) {
            converged = true;
            ++it;
            break;
        }
    }

    out.iterations = it;
    out.iterations_exhausted = !converged && !degenerate;
    if (degenerate) {
        // No PSD product correlates positively with x; the zero operator is nearest.
        for (std::size_t p = 0; p < parties; ++p) {
            out.factors.push_back(unit_identity(p));
        }
        out.scale = 0.0;
        out.residual = xnorm;
        return out;
    }
    out.scale = 1.0;
    for (auto &fp : f) {
        const double n = fp.norm();
        out.scale *= n;
        fp /= n;
    }
    out.factors = std::move(f);
    out.residual = (x.matrix() - out.scale * tensor(space, std::span<const Matrix>(out.factors)).matrix()).norm();
    return out;
}

} // namespace locc
