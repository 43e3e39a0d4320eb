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
 * Dense Hermitian operators on a Hilbert space split into parties.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace locc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermiticityTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;
inline constexpr std::size_t kDefaultMaxDimension = 64;

/// Raised when operands live on incompatible spaces.
class DimensionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a matrix that must be Hermitian is not.
class HermiticityError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/**
 * @brief Party dimensions d_1..d_P of a tensor-product Hilbert space.
 *
 * Party 0 is the leftmost Kronecker factor, so its index is the most
 * significant digit of a global basis index.
 */
class PartitionedSpace {
  public:
    explicit PartitionedSpace(std::vector<std::size_t> dims,
                              std::size_t max_dim = kDefaultMaxDimension)
        : dims_(std::move(dims)) {
        if (dims_.size() < 2) {
            throw DimensionError("PartitionedSpace: at least two parties are required");
        }
        total_ = 1;
        for (const auto d : dims_) {
            if (d < 2) {
                throw DimensionError("PartitionedSpace: every party dimension must be >= 2");
            }
            total_ *= d;
        }
        if (total_ > max_dim) {
            throw DimensionError("PartitionedSpace: total dimension " + std::to_string(total_) +
                                 " exceeds the configured maximum " + std::to_string(max_dim));
        }
    }

    [[nodiscard]] const std::vector<std::size_t> &dims() const { return dims_; }
    [[nodiscard]] std::size_t parties() const { return dims_.size(); }
    [[nodiscard]] std::size_t dim() const { return total_; }
    [[nodiscard]] std::size_t party_dim(std::size_t p) const { return dims_.at(p); }

    /// Product of the dimensions of parties strictly after p.
    [[nodiscard]] std::size_t stride(std::size_t p) const {
        std::size_t s = 1;
        for (std::size_t q = p + 1; q < dims_.size(); ++q) {
            s *= dims_[q];
        }
        return s;
    }

    /// Local index of party p inside the global basis index.
    [[nodiscard]] std::size_t digit(std::size_t index, std::size_t p) const {
        return (index / stride(p)) % dims_[p];
    }

    bool operator==(const PartitionedSpace &) const = default;

    [[nodiscard]] std::string to_string() const {
        std::string out;
        for (std::size_t p = 0; p < dims_.size(); ++p) {
            out += (p ? "x" : "") + std::to_string(dims_[p]);
        }
        return out;
    }

  private:
    std::vector<std::size_t> dims_;
    std::size_t total_{1};
};

inline double hermiticity_defect(const Matrix &m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline Matrix hermitian_part(const Matrix &m) { return 0.5 * (m + m.adjoint()); }

/**
 * @brief A D x D Hermitian matrix tied to a PartitionedSpace.
 *
 * The stored matrix is exactly Hermitian: inputs within the tolerance are
 * replaced by their Hermitian part.
 */
class HermitianOperator {
  public:
    HermitianOperator(PartitionedSpace space, const Matrix &entries,
                      double hermiticity_tol = kHermiticityTol)
        : space_(std::move(space)) {
        const auto d = static_cast<Eigen::Index>(space_.dim());
        if (entries.rows() != d || entries.cols() != d) {
            throw DimensionError("HermitianOperator: matrix is " + std::to_string(entries.rows()) +
                                 "x" + std::to_string(entries.cols()) + ", space " +
                                 space_.to_string() + " needs " + std::to_string(d) + "x" +
                                 std::to_string(d));
        }
        const double defect = hermiticity_defect(entries);
        if (!(defect <= hermiticity_tol)) {
            throw HermiticityError("HermitianOperator: matrix is not Hermitian (defect " +
                                   std::to_string(defect) + ")");
        }
        m_ = hermitian_part(entries);
    }

    static HermitianOperator identity(const PartitionedSpace &space) {
        const auto d = static_cast<Eigen::Index>(space.dim());
        return {space, Matrix::Identity(d, d)};
    }

    static HermitianOperator zero(const PartitionedSpace &space) {
        const auto d = static_cast<Eigen::Index>(space.dim());
        return {space, Matrix::Zero(d, d)};
    }

    /// Rank-one projector onto the normalized vector v.
    static HermitianOperator projector(const PartitionedSpace &space, const Vector &v) {
        const double n = v.norm();
        if (n == 0.0) {
            throw std::invalid_argument("projector: zero vector");
        }
        const Vector u = v / n;
        return {space, u * u.adjoint()};
    }

    [[nodiscard]] const PartitionedSpace &space() const { return space_; }
    [[nodiscard]] const Matrix &matrix() const { return m_; }
    [[nodiscard]] std::size_t dim() const { return space_.dim(); }

    [[nodiscard]] double trace() const { return m_.trace().real(); }
    [[nodiscard]] double frobenius_norm() const { return m_.norm(); }

    /// Eigenvalues in ascending order.
    [[nodiscard]] RealVector eigenvalues() const {
        Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
        return es.eigenvalues();
    }

    [[nodiscard]] double min_eigenvalue() const { return eigenvalues()(0); }

    HermitianOperator &operator+=(const HermitianOperator &o) {
        require_same_space(o);
        m_ += o.m_;
        return *this;
    }
    HermitianOperator &operator-=(const HermitianOperator &o) {
        require_same_space(o);
        m_ -= o.m_;
        return *this;
    }
    HermitianOperator &operator*=(double t) {
        m_ *= t;
        return *this;
    }

    friend HermitianOperator operator+(HermitianOperator a, const HermitianOperator &b) {
        return a += b;
    }
    friend HermitianOperator operator-(HermitianOperator a, const HermitianOperator &b) {
        return a -= b;
    }
    friend HermitianOperator operator*(double t, HermitianOperator a) { return a *= t; }
    friend HermitianOperator operator*(HermitianOperator a, double t) { return a *= t; }

    void require_same_space(const HermitianOperator &o) const {
        if (!(space_ == o.space_)) {
            throw DimensionError("operators live on different spaces (" + space_.to_string() +
                                 " vs " + o.space_.to_string() + ")");
        }
    }

  private:
    PartitionedSpace space_;
    Matrix m_;
};

/// Frobenius distance between two operators on the same space.
inline double frobenius_distance(const HermitianOperator &a, const HermitianOperator &b) {
    a.require_same_space(b);
    return (a.matrix() - b.matrix()).norm();
}

/**
 * @brief Kronecker product of per-party Hermitian factors, party 0 leftmost.
 */
inline HermitianOperator tensor(const PartitionedSpace &space, std::span<const Matrix> factors) {
    if (factors.size() != space.parties()) {
        throw DimensionError("tensor: expected " + std::to_string(space.parties()) +
                             " factors, got " + std::to_string(factors.size()));
    }
    Matrix out = Matrix::Ones(1, 1);
    for (std::size_t p = 0; p < factors.size(); ++p) {
        const auto d = static_cast<Eigen::Index>(space.party_dim(p));
        const Matrix &f = factors[p];
        if (f.rows() != d || f.cols() != d) {
            throw DimensionError("tensor: factor " + std::to_string(p) + " is " +
                                 std::to_string(f.rows()) + "x" + std::to_string(f.cols()) +
                                 ", party dimension is " + std::to_string(d));
        }
        if (!(hermiticity_defect(f) <= kHermiticityTol)) {
            throw HermiticityError("tensor: factor " + std::to_string(p) + " is not Hermitian");
        }
        Matrix next(out.rows() * d, out.cols() * d);
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
            for (Eigen::Index j = 0; j < out.cols(); ++j) {
                next.block(i * d, j * d, d, d) = out(i, j) * f;
            }
        }
        out = std::move(next);
    }
    return {space, out};
}

inline HermitianOperator tensor(const PartitionedSpace &space,
                                std::initializer_list<Matrix> factors) {
    const std::vector<Matrix> v(factors);
    return tensor(space, std::span<const Matrix>(v));
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
inline double trace_norm(const Matrix &m) {
    if (m.rows() != m.cols()) {
        throw DimensionError("trace_norm: matrix is not square");
    }
    if (!(hermiticity_defect(m) <= kHermiticityTol)) {
        throw HermiticityError("trace_norm: matrix is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

inline double trace_norm(const HermitianOperator &x) { return trace_norm(x.matrix()); }

inline double trace_distance(const HermitianOperator &a, const HermitianOperator &b) {
    a.require_same_space(b);
    return trace_norm(Matrix(a.matrix() - b.matrix()));
}

inline bool is_psd(const HermitianOperator &x, double tol = kPsdTol) {
    return x.min_eigenvalue() >= -tol;
}

/// Projection of a Hermitian matrix onto the PSD cone (negative eigenvalues clipped).
inline Matrix psd_projection(const Matrix &m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m));
    const RealVector lam = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

/// Principal square root of a PSD matrix (negative dust clipped).
inline Matrix psd_sqrt(const Matrix &m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m));
    const RealVector lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

/**
 * @brief Index rearrangement out((a,c),(b,d)) = m((a,b),(c,d)).
 *
 * Rows of m are split as (row_outer, row_inner) and columns as
 * (col_outer, col_inner). The result has row_outer*col_outer rows. Applying
 * the map again with splits (row_outer, col_outer) / (row_inner, col_inner)
 * returns m.
 */
inline Matrix realign(const Matrix &m, std::size_t row_outer, std::size_t row_inner,
                      std::size_t col_outer, std::size_t col_inner) {
    const auto ro = static_cast<Eigen::Index>(row_outer);
    const auto ri = static_cast<Eigen::Index>(row_inner);
    const auto co = static_cast<Eigen::Index>(col_outer);
    const auto ci = static_cast<Eigen::Index>(col_inner);
    if (m.rows() != ro * ri || m.cols() != co * ci) {
        throw DimensionError("realign: split does not match matrix shape");
    }
    Matrix out(ro * co, ri * ci);
    for (Eigen::Index a = 0; a < ro; ++a) {
        for (Eigen::Index b = 0; b < ri; ++b) {
            for (Eigen::Index c = 0; c < co; ++c) {
                for (Eigen::Index d = 0; d < ci; ++d) {
                    out(a * co + c, b * ci + d) = m(a * ri + b, c * ci + d);
                }
            }
        }
    }
    return out;
}

/// Bipartite realignment of a D x D operator for the cut (d1 | d2).
inline Matrix realign(const Matrix &m, std::size_t d1, std::size_t d2) {
    return realign(m, d1, d2, d1, d2);
}

/**
 * @brief Real coordinates of a Hermitian matrix in an orthonormal basis.
 *
 * Layout: the D diagonal entries, then sqrt(2)*Re and sqrt(2)*Im of each
 * upper-triangular entry in row-major order. The map is a Frobenius isometry.
 */
inline RealVector hermitian_coordinates(const Matrix &m) {
    const Eigen::Index d = m.rows();
    RealVector v(d * d);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
        v(k++) = m(i, i).real();
    }
    const double r2 = std::sqrt(2.0);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
            v(k++) = r2 * m(i, j).real();
            v(k++) = r2 * m(i, j).imag();
        }
    }
    return v;
}

inline RealVector hermitian_coordinates(const HermitianOperator &x) {
    return hermitian_coordinates(x.matrix());
}

inline Matrix from_hermitian_coordinates(const RealVector &v, std::size_t dim) {
    const auto d = static_cast<Eigen::Index>(dim);
    if (v.size() != d * d) {
        throw DimensionError("from_hermitian_coordinates: wrong coordinate count");
    }
    Matrix m(d, d);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
        m(i, i) = v(k++);
    }
    const double s = 1.0 / std::sqrt(2.0);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
            const Complex z(s * v(k), s * v(k + 1));
            k += 2;
            m(i, j) = z;
            m(j, i) = std::conj(z);
        }
    }
    return m;
}

/**
 * @brief Orthonormal basis of the real space of d x d Hermitian matrices.
 *
 * Ordered to match hermitian_coordinates: entry k of the coordinates of X is
 * Tr(X * basis[k]).
 */
inline std::vector<Matrix> hermitian_basis(std::size_t dim) {
    const auto d = static_cast<Eigen::Index>(dim);
    std::vector<Matrix> basis;
    basis.reserve(dim * dim);
    for (Eigen::Index i = 0; i < d; ++i) {
        Matrix e = Matrix::Zero(d, d);
        e(i, i) = 1.0;
        basis.push_back(std::move(e));
    }
    const double s = 1.0 / std::sqrt(2.0);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
            Matrix re = Matrix::Zero(d, d);
            re(i, j) = s;
            re(j, i) = s;
            basis.push_back(std::move(re));
            Matrix im = Matrix::Zero(d, d);
            im(i, j) = Complex(0.0, s);
            im(j, i) = Complex(0.0, -s);
            basis.push_back(std::move(im));
        }
    }
    return basis;
}

/// Basis state |i_1 i_2 ... i_P> as a vector.
inline Vector basis_vector(const PartitionedSpace &space, std::span<const std::size_t> digits) {
    if (digits.size() != space.parties()) {
        throw DimensionError("basis_vector: wrong number of digits");
    }
    std::size_t index = 0;
    for (std::size_t p = 0; p < digits.size(); ++p) {
        index = index * space.party_dim(p) + digits[p];
    }
    Vector v = Vector::Zero(static_cast<Eigen::Index>(space.dim()));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return v;
}

/// Kronecker product of vectors, first argument leftmost.
inline Vector kron(const Vector &a, const Vector &b) {
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a(i) * b;
    }
    return out;
}

inline Matrix kron(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

} // namespace locc
