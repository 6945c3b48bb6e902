#ifndef TSBF_TYPES_HPP
#define TSBF_TYPES_HPP

#include <complex>

#include <Eigen/Dense>

#include "tsbf/errors.hpp"

namespace tsbf {

using Index = Eigen::Index;

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using ComplexMatrix = CMatrix<double>;
using ComplexVector = CVector<double>;
using RealVector = RVector<double>;

/// Square complex matrix held in exactly conjugate-symmetric form.
///
/// The input is replaced by (A + A^H)/2 at construction, so the stored
/// diagonal is real to the last bit and any round-off asymmetry picked up
/// while assembling the matrix is discarded.
template <typename Real>
class Hermitian {
public:
    using Scalar = std::complex<Real>;
    using Matrix = CMatrix<Real>;

    Hermitian() = default;

    template <typename Derived>
    explicit Hermitian(const Eigen::MatrixBase<Derived>& a) {
        if (a.rows() != a.cols() || a.rows() < 1) {
            throw InvalidInput("Hermitian: matrix must be square and non-empty");
        }
        Matrix m = a.template cast<Scalar>();
        mat_ = (m + m.adjoint()) * Real(0.5);
        for (Index i = 0; i < mat_.rows(); ++i) {
            mat_(i, i) = Scalar(mat_(i, i).real(), Real(0));
        }
    }

    static Hermitian identity(Index n) { return Hermitian(Matrix::Identity(n, n)); }
    static Hermitian zero(Index n) { return Hermitian(Matrix::Zero(n, n)); }

    Index dim() const noexcept { return mat_.rows(); }
    const Matrix& matrix() const noexcept { return mat_; }
    Scalar operator()(Index i, Index j) const { return mat_(i, j); }
    Real norm() const { return mat_.norm(); }

    friend Hermitian operator+(const Hermitian& a, const Hermitian& b) {
        return Hermitian(a.mat_ + b.mat_);
    }
    friend Hermitian operator-(const Hermitian& a, const Hermitian& b) {
        return Hermitian(a.mat_ - b.mat_);
    }
    friend Hermitian operator*(Real s, const Hermitian& a) { return Hermitian(a.mat_ * s); }

private:
    Matrix mat_;
};

using HermitianMatrix = Hermitian<double>;

}  // namespace tsbf

#endif  // TSBF_TYPES_HPP
