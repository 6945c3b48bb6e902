#ifndef TSBF_SPECTRAL_HPP
#define TSBF_SPECTRAL_HPP

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "tsbf/types.hpp"

namespace tsbf {

// Dense complex kernels shared by every solver. All spectra are returned in
// descending order; within a degenerate eigenspace any orthonormal basis may
// come back, so callers compare projectors or objective values.

template <typename Real>
struct EigDecomposition {
    RVector<Real> values;   // descending
    CMatrix<Real> vectors;  // column k pairs with values(k)
};

template <typename Real>
struct GeneralizedEig {
    RVector<Real> values;   // descending
    CMatrix<Real> vectors;  // B-normalized: xi^H B xi = 1
};

template <typename Real>
struct ThinSvd {
    CMatrix<Real> phi;  // m x n, orthonormal columns
    RVector<Real> d;    // n singular values, descending
    CMatrix<Real> psi;  // n x n unitary, A = phi * diag(d) * psi
};

template <typename Real>
EigDecomposition<Real> hermitian_eig(const Hermitian<Real>& a) {
    if (!a.matrix().allFinite()) {
        throw InvalidInput("hermitian_eig: non-finite entries");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> solver(a.matrix());
    if (solver.info() != Eigen::Success) {
        throw InvalidInput("hermitian_eig: eigensolver did not converge");
    }
    EigDecomposition<Real> out;
    out.values = solver.eigenvalues().reverse();
    out.vectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

/// Orthonormal basis of the dominant k-dimensional eigenspace; it maximizes
/// Tr(U^H A U) over all dim x k frames with orthonormal columns.
template <typename Real>
CMatrix<Real> top_k_eigvecs(const Hermitian<Real>& a, Index k) {
    if (k < 1 || k > a.dim()) {
        throw InvalidInput("top_k_eigvecs: k out of range");
    }
    return hermitian_eig(a).vectors.leftCols(k);
}

/// Dominant k eigenpairs of the pencil A x = lambda B x with B positive
/// definite, via Cholesky reduction B = L L^H.
template <typename Real>
GeneralizedEig<Real> generalized_eig_hpd(const Hermitian<Real>& a, const Hermitian<Real>& b,
                                         Index k) {
    if (a.dim() != b.dim()) {
        throw InvalidInput("generalized_eig_hpd: dimension mismatch");
    }
    if (k < 1 || k > a.dim()) {
        throw InvalidInput("generalized_eig_hpd: k out of range");
    }
    if (!a.matrix().allFinite() || !b.matrix().allFinite()) {
        throw InvalidInput("generalized_eig_hpd: non-finite entries");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> bspec(b.matrix(), Eigen::EigenvaluesOnly);
    if (bspec.info() != Eigen::Success ||
        bspec.eigenvalues().minCoeff() <= Real(1e-12) * b.norm()) {
        throw NotPositiveDefinite("generalized_eig_hpd: B is not positive definite");
    }
    Eigen::LLT<CMatrix<Real>> llt(b.matrix());
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite("generalized_eig_hpd: Cholesky factorization failed");
    }
    const auto lower = llt.matrixL();
    // C = L^{-1} A L^{-H}
    CMatrix<Real> tmp = lower.solve(a.matrix());
    CMatrix<Real> c = lower.solve(tmp.adjoint()).adjoint();
    auto reduced = hermitian_eig(Hermitian<Real>(c));

    GeneralizedEig<Real> out;
    out.values = reduced.values.head(k);
    out.vectors = llt.matrixU().solve(reduced.vectors.leftCols(k));
    return out;
}

template <typename Real>
ThinSvd<Real> thin_svd(const CMatrix<Real>& a) {
    if (a.rows() < a.cols() || a.cols() < 1) {
        throw InvalidInput("thin_svd: requires m >= n >= 1");
    }
    if (!a.allFinite()) {
        throw InvalidInput("thin_svd: non-finite entries");
    }
    Eigen::JacobiSVD<CMatrix<Real>> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {svd.matrixU(), svd.singularValues(), svd.matrixV().adjoint()};
}

/// Orthonormal basis of the null space of A (cols x (cols - rank)). Rank is
/// decided relative to the largest singular value. A matrix with zero rows
/// has the whole space as its null space.
template <typename Real>
CMatrix<Real> null_space_basis(const CMatrix<Real>& a, Real rel_tol = Real(1e-10)) {
    const Index n = a.cols();
    if (a.rows() == 0) {
        return CMatrix<Real>::Identity(n, n);
    }
    Eigen::JacobiSVD<CMatrix<Real>> svd(a, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Index rank = 0;
    const Real cutoff = s.size() > 0 ? rel_tol * s(0) : Real(0);
    for (Index i = 0; i < s.size(); ++i) {
        if (s(i) > cutoff) ++rank;
    }
    return svd.matrixV().rightCols(n - rank);
}

/// Principal square root of a PSD matrix. Eigenvalues in
/// [-1e-10 ||R||_F, 0) are treated as round-off and clamped to zero.
template <typename Real>
CMatrix<Real> hermitian_sqrt(const Hermitian<Real>& r) {
    auto eig = hermitian_eig(r);
    const Real floor = -Real(1e-10) * r.norm();
    RVector<Real> root(eig.values.size());
    for (Index i = 0; i < eig.values.size(); ++i) {
        const Real v = eig.values(i);
        if (v < floor) {
            throw NotPSD("hermitian_sqrt: matrix has a significantly negative eigenvalue");
        }
        root(i) = std::sqrt(std::max(v, Real(0)));
    }
    CMatrix<Real> s = eig.vectors * root.asDiagonal() * eig.vectors.adjoint();
    return Hermitian<Real>(s).matrix();
}

/// Real part of Tr(V^H A V).
template <typename Real>
Real trace_form(const CMatrix<Real>& v, const Hermitian<Real>& a) {
    return (v.adjoint() * a.matrix() * v).trace().real();
}

/// ||V^H V - I||_F
template <typename Real>
Real orthonormality_error(const CMatrix<Real>& v) {
    return (v.adjoint() * v - CMatrix<Real>::Identity(v.cols(), v.cols())).norm();
}

/// Frobenius distance between the orthogonal projectors onto span(U1) and span(U2).
template <typename Real>
Real projector_distance(const CMatrix<Real>& u1, const CMatrix<Real>& u2) {
    return (u1 * u1.adjoint() - u2 * u2.adjoint()).norm();
}

}  // namespace tsbf

#endif  // TSBF_SPECTRAL_HPP
