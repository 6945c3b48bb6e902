#ifndef TSBF_INNER_HPP
#define TSBF_INNER_HPP

#include <cmath>

#include "tsbf/channel.hpp"
#include "tsbf/outer.hpp"
#include "tsbf/spectral.hpp"
#include "tsbf/types.hpp"

namespace tsbf {

/// Inner precoder on the effective channel H_g V_g. Columns are unit norm;
/// `gains` holds the real diagonal of H_g V_g W_g.
template <typename Real>
struct InnerBeamformer {
    CMatrix<Real> w;
    RVector<Real> gains;
};

template <typename Real>
CMatrix<Real> effective_channel(const GroupChannel<Real>& h, const CMatrix<Real>& v) {
    if (h.antennas() != v.rows()) throw InvalidInput("effective_channel: shape mismatch");
    return h.matrix * v;
}

namespace detail {

template <typename Real>
void require_full_row_rank(const CMatrix<Real>& heff) {
    if (heff.rows() > heff.cols()) {
        throw SingularChannel("effective channel has more users than outer dimensions");
    }
    Eigen::JacobiSVD<CMatrix<Real>> svd(heff);
    const auto& s = svd.singularValues();
    if (!(s(0) > 0) || s(s.size() - 1) <= Real(1e-10) * s(0)) {
        throw SingularChannel("effective channel is rank deficient");
    }
}

template <typename Real>
InnerBeamformer<Real> normalize_columns(const CMatrix<Real>& heff, CMatrix<Real> w) {
    for (Index k = 0; k < w.cols(); ++k) {
        const Real n = w.col(k).norm();
        if (!(n > 0)) throw SingularChannel("inner beamformer column vanished");
        w.col(k) /= n;
    }
    InnerBeamformer<Real> out;
    out.gains = (heff * w).diagonal().real();
    out.w = std::move(w);
    return out;
}

}  // namespace detail

/// Equal-power zero forcing on an effective channel (K_g x M_g):
/// W = H^H (H H^H)^{-1} P, with P chosen so every column has unit norm.
template <typename Real>
InnerBeamformer<Real> zf_inner_effective(const CMatrix<Real>& heff) {
    detail::require_full_row_rank(heff);
    // H^H = Q R  =>  H^H (H H^H)^{-1} = Q R^{-H}
    Eigen::HouseholderQR<CMatrix<Real>> qr(heff.adjoint());
    const Index k = heff.rows();
    const CMatrix<Real> q = qr.householderQ() * CMatrix<Real>::Identity(heff.cols(), k);
    const CMatrix<Real> r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
    const CMatrix<Real> r_inv_h = r.adjoint().template triangularView<Eigen::Lower>().solve(
        CMatrix<Real>::Identity(k, k));
    return detail::normalize_columns(heff, CMatrix<Real>(q * r_inv_h));
}

template <typename Real>
InnerBeamformer<Real> zf_inner(const GroupChannel<Real>& h, const OuterBeamformer<Real>& v) {
    return zf_inner_effective(effective_channel(h, v.v));
}

/// Zero forcing built user by user: w_k is the normalized projection of
/// h~_k onto the null space of the other users' effective channels.
template <typename Real>
InnerBeamformer<Real> zf_via_projection_effective(const CMatrix<Real>& heff) {
    const Index users = heff.rows();
    const Index dim = heff.cols();
    if (users > dim) throw SingularChannel("effective channel has more users than outer dimensions");
    CMatrix<Real> w(dim, users);
    for (Index k = 0; k < users; ++k) {
        CMatrix<Real> others(users - 1, dim);
        for (Index j = 0, r = 0; j < users; ++j) {
            if (j != k) others.row(r++) = heff.row(j);
        }
        const CMatrix<Real> u = null_space_basis<Real>(others);
        const CVector<Real> hk = heff.row(k).adjoint();
        CVector<Real> proj = u * (u.adjoint() * hk);
        const Real n = proj.norm();
        if (!(n > Real(1e-10) * hk.norm())) {
            throw SingularChannel("user channel lies in the span of the other users");
        }
        w.col(k) = proj / n;
    }
    return detail::normalize_columns(heff, std::move(w));
}

template <typename Real>
InnerBeamformer<Real> zf_via_projection(const GroupChannel<Real>& h,
                                        const OuterBeamformer<Real>& v) {
    return zf_via_projection_effective(effective_channel(h, v.v));
}

/// Regularized ZF: columns of H^H (H H^H + alpha I)^{-1}, each scaled to unit norm.
template <typename Real>
InnerBeamformer<Real> rzf_inner_effective(const CMatrix<Real>& heff, Real alpha) {
    if (!(alpha >= 0)) throw InvalidInput("rzf_inner: alpha must be nonnegative");
    const Index k = heff.rows();
    CMatrix<Real> gram = heff * heff.adjoint();
    gram.diagonal().array() += alpha;
    Eigen::LDLT<CMatrix<Real>> ldlt(gram);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().real().minCoeff() <= Real(1e-20) * ldlt.vectorD().real().maxCoeff()) {
        throw SingularChannel("rzf_inner: regularized Gram matrix is singular");
    }
    CMatrix<Real> raw = heff.adjoint() * ldlt.solve(CMatrix<Real>::Identity(k, k));
    return detail::normalize_columns(heff, std::move(raw));
}

template <typename Real>
InnerBeamformer<Real> rzf_inner(const GroupChannel<Real>& h, const OuterBeamformer<Real>& v,
                                Real alpha) {
    return rzf_inner_effective(effective_channel(h, v.v), alpha);
}

/// Per-stream symbol variance p = P_T / K. With unit-norm inner columns and
/// orthonormal outer frames the radiated power p Tr(V W W^H V^H) equals P_T.
template <typename Real>
Real stream_power(const Scenario<Real>& s) {
    return s.total_power / Real(s.total_users());
}

}  // namespace tsbf

#endif  // TSBF_INNER_HPP
