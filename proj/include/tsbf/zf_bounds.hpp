#ifndef TSBF_ZF_BOUNDS_HPP
#define TSBF_ZF_BOUNDS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tsbf/channel.hpp"
#include "tsbf/inner.hpp"
#include "tsbf/outer.hpp"
#include "tsbf/spectral.hpp"

namespace tsbf {

// Executable checks of the ZF signal-power lower bound and the identities it
// rests on. Everything here is Monte-Carlo over the scenario's own channel
// model with caller-supplied outer frames.

struct BoundCheckOptions {
    int realizations = 10000;        // unconditional draws per group
    int conditional_draws = 100;     // fixed H_{-k} draws
    int conditional_samples = 10000; // resamples of h_k per fixed draw
};

template <typename Real>
struct GroupBoundReport {
    // |h~^H w|^2 == h~^H U U^H h~, relative error max(1, |rhs|)-scaled
    Real identity_max_error = 0;
    // Tr(Sigma_k) >= Tr(V^H R V) - (K - 1) lambda_max
    long trace_bound_checked = 0;
    long trace_bound_violations = 0;
    Real trace_bound_min_slack = 0;
    // E|h^H V w|^2 against the same bound
    Real signal_mean = 0;
    Real signal_se = 0;
    Real signal_bound = 0;
    // conditional mean equals Tr(Sigma_k)
    int cond_draws = 0;
    int cond_within_3se = 0;
    Real cond_max_z = 0;
};

template <typename Real>
struct BoundReport {
    std::vector<GroupBoundReport<Real>> groups;

    bool identity_ok(Real tol = Real(1e-10)) const {
        return std::all_of(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.identity_max_error <= tol; });
    }
    bool trace_bound_ok() const {
        return std::all_of(groups.begin(), groups.end(),
                           [](const auto& g) { return g.trace_bound_violations == 0; });
    }
    bool mean_signal_ok() const {
        return std::all_of(groups.begin(), groups.end(), [](const auto& g) {
            return g.signal_mean >= g.signal_bound - 3 * g.signal_se;
        });
    }
    bool cond_mean_ok(Real min_fraction = Real(0.99)) const {
        return std::all_of(groups.begin(), groups.end(), [&](const auto& g) {
            return g.cond_draws == 0 || Real(g.cond_within_3se) >= min_fraction * Real(g.cond_draws);
        });
    }
};

namespace detail {

template <typename Real>
CMatrix<Real> rows_except(const CMatrix<Real>& a, Index skip) {
    CMatrix<Real> out(a.rows() - 1, a.cols());
    for (Index j = 0, r = 0; j < a.rows(); ++j) {
        if (j != skip) out.row(r++) = a.row(j);
    }
    return out;
}

}  // namespace detail

template <typename Real, typename Gen>
BoundReport<Real> verify_zf_bounds(Gen& rng, const Scenario<Real>& s,
                                         const std::vector<CMatrix<Real>>& outers,
                                         const BoundCheckOptions& opts = {}) {
    s.validate();
    if (static_cast<Index>(outers.size()) != s.group_count()) {
        throw InvalidInput("verify_zf_bounds: one outer frame per group required");
    }
    BoundReport<Real> report;
    for (Index g = 0; g < s.group_count(); ++g) {
        const auto& grp = s.groups[g];
        const CMatrix<Real>& v = outers[g];
        const CMatrix<Real> sqrt_r = hermitian_sqrt(grp.covariance);
        const Real lambda_max = hermitian_eig(grp.covariance).values(0);
        const CMatrix<Real> projected_r = v.adjoint() * grp.covariance.matrix() * v;
        const Real bound = projected_r.trace().real() - Real(grp.users - 1) * lambda_max;
        const Real slack_tol = Real(1e-9) * (Real(1) + std::abs(lambda_max) * Real(grp.outer_dim));

        GroupBoundReport<Real> rep;
        rep.signal_bound = bound;
        rep.trace_bound_min_slack = std::numeric_limits<Real>::infinity();
        Real sum = 0, sum_sq = 0;
        long count = 0;

        for (int t = 0; t < opts.realizations; ++t) {
            const auto h = sample_group_channels<Real>(sqrt_r, grp.users, rng);
            const CMatrix<Real> heff = h.matrix * v;
            InnerBeamformer<Real> zf;
            try {
                zf = zf_inner_effective(heff);
            } catch (const SingularChannel&) {
                continue;
            }
            for (Index k = 0; k < grp.users; ++k) {
                const CMatrix<Real> u = null_space_basis<Real>(detail::rows_except(heff, k));
                const CVector<Real> hk = heff.row(k).adjoint();
                const Real lhs = std::norm((heff.row(k) * zf.w.col(k)).value());
                const Real rhs = (u.adjoint() * hk).squaredNorm();
                rep.identity_max_error = std::max(rep.identity_max_error,
                                            std::abs(lhs - rhs) / std::max(Real(1), rhs));

                const Real trace_sigma = (u.adjoint() * projected_r * u).trace().real();
                const Real slack = trace_sigma - bound;
                rep.trace_bound_min_slack = std::min(rep.trace_bound_min_slack, slack);
                ++rep.trace_bound_checked;
                if (slack < -slack_tol) ++rep.trace_bound_violations;

                sum += lhs;
                sum_sq += lhs * lhs;
                ++count;
            }
        }
        if (count > 0) {
            rep.signal_mean = sum / Real(count);
            const Real var = count > 1 ? (sum_sq - Real(count) * rep.signal_mean * rep.signal_mean) /
                                             Real(count - 1)
                                       : Real(0);
            rep.signal_se = std::sqrt(std::max(var, Real(0)) / Real(count));
        }

        // conditional mean: hold the other users fixed, resample user 0.
        for (int d = 0; d < opts.conditional_draws; ++d) {
            auto h = sample_group_channels<Real>(sqrt_r, grp.users, rng);
            CMatrix<Real> heff = h.matrix * v;
            const CMatrix<Real> u = null_space_basis<Real>(detail::rows_except(heff, Index(0)));
            if (u.cols() != grp.outer_dim - grp.users + 1) continue;
            const Real trace_sigma = (u.adjoint() * projected_r * u).trace().real();
            Real s1 = 0, s2 = 0;
            int n = 0;
            for (int t = 0; t < opts.conditional_samples; ++t) {
                const CVector<Real> h0 = sample_channel<Real>(sqrt_r, rng);
                heff.row(0) = h0.adjoint() * v;
                InnerBeamformer<Real> zf;
                try {
                    zf = zf_inner_effective(heff);
                } catch (const SingularChannel&) {
                    continue;
                }
                const Real x = std::norm((heff.row(0) * zf.w.col(0)).value());
                s1 += x;
                s2 += x * x;
                ++n;
            }
            if (n < 2) continue;
            const Real mean = s1 / n;
            const Real var = std::max((s2 - n * mean * mean) / (n - 1), Real(0));
            const Real se = std::sqrt(var / n);
            const Real z = se > 0 ? std::abs(mean - trace_sigma) / se : Real(0);
            ++rep.cond_draws;
            if (z <= 3) ++rep.cond_within_3se;
            rep.cond_max_z = std::max(rep.cond_max_z, z);
        }
        report.groups.push_back(rep);
    }
    return report;
}

}  // namespace tsbf

#endif  // TSBF_ZF_BOUNDS_HPP
