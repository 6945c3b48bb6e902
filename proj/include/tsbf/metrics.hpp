#ifndef TSBF_METRICS_HPP
#define TSBF_METRICS_HPP

#include <cmath>
#include <span>
#include <vector>

#include "tsbf/channel.hpp"
#include "tsbf/outer.hpp"
#include "tsbf/types.hpp"

namespace tsbf {

/// Cross gains of one realization: entry (i, j) is h_i^H V_{g(j)} w_j, with
/// users indexed group-major. Column block g depends only on group g's
/// precoders.
template <typename Real>
struct LinkGains {
    CMatrix<Real> gain;
    std::vector<Index> group_of;  // user -> group
};

template <typename Real>
LinkGains<Real> link_gains(std::span<const GroupChannel<Real>> channels,
                           std::span<const CMatrix<Real>> outers,
                           std::span<const CMatrix<Real>> inners) {
    const std::size_t groups = channels.size();
    if (outers.size() != groups || inners.size() != groups) {
        throw InvalidInput("link_gains: per-group inputs must have equal length");
    }
    Index total = 0;
    for (const auto& h : channels) total += h.users();
    const Index m = groups ? channels[0].antennas() : 0;

    CMatrix<Real> stacked(total, m);
    LinkGains<Real> out;
    out.group_of.reserve(total);
    Index row = 0;
    for (std::size_t g = 0; g < groups; ++g) {
        stacked.middleRows(row, channels[g].users()) = channels[g].matrix;
        row += channels[g].users();
        for (Index k = 0; k < channels[g].users(); ++k) out.group_of.push_back(Index(g));
    }

    out.gain.resize(total, total);
    Index col = 0;
    for (std::size_t g = 0; g < groups; ++g) {
        if (outers[g].rows() != m || inners[g].rows() != outers[g].cols() ||
            inners[g].cols() != channels[g].users()) {
            throw InvalidInput("link_gains: beamformer shape mismatch");
        }
        const CMatrix<Real> precoder = outers[g] * inners[g];
        out.gain.middleCols(col, inners[g].cols()) = stacked * precoder;
        col += inners[g].cols();
    }
    return out;
}

/// Receiver-side SINR per user. Intra-group interference is dropped when
/// `include_intra_group` is false (exact for ZF inner precoding).
template <typename Real>
RVector<Real> sinr_per_user(const LinkGains<Real>& lg, Real noise_power, Real stream_power,
                            bool include_intra_group) {
    const Index n = lg.gain.rows();
    RVector<Real> sinr(n);
    for (Index i = 0; i < n; ++i) {
        Real interference = 0;
        for (Index j = 0; j < n; ++j) {
            if (j == i) continue;
            if (lg.group_of[j] == lg.group_of[i] && !include_intra_group) continue;
            interference += std::norm(lg.gain(i, j));
        }
        sinr(i) = stream_power * std::norm(lg.gain(i, i)) /
                  (stream_power * interference + noise_power);
    }
    return sinr;
}

/// Transmitter-side SLNR per user: leakage is what user i's beam delivers to
/// every user outside its group.
template <typename Real>
RVector<Real> slnr_per_user(const LinkGains<Real>& lg, Real noise_power, Real stream_power) {
    const Index n = lg.gain.rows();
    RVector<Real> slnr(n);
    for (Index i = 0; i < n; ++i) {
        Real leak = 0;
        for (Index j = 0; j < n; ++j) {
            if (lg.group_of[j] != lg.group_of[i]) leak += std::norm(lg.gain(j, i));
        }
        slnr(i) = stream_power * std::norm(lg.gain(i, i)) / (stream_power * leak + noise_power);
    }
    return slnr;
}

template <typename Real>
Real sum_rate(const RVector<Real>& sinr) {
    Real rate = 0;
    for (Index i = 0; i < sinr.size(); ++i) {
        if (!(sinr(i) >= 0)) throw InvalidInput("sum_rate: SINR entries must be nonnegative");
        rate += std::log2(Real(1) + sinr(i));
    }
    return rate;
}

template <typename Real>
struct PowerSplit {
    Real signal = 0;
    Real leakage = 0;
};

template <typename Real>
PowerSplit<Real> signal_and_leakage_powers(const LinkGains<Real>& lg, Real stream_power) {
    PowerSplit<Real> out;
    const Index n = lg.gain.rows();
    for (Index i = 0; i < n; ++i) {
        out.signal += std::norm(lg.gain(i, i));
        for (Index j = 0; j < n; ++j) {
            if (lg.group_of[j] != lg.group_of[i]) out.leakage += std::norm(lg.gain(j, i));
        }
    }
    out.signal *= stream_power;
    out.leakage *= stream_power;
    return out;
}

template <typename Real>
struct TrialMetrics {
    RVector<Real> sinr;
    RVector<Real> slnr;
    Real sum_rate = 0;
    Real signal_power = 0;
    Real leakage_power = 0;
};

template <typename Real>
TrialMetrics<Real> evaluate_trial(const LinkGains<Real>& lg, Real noise_power, Real stream_power,
                                  bool include_intra_group) {
    TrialMetrics<Real> m;
    m.sinr = sinr_per_user(lg, noise_power, stream_power, include_intra_group);
    m.slnr = slnr_per_user(lg, noise_power, stream_power);
    m.sum_rate = sum_rate(m.sinr);
    const auto split = signal_and_leakage_powers(lg, stream_power);
    m.signal_power = split.signal;
    m.leakage_power = split.leakage;
    return m;
}

/// Deterministic lower bound on the mean SLNR of any user of the group
/// (unit stream power, sigma^2 carried inside R2).
template <typename Real>
Real slnr_lower_bound(const CMatrix<Real>& v, const Hermitian<Real>& r1, const Hermitian<Real>& r2) {
    return trace_ratio(v, r1, r2);
}

}  // namespace tsbf

#endif  // TSBF_METRICS_HPP
