#ifndef TSBF_TESTS_FIXTURES_HPP
#define TSBF_TESTS_FIXTURES_HPP

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "tsbf/channel.hpp"
#include "tsbf/outer.hpp"

namespace fixture {

using tsbf::Index;

/// Random multi-group scenario. Covariances are either random low-rank PSD
/// (rank r) or one-ring with random centers; trace normalized to M.
inline tsbf::Scenario<double> random_scenario(std::mt19937_64& rng, Index m, Index groups,
                                              Index users, Index outer_dim, bool one_ring = false) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    tsbf::Scenario<double> s;
    s.noise_power = 0.1 + u(rng);
    s.total_power = 1.0 + 10.0 * u(rng);
    for (Index g = 0; g < groups; ++g) {
        tsbf::GroupSpec<double> grp;
        if (one_ring) {
            tsbf::OneRingParams<double> p;
            p.antennas = m;
            p.theta = (u(rng) - 0.5) * 2.6;
            p.delta = 0.05 + 0.4 * u(rng);
            grp.covariance = tsbf::one_ring_covariance(p);
        } else {
            const Index rank = 1 + Index(u(rng) * double(m));
            oracle::Mat r = oracle::random_psd(m, std::min(rank, m), rng);
            r *= double(m) / r.trace().real();
            grp.covariance = tsbf::HermitianMatrix(r);
        }
        grp.users = users;
        grp.outer_dim = outer_dim;
        grp.streams = users;
        s.groups.push_back(grp);
    }
    return s;
}

/// Four-sector one-ring scenario at +-45 and +-15 degrees.
inline tsbf::Scenario<double> sector_scenario(Index m, double delta, Index users, Index outer_dim,
                                              double noise = 1.0, double pt = 1.0) {
    tsbf::Scenario<double> s;
    s.noise_power = noise;
    s.total_power = pt;
    for (double deg : {-45.0, -15.0, 15.0, 45.0}) {
        tsbf::OneRingParams<double> p;
        p.antennas = m;
        p.theta = deg * std::numbers::pi / 180.0;
        p.delta = delta;
        tsbf::GroupSpec<double> grp;
        grp.covariance = tsbf::one_ring_covariance(p);
        grp.users = users;
        grp.outer_dim = outer_dim;
        grp.streams = users;
        s.groups.push_back(grp);
    }
    return s;
}

}  // namespace fixture

#endif  // TSBF_TESTS_FIXTURES_HPP
