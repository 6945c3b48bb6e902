#ifndef TSBF_CHANNEL_HPP
#define TSBF_CHANNEL_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "tsbf/rng.hpp"
#include "tsbf/spectral.hpp"
#include "tsbf/types.hpp"

namespace tsbf {

template <typename Real>
struct OneRingParams {
    Index antennas = 0;
    Real theta = 0;     // center angle [rad]
    Real delta = 0;     // angle spread, half-width [rad]
    Real spacing = 0.5; // antenna spacing in carrier wavelengths

    void validate() const {
        const Real half_pi = std::numbers::pi_v<Real> / 2;
        if (antennas < 1) throw InvalidInput("one-ring: antenna count must be >= 1");
        if (!(delta > 0 && delta < half_pi)) throw InvalidInput("one-ring: delta must be in (0, pi/2)");
        if (!(spacing > 0)) throw InvalidInput("one-ring: spacing must be positive");
        if (!(std::abs(theta) < half_pi)) throw InvalidInput("one-ring: |theta| must be < pi/2");
    }
};

/// Channel matrix of one group; row k is h_k^H.
template <typename Real>
struct GroupChannel {
    CMatrix<Real> matrix;

    Index users() const noexcept { return matrix.rows(); }
    Index antennas() const noexcept { return matrix.cols(); }
};

/// n-point Gauss-Legendre rule on [-1, 1], Newton iteration on P_n.
template <typename Real>
void gauss_legendre(int n, std::vector<Real>& nodes, std::vector<Real>& weights) {
    nodes.assign(n, Real(0));
    weights.assign(n, Real(0));
    const Real pi = std::numbers::pi_v<Real>;
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        Real x = std::cos(pi * (Real(i) + Real(0.75)) / (Real(n) + Real(0.5)));
        Real dp = 0;
        for (int iter = 0; iter < 100; ++iter) {
            Real p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const Real pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            // p1 = P_n(x), p0 = P_{n-1}(x)
            dp = n * (x * p1 - p0) / (x * x - 1);
            const Real dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 4 * std::numeric_limits<Real>::epsilon()) break;
        }
        {
            Real p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const Real pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1);
        }
        const Real w = 2 / ((1 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

/// Node count for the one-ring integral: at least 16 nodes per period of the
/// fastest-oscillating entry, never fewer than 128.
template <typename Real>
int one_ring_node_count(const OneRingParams<Real>& p) {
    const Real need = std::ceil(Real(32) * p.spacing * Real(p.antennas - 1) * p.delta);
    return std::max(128, static_cast<int>(need));
}

/// [R]_{k,l} = (1/2 delta) * integral_{theta-delta}^{theta+delta} exp(-i 2 pi (k-l) D sin w) dw
template <typename Real>
Hermitian<Real> one_ring_covariance(const OneRingParams<Real>& p) {
    p.validate();
    using C = std::complex<Real>;
    const Real two_pi = 2 * std::numbers::pi_v<Real>;
    const int n = one_ring_node_count(p);
    std::vector<Real> x, w;
    gauss_legendre<Real>(n, x, w);

    // The matrix is Toeplitz: entry (k, l) depends only on k - l.
    const Index m = p.antennas;
    std::vector<Real> sines(n);
    for (int i = 0; i < n; ++i) sines[i] = std::sin(p.theta + p.delta * x[i]);

    std::vector<C> lag(m);
    lag[0] = C(1, 0);
    for (Index d = 1; d < m; ++d) {
        Real re = 0, im = 0;
        for (int i = 0; i < n; ++i) {
            const Real phase = -two_pi * Real(d) * p.spacing * sines[i];
            re += w[i] * std::cos(phase);
            im += w[i] * std::sin(phase);
        }
        // dw = delta * dx and the 1/(2 delta) prefactor leave a factor 1/2.
        lag[d] = C(re / 2, im / 2);
    }

    CMatrix<Real> r(m, m);
    for (Index k = 0; k < m; ++k) {
        for (Index l = 0; l < m; ++l) {
            r(k, l) = k >= l ? lag[k - l] : std::conj(lag[l - k]);
        }
    }
    return Hermitian<Real>(r);
}

/// h = sqrtR * hbar with hbar ~ CN(0, I): real and imaginary parts N(0, 1/2).
template <typename Real, typename Gen>
CVector<Real> sample_channel(const CMatrix<Real>& sqrt_r, Gen& rng) {
    if (sqrt_r.rows() != sqrt_r.cols()) {
        throw InvalidInput("sample_channel: square root factor must be square");
    }
    std::normal_distribution<Real> normal(Real(0), std::sqrt(Real(0.5)));
    CVector<Real> hbar(sqrt_r.cols());
    for (Index i = 0; i < hbar.size(); ++i) {
        const Real re = normal(rng);
        const Real im = normal(rng);
        hbar(i) = std::complex<Real>(re, im);
    }
    return sqrt_r * hbar;
}

/// K independent draws stacked as rows h_k^H.
template <typename Real, typename Gen>
GroupChannel<Real> sample_group_channels(const CMatrix<Real>& sqrt_r, Index users, Gen& rng) {
    if (users < 1) throw InvalidInput("sample_group_channels: need at least one user");
    GroupChannel<Real> out;
    out.matrix.resize(users, sqrt_r.rows());
    for (Index k = 0; k < users; ++k) {
        out.matrix.row(k) = sample_channel<Real>(sqrt_r, rng).adjoint();
    }
    return out;
}

template <typename Real, typename Gen>
GroupChannel<Real> sample_group_channels(const Hermitian<Real>& r, Index users, Gen& rng) {
    return sample_group_channels<Real>(hermitian_sqrt(r), users, rng);
}

}  // namespace tsbf

#endif  // TSBF_CHANNEL_HPP
