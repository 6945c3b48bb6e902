#ifndef TSBF_OUTER_HPP
#define TSBF_OUTER_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "tsbf/spectral.hpp"
#include "tsbf/types.hpp"

namespace tsbf {

template <typename Real>
struct GroupSpec {
    Hermitian<Real> covariance;  // R_g
    Index users = 0;             // K_g
    Index outer_dim = 0;         // M_g
    Index streams = 0;           // S_g; one stream per user
};

/// Single-cell multi-group downlink: per-group statistics plus the noise and
/// total power budget.
template <typename Real>
struct Scenario {
    std::vector<GroupSpec<Real>> groups;
    Real noise_power = 1;  // sigma^2, linear
    Real total_power = 1;  // P_T, linear

    Index group_count() const noexcept { return static_cast<Index>(groups.size()); }
    Index antennas() const { return groups.empty() ? 0 : groups.front().covariance.dim(); }
    Index total_users() const {
        Index k = 0;
        for (const auto& g : groups) k += g.users;
        return k;
    }

    void validate() const {
        if (groups.empty()) throw InvalidInput("scenario: at least one group required");
        const Index m = antennas();
        for (const auto& g : groups) {
            if (g.covariance.dim() != m) throw InvalidInput("scenario: covariance size mismatch");
            if (g.users < 1) throw InvalidInput("scenario: every group needs K_g >= 1");
            if (g.outer_dim < g.users || g.outer_dim > m) {
                throw InvalidInput("scenario: need K_g <= M_g <= M");
            }
            if (g.streams != g.users) {
                throw InvalidInput("scenario: S_g must equal K_g (one stream per user)");
            }
        }
        if (!(noise_power > 0)) throw InvalidInput("scenario: sigma^2 must be positive");
        if (!(total_power > 0)) throw InvalidInput("scenario: P_T must be positive");
    }
};

enum class OuterMethod { TQP, P3_SVD, WEIGHTED_DIFF, BD };

inline std::string_view method_name(OuterMethod m) {
    switch (m) {
        case OuterMethod::TQP: return "TQP";
        case OuterMethod::P3_SVD: return "P3_SVD";
        case OuterMethod::WEIGHTED_DIFF: return "WEIGHTED_DIFF";
        case OuterMethod::BD: return "BD";
    }
    return "?";
}

inline std::optional<OuterMethod> parse_method(std::string_view s) {
    if (s == "TQP") return OuterMethod::TQP;
    if (s == "P3_SVD") return OuterMethod::P3_SVD;
    if (s == "WEIGHTED_DIFF") return OuterMethod::WEIGHTED_DIFF;
    if (s == "BD") return OuterMethod::BD;
    return std::nullopt;
}

template <typename Real>
struct OuterBeamformer {
    CMatrix<Real> v;               // M x M_g, orthonormal columns
    std::vector<Real> rho_trace;   // rho_1, rho_2, ... (TQP only)
    Index iterations = 0;
    OuterMethod method = OuterMethod::TQP;
};

struct TqpOptions {
    double eps = 1e-4;
    int max_iter = 1000;
};

/// R_{g,2} = sum_{g' != g} K_{g'} R_{g'} + (sigma^2 / M_g) I
template <typename Real>
Hermitian<Real> build_leakage_matrix(const Scenario<Real>& s, Index g) {
    const auto& self = s.groups.at(g);
    const Index m = s.antennas();
    CMatrix<Real> acc = CMatrix<Real>::Identity(m, m) * (s.noise_power / Real(self.outer_dim));
    for (Index j = 0; j < s.group_count(); ++j) {
        if (j == g) continue;
        acc += Real(s.groups[j].users) * s.groups[j].covariance.matrix();
    }
    return Hermitian<Real>(acc);
}

/// R_{g,1} = R_g - ((K_g - 1) / M_g) lambda_max(R_g) I. May be indefinite.
template <typename Real>
Hermitian<Real> build_signal_matrix(const Scenario<Real>& s, Index g) {
    const auto& self = s.groups.at(g);
    if (self.users == 1) return self.covariance;
    const Real lambda_max = hermitian_eig(self.covariance).values(0);
    const Real shift = Real(self.users - 1) / Real(self.outer_dim) * lambda_max;
    const Index m = s.antennas();
    return Hermitian<Real>(self.covariance.matrix() - shift * CMatrix<Real>::Identity(m, m));
}

/// Tr(V^H R1 V) / Tr(V^H R2 V)
template <typename Real>
Real trace_ratio(const CMatrix<Real>& v, const Hermitian<Real>& r1, const Hermitian<Real>& r2) {
    const Real den = trace_form(v, r2);
    if (!(den > 0)) throw NotPositiveDefinite("trace_ratio: non-positive denominator");
    return trace_form(v, r1) / den;
}

/// Dominant generalized eigenvectors of (R1, R2), orthonormalized by keeping
/// the left singular factor of their thin SVD.
template <typename Real>
OuterBeamformer<Real> solve_p3_generalized(const Hermitian<Real>& r1, const Hermitian<Real>& r2,
                                           Index outer_dim) {
    auto gen = generalized_eig_hpd(r1, r2, outer_dim);
    OuterBeamformer<Real> out;
    out.v = thin_svd<Real>(gen.vectors).phi;
    out.method = OuterMethod::P3_SVD;
    return out;
}

/// Trace-quotient maximization over orthonormal frames.
///
/// Starting from the generalized-eigenvector + SVD frame (or `init`), each step evaluates
/// rho_n = Tr(V^H R1 V) / Tr(V^H R2 V) at the current frame and replaces the
/// frame by the top-M_g eigenvectors of R1 - rho_n R2. The sequence rho_n is
/// non-decreasing because R2 is positive definite. The loop stops once
/// |rho_n - rho_{n-1}| < eps, with rho_0 taken as -infinity so the first step
/// never terminates the loop.
template <typename Real>
OuterBeamformer<Real> solve_tqp(const Hermitian<Real>& r1, const Hermitian<Real>& r2,
                                Index outer_dim, const TqpOptions& opts = {},
                                const std::optional<CMatrix<std::type_identity_t<Real>>>& init =
                                    std::nullopt) {
    if (!(opts.eps > 0)) throw InvalidInput("solve_tqp: eps must be positive");
    if (opts.max_iter < 1) throw InvalidInput("solve_tqp: max_iter must be >= 1");
    if (r1.dim() != r2.dim()) throw InvalidInput("solve_tqp: dimension mismatch");
    if (outer_dim < 1 || outer_dim > r1.dim()) throw InvalidInput("solve_tqp: M_g out of range");

    OuterBeamformer<Real> out;
    out.method = OuterMethod::TQP;
    if (init) {
        if (init->rows() != r1.dim() || init->cols() != outer_dim) {
            throw InvalidInput("solve_tqp: initial frame has the wrong shape");
        }
        out.v = *init;
    } else {
        out.v = solve_p3_generalized(r1, r2, outer_dim).v;
    }

    Real previous = -std::numeric_limits<Real>::infinity();
    for (int n = 1; n <= opts.max_iter; ++n) {
        const Real rho = trace_ratio(out.v, r1, r2);
        out.rho_trace.push_back(rho);
        out.v = top_k_eigvecs(r1 - rho * r2, outer_dim);
        out.iterations = n;
        if (std::abs(rho - previous) < Real(opts.eps)) return out;
        previous = rho;
    }
    std::vector<double> partial(out.rho_trace.begin(), out.rho_trace.end());
    throw ConvergenceFailure("solve_tqp: no convergence within max_iter", std::move(partial));
}

/// Fixed-weight baseline: top-M_g eigenvectors of R_g - (1/w) sum_{g' != g} R_{g'}.
template <typename Real>
OuterBeamformer<Real> solve_weighted_difference(const Scenario<Real>& s, Index g, Real w) {
    if (!(w > 0)) throw InvalidInput("solve_weighted_difference: w must be positive");
    const auto& self = s.groups.at(g);
    CMatrix<Real> diff = self.covariance.matrix();
    for (Index j = 0; j < s.group_count(); ++j) {
        if (j != g) diff -= s.groups[j].covariance.matrix() / w;
    }
    OuterBeamformer<Real> out;
    out.v = top_k_eigvecs(Hermitian<Real>(diff), self.outer_dim);
    out.method = OuterMethod::WEIGHTED_DIFF;
    return out;
}

/// Smallest leading eigenvector set of R capturing `energy_threshold` of its trace.
template <typename Real>
CMatrix<Real> dominant_eigenspace(const Hermitian<Real>& r, Real energy_threshold) {
    auto eig = hermitian_eig(r);
    const Real total = eig.values.sum();
    if (!(total > 0)) return CMatrix<Real>(r.dim(), 0);
    Real captured = 0;
    Index count = 0;
    while (count < eig.values.size() && captured < energy_threshold * total) {
        captured += std::max(eig.values(count), Real(0));
        ++count;
    }
    return eig.vectors.leftCols(count);
}

/// Block diagonalization: project the dominant eigenvectors of R_g onto the
/// null space of every other group's dominant eigenspace.
template <typename Real>
OuterBeamformer<Real> solve_block_diagonalization(const Scenario<Real>& s, Index g,
                                                  Real energy_threshold) {
    if (!(energy_threshold > 0 && energy_threshold <= 1)) {
        throw InvalidInput("solve_block_diagonalization: threshold must be in (0, 1]");
    }
    const auto& self = s.groups.at(g);
    const Index m = s.antennas();

    std::vector<CMatrix<Real>> blocks;
    Index interfering_dim = 0;
    for (Index j = 0; j < s.group_count(); ++j) {
        if (j == g) continue;
        blocks.push_back(dominant_eigenspace(s.groups[j].covariance, energy_threshold));
        interfering_dim += blocks.back().cols();
    }
    CMatrix<Real> stacked(m, interfering_dim);
    Index col = 0;
    for (const auto& b : blocks) {
        stacked.middleCols(col, b.cols()) = b;
        col += b.cols();
    }
    const CMatrix<Real> null_basis = null_space_basis<Real>(stacked.adjoint());
    if (null_basis.cols() < self.outer_dim) {
        throw InfeasibleBD("solve_block_diagonalization: null space dimension " +
                           std::to_string(null_basis.cols()) + " < M_g " +
                           std::to_string(self.outer_dim));
    }

    const CMatrix<Real> desired = top_k_eigvecs(self.covariance, self.outer_dim);
    // Work in null-space coordinates so the result stays exactly inside it.
    const CMatrix<Real> projected = null_basis.adjoint() * desired;
    OuterBeamformer<Real> out;
    out.v = null_basis * thin_svd<Real>(projected).phi;
    out.method = OuterMethod::BD;
    return out;
}

struct OuterOptions {
    TqpOptions tqp;
    double weight = 1.0;             // w of the fixed-weight baseline
    double energy_threshold = 0.95;  // BD dominant-eigenspace rule
};

template <typename Real>
OuterBeamformer<Real> design_outer(const Scenario<Real>& s, Index g, OuterMethod method,
                                   const OuterOptions& opts = {}) {
    switch (method) {
        case OuterMethod::TQP:
            return solve_tqp(build_signal_matrix(s, g), build_leakage_matrix(s, g),
                             s.groups.at(g).outer_dim, opts.tqp);
        case OuterMethod::P3_SVD:
            return solve_p3_generalized(build_signal_matrix(s, g), build_leakage_matrix(s, g),
                                        s.groups.at(g).outer_dim);
        case OuterMethod::WEIGHTED_DIFF:
            return solve_weighted_difference(s, g, Real(opts.weight));
        case OuterMethod::BD:
            return solve_block_diagonalization(s, g, Real(opts.energy_threshold));
    }
    throw InvalidInput("design_outer: unknown method");
}

}  // namespace tsbf

#endif  // TSBF_OUTER_HPP
