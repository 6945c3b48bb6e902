#include <doctest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "tsbf/outer.hpp"

using namespace tsbf;
using oracle::Mat;

namespace {

Scenario<double> single_group(const Mat& r, Index users, Index outer_dim, double noise = 1.0) {
    Scenario<double> s;
    s.noise_power = noise;
    GroupSpec<double> g;
    g.covariance = HermitianMatrix(r);
    g.users = users;
    g.outer_dim = outer_dim;
    g.streams = users;
    s.groups.push_back(g);
    return s;
}

Mat diag3(double a, double b, double c) {
    Mat d = Mat::Zero(3, 3);
    d(0, 0) = a;
    d(1, 1) = b;
    d(2, 2) = c;
    return d;
}

}  // namespace

TEST_CASE("leakage matrix: trivial cases and direct summation oracle") {
    std::mt19937_64 rng(21);
    auto s1 = single_group(oracle::random_psd(5, 5, rng), 2, 4, 2.0);
    CHECK((build_leakage_matrix(s1, 0).matrix() - 0.5 * Mat::Identity(5, 5)).norm() == 0.0);

    auto zeros = single_group(Mat::Zero(12, 12), 5, 10, 1.0);
    zeros.groups.push_back(zeros.groups[0]);
    CHECK((build_leakage_matrix(zeros, 0).matrix() - 0.1 * Mat::Identity(12, 12)).norm() < 1e-15);

    auto s = fixture::random_scenario(rng, 8, 4, 5, 6);
    for (Index g = 0; g < 4; ++g) {
        Mat ref = Mat::Zero(8, 8);
        for (Index j = 0; j < 4; ++j) {
            if (j == g) continue;
            for (Index a = 0; a < 8; ++a)
                for (Index b = 0; b < 8; ++b) ref(a, b) += 5.0 * s.groups[j].covariance(a, b);
        }
        for (Index a = 0; a < 8; ++a) ref(a, a) += s.noise_power / 6.0;
        CHECK((build_leakage_matrix(s, g).matrix() - ref).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("signal matrix: trivial cases and trace consistency") {
    std::mt19937_64 rng(22);
    Mat r = oracle::random_psd(6, 6, rng);
    CHECK((build_signal_matrix(single_group(r, 1, 3), 0).matrix() - HermitianMatrix(r).matrix()).norm() == 0.0);

    auto id = single_group(Mat::Identity(4, 4), 3, 4);
    CHECK((build_signal_matrix(id, 0).matrix() - 0.5 * Mat::Identity(4, 4)).norm() < 1e-14);

    auto s = fixture::random_scenario(rng, 10, 3, 4, 5);
    for (Index g = 0; g < 3; ++g) {
        const auto r1 = build_signal_matrix(s, g);
        const double lambda = hermitian_eig(s.groups[g].covariance).values(0);
        for (int t = 0; t < 20; ++t) {
            Mat v = oracle::random_frame(10, 5, rng);
            const double lhs = trace_form(v, r1);
            const double rhs = oracle::naive_trace_form(v, s.groups[g].covariance.matrix()) - 3.0 * lambda;
            CHECK(std::abs(lhs - rhs) <= 1e-10 * (1 + std::abs(rhs)));
        }
    }
}

TEST_CASE("trace_ratio") {
    Mat v = Mat::Zero(3, 2);
    v(0, 0) = 1;
    v(1, 1) = 1;
    CHECK(trace_ratio<double>(v, HermitianMatrix(diag3(3, 2, 1)), HermitianMatrix::identity(3)) ==
          doctest::Approx(2.5).epsilon(1e-15));

    std::mt19937_64 rng(23);
    HermitianMatrix a(oracle::random_hpd(5, rng));
    HermitianMatrix b(oracle::random_hpd(5, rng));
    Mat f = oracle::random_frame(5, 2, rng);
    CHECK(trace_ratio<double>(f, a, a) == doctest::Approx(1.0).epsilon(1e-14));
    const double ref = oracle::naive_trace_form(f, a.matrix()) / oracle::naive_trace_form(f, b.matrix());
    CHECK(std::abs(trace_ratio<double>(f, a, b) - ref) <= 1e-12 * (1 + std::abs(ref)));

    CHECK_THROWS_AS(trace_ratio<double>(v, a, HermitianMatrix::zero(3)), NotPositiveDefinite);
}

TEST_CASE("solve_tqp with a scaled identity denominator stops after two evaluations") {
    std::mt19937_64 rng(24);
    HermitianMatrix r1(oracle::random_hermitian(7, rng));
    const double c = 2.5;
    auto res = solve_tqp(r1, HermitianMatrix(c * Mat::Identity(7, 7)), 3);
    CHECK(res.rho_trace.size() == 2);
    CHECK(res.iterations == 2);
    auto e = hermitian_eig(r1);
    const double expected = (e.values(0) + e.values(1) + e.values(2)) / (c * 3);
    CHECK(std::abs(res.rho_trace.back() - expected) <= 1e-12 * (1 + std::abs(expected)));
    CHECK(projector_distance(res.v, top_k_eigvecs(r1, 3)) <= 1e-8);
}

TEST_CASE("solve_tqp: monotone trace, fixed point, orthonormal output") {
    std::mt19937_64 rng(25);
    for (int rep = 0; rep < 60; ++rep) {
        auto s = fixture::random_scenario(rng, 12, 3, 2, 4, rep % 2 == 0);
        for (Index g = 0; g < 3; ++g) {
            const auto r1 = build_signal_matrix(s, g);
            const auto r2 = build_leakage_matrix(s, g);
            auto res = solve_tqp(r1, r2, 4, TqpOptions{1e-12, 1000});
            for (std::size_t n = 1; n < res.rho_trace.size(); ++n) {
                CHECK(res.rho_trace[n] >= res.rho_trace[n - 1] - 1e-10);
            }
            CHECK(orthonormality_error(res.v) <= 1e-10);
            // fixed point: V attains the top-4 eigenvalue sum of R1 - rho R2 (which is ~0)
            const double rho = trace_ratio(res.v, r1, r2);
            const auto diff = r1 - rho * r2;
            const double top = hermitian_eig(diff).values.head(4).sum();
            const double scale = r1.norm() + std::abs(rho) * r2.norm();
            CHECK(std::abs(trace_form(res.v, diff) - top) <= 1e-8 * scale);
            CHECK(std::abs(top) <= 1e-8 * scale);
        }
    }
}

TEST_CASE("solve_tqp dominates random frames and the other designs") {
    std::mt19937_64 rng(26);
    for (int rep = 0; rep < 5; ++rep) {
        HermitianMatrix r1(oracle::random_hermitian(6, rng));
        HermitianMatrix r2(oracle::random_hpd(6, rng));
        auto tqp = solve_tqp(r1, r2, 2, TqpOptions{1e-13, 1000});
        const double best = trace_ratio(tqp.v, r1, r2);
        double sampled = -1e300;
        for (int i = 0; i < 100000; ++i) {
            Mat f = oracle::random_frame(6, 2, rng);
            sampled = std::max(sampled, oracle::naive_trace_form(f, r1.matrix()) /
                                            oracle::naive_trace_form(f, r2.matrix()));
        }
        CHECK(best >= sampled - 1e-8);
        CHECK(best >= trace_ratio(solve_p3_generalized(r1, r2, 2).v, r1, r2) - 1e-8);
    }

    for (int rep = 0; rep < 20; ++rep) {
        auto s = fixture::random_scenario(rng, 16, 3, 2, 4, true);
        for (Index g = 0; g < 3; ++g) {
            const auto r1 = build_signal_matrix(s, g);
            const auto r2 = build_leakage_matrix(s, g);
            const double best = trace_ratio(design_outer(s, g, OuterMethod::TQP).v, r1, r2);
            for (auto m : {OuterMethod::P3_SVD, OuterMethod::WEIGHTED_DIFF, OuterMethod::BD}) {
                OuterBeamformer<double> other;
                try {
                    other = design_outer(s, g, m);
                } catch (const InfeasibleBD&) {
                    continue;
                }
                CHECK(best >= trace_ratio(other.v, r1, r2) - 1e-10);
            }
        }
    }
}

TEST_CASE("solve_tqp is insensitive to the initial frame") {
    std::mt19937_64 rng(27);
    for (int rep = 0; rep < 10; ++rep) {
        HermitianMatrix r1(oracle::random_hermitian(8, rng));
        HermitianMatrix r2(oracle::random_hpd(8, rng));
        const TqpOptions tight{1e-12, 1000};
        const double ref = solve_tqp(r1, r2, 3, tight).rho_trace.back();
        for (int t = 0; t < 10; ++t) {
            auto res = solve_tqp(r1, r2, 3, tight, Mat(oracle::random_frame(8, 3, rng)));
            CHECK(std::abs(res.rho_trace.back() - ref) <= 1e-6);
        }
    }
}

TEST_CASE("solve_tqp error paths") {
    std::mt19937_64 rng(28);
    HermitianMatrix r1(oracle::random_hermitian(6, rng));
    HermitianMatrix r2(oracle::random_hpd(6, rng));
    try {
        solve_tqp(r1, r2, 2, TqpOptions{1e-4, 1});
        FAIL("expected ConvergenceFailure");
    } catch (const ConvergenceFailure& e) {
        CHECK(e.partial_trace().size() == 1);
    }
    CHECK_THROWS_AS(solve_tqp(r1, r2, 0), InvalidInput);
    CHECK_THROWS_AS(solve_tqp(r1, r2, 7), InvalidInput);
    CHECK_THROWS_AS(solve_tqp(r1, r2, 2, TqpOptions{0.0, 10}), InvalidInput);
    CHECK_THROWS_AS(solve_tqp(r1, r2, 2, {}, Mat(Mat::Identity(6, 3))), InvalidInput);
}

TEST_CASE("solve_p3_generalized") {
    std::mt19937_64 rng(29);
    HermitianMatrix r1(oracle::random_hermitian(6, rng));
    auto gen = solve_p3_generalized(r1, HermitianMatrix::identity(6), 3);
    CHECK(projector_distance(gen.v, top_k_eigvecs(r1, 3)) <= 1e-8);

    Mat a = Mat::Zero(2, 2);
    a(0, 0) = 2;
    a(1, 1) = 1;
    Mat b = Mat::Zero(2, 2);
    b(0, 0) = 1;
    b(1, 1) = 2;
    auto pencil = solve_p3_generalized(HermitianMatrix(a), HermitianMatrix(b), 1);
    CHECK(std::abs(pencil.v(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(pencil.v(1, 0)) < 1e-12);

    HermitianMatrix b2(oracle::random_hpd(6, rng));
    auto r = solve_p3_generalized(r1, b2, 4);
    CHECK(orthonormality_error(r.v) <= 1e-10);
    CHECK(r.method == OuterMethod::P3_SVD);
}

TEST_CASE("weighted difference design") {
    std::mt19937_64 rng(30);
    Mat r = oracle::random_psd(7, 4, rng);
    auto s1 = single_group(r, 2, 3);
    CHECK(projector_distance(solve_weighted_difference(s1, 0, 1.0).v,
                             top_k_eigvecs(HermitianMatrix(r), 3)) <= 1e-8);

    auto s = fixture::random_scenario(rng, 5, 3, 1, 2);
    for (double w : {0.5, 1.0, 3.0}) {
        auto res = solve_weighted_difference(s, 1, w);
        Mat diff = s.groups[1].covariance.matrix() -
                   (s.groups[0].covariance.matrix() + s.groups[2].covariance.matrix()) / w;
        const double best = oracle::naive_trace_form(res.v, diff);
        double sampled = -1e300;
        for (int i = 0; i < 10000; ++i) {
            sampled = std::max(sampled, oracle::naive_trace_form(oracle::random_frame(5, 2, rng), diff));
        }
        CHECK(best >= sampled - 1e-8);
    }
    CHECK_THROWS_AS(solve_weighted_difference(s, 0, 0.0), InvalidInput);
}

TEST_CASE("block diagonalization") {
    std::mt19937_64 rng(31);
    Mat r = oracle::random_psd(8, 5, rng);
    auto s1 = single_group(r, 2, 3);
    CHECK(projector_distance(solve_block_diagonalization(s1, 0, 0.95).v,
                             top_k_eigvecs(HermitianMatrix(r), 3)) <= 1e-8);

    auto s = fixture::sector_scenario(32, std::numbers::pi / 13, 2, 4);
    for (Index g = 0; g < 4; ++g) {
        auto bd = solve_block_diagonalization(s, g, 0.95);
        CHECK(orthonormality_error(bd.v) <= 1e-10);
        for (Index j = 0; j < 4; ++j) {
            if (j == g) continue;
            Mat u = dominant_eigenspace(s.groups[j].covariance, 0.95);
            CHECK((u.adjoint() * bd.v).cwiseAbs().maxCoeff() <= 1e-8);
        }
    }

    // dominant eigenspace picks the smallest prefix reaching the threshold
    Mat d = Mat::Zero(4, 4);
    d(0, 0) = 6;
    d(1, 1) = 3;
    d(2, 2) = 1;
    CHECK(dominant_eigenspace(HermitianMatrix(d), 0.9).cols() == 2);
    CHECK(dominant_eigenspace(HermitianMatrix(d), 0.95).cols() == 3);

    // two full-rank interferers leave no null space
    auto full = fixture::random_scenario(rng, 6, 3, 1, 2);
    for (auto& g : full.groups) g.covariance = HermitianMatrix(oracle::random_hpd(6, rng));
    CHECK_THROWS_AS(solve_block_diagonalization(full, 0, 1.0), InfeasibleBD);
}

TEST_CASE("method names round-trip") {
    for (auto m : {OuterMethod::TQP, OuterMethod::P3_SVD, OuterMethod::WEIGHTED_DIFF, OuterMethod::BD}) {
        CHECK(parse_method(method_name(m)) == m);
    }
    CHECK_FALSE(parse_method("tqp").has_value());
}

TEST_CASE("scenario validation") {
    auto s = fixture::sector_scenario(16, 0.2, 2, 4);
    CHECK_NOTHROW(s.validate());
    auto bad = s;
    bad.groups[1].outer_dim = 1;
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
    bad = s;
    bad.groups[0].streams = 1;
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
    bad = s;
    bad.noise_power = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
}
