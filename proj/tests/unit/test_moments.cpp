#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rmtherm/analytics.hpp"
#include "rmtherm/moments.hpp"

using namespace rmtherm;
namespace mo = rmtherm::moments;

namespace {

EnsembleSpec goe(int n, std::uint64_t seed = 31) { return {EnsembleKind::GOE, n, 1.0, seed}; }
EnsembleSpec gue(int n, std::uint64_t seed = 31) { return {EnsembleKind::GUE, n, 1.0, seed}; }

ComplexMatrix random_complex(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = Complex(nd(rng), nd(rng));
    return m;
}

mo::Options threaded() {
    mo::Options o;
    o.threads = 0;
    return o;
}

}  // namespace

TEST(DistinctCyclicMean, MatchesBruteForce) {
    std::mt19937_64 rng(11);
    for (int n : {3, 4, 6, 7}) {
        const auto x = random_complex(n, rng), y = random_complex(n, rng), z = random_complex(n, rng),
                   w = random_complex(n, rng);
        const Complex a3 = mo::distinct_cyclic_mean(x, y, z);
        const Complex b3 = oracle::distinct_cyclic_3(x, y, z);
        EXPECT_LT(std::abs(a3 - b3), 1e-12 * (1.0 + std::abs(b3))) << n;
        if (n >= 4) {
            const Complex a4 = mo::distinct_cyclic_mean(w, x, y, z);
            const Complex b4 = oracle::distinct_cyclic_4(w, x, y, z);
            EXPECT_LT(std::abs(a4 - b4), 1e-12 * (1.0 + std::abs(b4))) << n;
        }
    }
}

TEST(JointCumulant, KnownDistributions) {
    // Independent factors have vanishing joint cumulants; for X = Y = Z Gaussian
    // the third cumulant vanishes while the second equals the variance.
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    const int m = 200000;
    std::vector<std::vector<Complex>> same(m), indep(m);
    for (int r = 0; r < m; ++r) {
        const double g = 0.3 + nd(rng);
        same[r] = {g, g, g};
        indep[r] = {nd(rng), nd(rng), nd(rng)};
    }
    std::vector<std::size_t> rows(m);
    for (int r = 0; r < m; ++r) rows[r] = r;
    EXPECT_NEAR(mo::joint_cumulant(same, rows, 2).real(), 1.0, 0.02);
    EXPECT_NEAR(mo::joint_cumulant(same, rows, 3).real(), 0.0, 0.05);
    EXPECT_NEAR(mo::joint_cumulant(indep, rows, 3).real(), 0.0, 0.02);
    // Exponential(1): third cumulant 2.
    std::exponential_distribution<double> ex(1.0);
    std::vector<std::vector<Complex>> e(m);
    for (int r = 0; r < m; ++r) {
        const double v = ex(rng);
        e[r] = {v, v, v};
    }
    EXPECT_NEAR(mo::joint_cumulant(e, rows, 3).real(), 2.0, 0.15);
}

TEST(FreeCumulant, SmallWords) {
    auto mom = [](int k) { return std::pow(0.6, std::abs(k)); };
    EXPECT_DOUBLE_EQ(mo::free_cumulant({1}, mom), 0.6);
    // kappa(U, U^dagger) = phi(1) - phi(U)phi(U^dagger)
    EXPECT_NEAR(mo::free_cumulant({1, -1}, mom), 1.0 - 0.36, 1e-15);
    // kappa3 = m3 - 3 m2 m1 + 2 m1^3 for a single variable word
    const double m1 = 0.6, m2 = 0.36, m3 = 0.216;
    EXPECT_NEAR(mo::free_cumulant({1, 1, 1}, mom), m3 - 3 * m2 * m1 + 2 * m1 * m1 * m1, 1e-15);
}

TEST(FirstMoment, IdentityAtZeroTime) {
    const auto e = mo::estimate_first_moment<double>(goe(20), 0.0, 3, 3, 100);
    EXPECT_NEAR(e.estimate.real(), 1.0, 1e-12);
    EXPECT_NEAR(e.standard_error, 0.0, 1e-12);
    const auto off = mo::estimate_first_moment<double>(goe(20), 0.0, 3, 4, 100);
    EXPECT_NEAR(std::abs(off.estimate), 0.0, 1e-12);
    EXPECT_THROW(mo::estimate_first_moment<double>(goe(20), 0.0, 3, 4, 99), InvalidArgument);
    EXPECT_THROW(mo::estimate_first_moment<double>(goe(20), 0.0, 3, 20, 100), InvalidArgument);
}

TEST(FirstMoment, KroneckerStructure) {
    for (double t : {1.0, 4.0}) {
        const auto off = mo::estimate_first_moment<double>(goe(100), t, 2, 7, 200, threaded());
        EXPECT_LE(std::abs(off.estimate.real()), 4 * off.standard_error);
        EXPECT_LE(std::abs(off.estimate.imag()), 4 * off.standard_error);
        const auto offu = mo::estimate_first_moment<Complex>(gue(100), t, 2, 7, 200, threaded());
        EXPECT_LE(std::abs(offu.estimate), 4 * offu.standard_error);
    }
}

TEST(FirstMoment, DiagonalMatchesG) {
    const auto e = mo::estimate_first_moment<double>(goe(500), 4.0, 0, 0, 400, threaded());
    EXPECT_LE(std::abs(e.estimate.real() - analytics::g(4.0)), 4 * e.standard_error);
    EXPECT_GT(e.standard_error, 0.0);
}

TEST(SecondMoment, ConjugatePatternIsOneOverN) {
    const int n = 200;
    for (double t : {4.0, 8.0}) {
        const auto e =
            mo::estimate_second_moment_corr<double>(goe(n), t, {0, 1, 0, 1}, mo::Pattern::uu_conj, 300, threaded());
        const auto p = mo::predict_second(t, {0, 1, 0, 1}, mo::Pattern::uu_conj, n, EnsembleKind::GOE);
        EXPECT_LE(std::abs(e.estimate.real() - p.free_value.real()), 4 * e.standard_error) << t;
        EXPECT_LE(std::abs(e.estimate.real() - p.contraction.real()), 4 * e.standard_error) << t;
        EXPECT_NEAR(p.contraction.real(), 1.0 / n, 1e-15);
    }
}

TEST(SecondMoment, PlainPatternFollowsDoubledTime) {
    const int n = 200;
    const double t = 2.0;
    const auto e = mo::estimate_second_moment_corr<double>(goe(n), t, {0, 1, 0, 1}, mo::Pattern::uu, 400, threaded());
    const auto p = mo::predict_second(t, {0, 1, 0, 1}, mo::Pattern::uu, n, EnsembleKind::GOE);
    EXPECT_LE(std::abs(e.estimate.real() - p.free_value.real()), 4 * e.standard_error);
    EXPECT_NEAR(p.contraction.real(), analytics::g(4.0) / n, 1e-15);
}

TEST(SecondMoment, DistinctIndicesVanish) {
    const auto e =
        mo::estimate_second_moment_corr<double>(goe(100), 3.0, {0, 1, 2, 3}, mo::Pattern::uu_conj, 300, threaded());
    EXPECT_LE(std::abs(e.estimate), 4 * e.standard_error);
    const auto u =
        mo::estimate_second_moment_corr<Complex>(gue(100), 3.0, {0, 1, 1, 0}, mo::Pattern::uu_conj, 300, threaded());
    EXPECT_LE(std::abs(u.estimate), 4 * u.standard_error);
}

TEST(HigherMoments, PooledMatchesPerTupleDefinition) {
    // The pooled estimator equals the per-realization average of the brute
    // force distinct-tuple sum.
    const int n = 6;
    const auto spec = goe(n, 9);
    mo::Options opt;
    opt.pooled = true;
    const auto e3 = mo::estimate_higher_corr<double>(spec, 1.5, 3, {}, 1000, opt);
    const auto e4 = mo::estimate_higher_corr<double>(spec, 1.5, 4, {}, 1000, opt);
    Complex s3 = 0.0, s4 = 0.0;
    for (int r = 0; r < 1000; ++r) {
        const auto d = decompose<double>(sample_hamiltonian<double>(spec, r));
        const ComplexMatrix u = evolve_operator(d, 1.5);
        const ComplexMatrix uc = u.conjugate();
        s3 += oracle::distinct_cyclic_3(u, u, uc);
        s4 += oracle::distinct_cyclic_4(u, u, uc, uc);
    }
    EXPECT_LT(std::abs(e3.estimate - s3 / 1000.0), 1e-12);
    EXPECT_LT(std::abs(e4.estimate - s4 / 1000.0), 1e-12);
    EXPECT_TRUE(e3.pooled);
    EXPECT_EQ(e4.pattern, "UUU*U*");
}

TEST(HigherMoments, PooledThirdOrderScale) {
    const int n = 100;
    const double t = 2.5;
    mo::Options opt = threaded();
    opt.pooled = true;
    const auto e = mo::estimate_higher_corr<double>(goe(n), t, 3, {}, 1000, opt);
    const auto p = mo::predict_higher(t, 3, {}, n, EnsembleKind::GOE);
    // The prediction is leading order; pooling makes the error bar smaller
    // than the O(1/N) relative correction, which is allowed for explicitly.
    const double slack = 3.0 / n * std::abs(p.free_value.real());
    EXPECT_LE(std::abs(e.estimate.real() - p.free_value.real()), 4 * e.standard_error + slack);
    EXPECT_LT(e.estimate.real(), 0.0);
}

TEST(HigherMoments, GueThirdOrderVanishes) {
    mo::Options opt = threaded();
    opt.pooled = true;
    const auto e = mo::estimate_higher_corr<Complex>(gue(50), 2.5, 3, {}, 1000, opt);
    EXPECT_LE(std::abs(e.estimate), 4 * e.standard_error);
}

TEST(HigherMoments, IndexedNonCyclicVanishes) {
    const auto e = mo::estimate_higher_corr<double>(goe(30), 2.0, 3, {0, 1, 2, 3, 4, 5}, 1000, threaded());
    EXPECT_LE(std::abs(e.estimate), 4 * e.standard_error);
    EXPECT_FALSE(mo::cyclic({0, 1, 2, 3, 4, 5}));
    EXPECT_TRUE(mo::cyclic({0, 1, 1, 2, 2, 0}));
    EXPECT_EQ(mo::predict_higher(2.0, 3, {0, 1, 2, 3, 4, 5}, 30, EnsembleKind::GOE).free_value, Complex(0.0));
    EXPECT_THROW(mo::estimate_higher_corr<double>(goe(30), 2.0, 5, {}, 1000), InvalidArgument);
    EXPECT_THROW(mo::estimate_higher_corr<double>(goe(30), 2.0, 3, {0, 1}, 1000), InvalidArgument);
    EXPECT_THROW(mo::estimate_higher_corr<double>(goe(30), 2.0, 3, {}, 999), InvalidArgument);
}

TEST(MomentEstimate, StandardErrorScalesAsInverseRootM) {
    const auto a = mo::estimate_first_moment<double>(goe(60), 3.0, 0, 0, 200, threaded());
    mo::Options opt = threaded();
    opt.first_realization = 5000;
    const auto b = mo::estimate_first_moment<double>(goe(60), 3.0, 0, 0, 800, opt);
    EXPECT_NEAR(a.standard_error / b.standard_error, 2.0, 0.6);
}

TEST(TraceStatistics, EquilibriumHasZeroVariance) {
    const int n = 64;
    const auto pi = make_pi<double>(PiSpec<double>::equilibrium(), n);
    const auto a = make_observable<double>(ObservableSpec<double>::projector(), n);
    const auto s = mo::estimate_mean_and_variance_of_trace(goe(n), pi, a, {-5.0, 0.0, 5.0}, 50, threaded());
    for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_EQ(s.variance[j], 0.0);
        EXPECT_EQ(s.mean[j], 0.5);
    }
    EXPECT_THROW(mo::estimate_mean_and_variance_of_trace(goe(n), pi, a, {0.0}, 49), InvalidArgument);
}

TEST(TraceStatistics, WorkerCountDoesNotChangeResults) {
    const int n = 40;
    const auto pi = make_pi<double>(PiSpec<double>::pure_state(), n);
    const auto a = make_observable<double>(ObservableSpec<double>::projector(), n);
    mo::Options one;
    one.threads = 1;
    mo::Options many;
    many.threads = 4;
    const auto s1 = mo::estimate_mean_and_variance_of_trace(goe(n), pi, a, {1.0, 3.0}, 60, one);
    const auto s4 = mo::estimate_mean_and_variance_of_trace(goe(n), pi, a, {1.0, 3.0}, 60, many);
    for (std::size_t j = 0; j < 2; ++j) {
        EXPECT_EQ(s1.mean[j], s4.mean[j]);
        EXPECT_EQ(s1.variance[j], s4.variance[j]);
    }
}

TEST(TraceStatistics, VarianceFallsAsOneOverN) {
    const double t = 2.0;
    std::vector<double> var;
    for (int n : {128, 512}) {
        // Rank-one Pi: the eigenvector fluctuations are O(1/N). A half-filled
        // Pi self-averages and falls faster.
        const auto pi = make_pi<double>(PiSpec<double>::pure_state(), n);
        const auto a = make_observable<double>(ObservableSpec<double>::projector(), n);
        const auto s = mo::estimate_mean_and_variance_of_trace(goe(n, 17), pi, a, {t}, 100, threaded());
        var.push_back(s.variance[0]);
    }
    EXPECT_NEAR(var[0] / var[1], 4.0, 0.4 * 4.0);
}

TEST(TraceStatistics, TracelessObservableKeepsOrderOneFluctuations) {
    const int n = 256;
    const auto pi = make_pi<double>(PiSpec<double>::pure_state(), n);
    const auto good = make_observable<double>(ObservableSpec<double>::near_diagonal(1.0, 0.25), n);
    const auto bad = make_observable<double>(ObservableSpec<double>::staggered(), n);
    std::vector<mo::TraceProbe<double>> probes{{&pi, &good, {2.0}, 0.0}, {&pi, &bad, {2.0}, 0.0}};
    const auto s = mo::estimate_mean_and_variance_of_trace(goe(n), probes, 60, threaded());
    EXPECT_GT(s[1].variance[0], 10.0 * s[0].variance[0]);
}
