#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rmtherm/analytics.hpp"
#include "rmtherm/moments.hpp"
#include "rmtherm/quadrature.hpp"

using namespace rmtherm;
namespace an = rmtherm::analytics;

namespace {

PairTraces traces(double tr_a, double tr_a_pi, double tr_at_pi) {
    PairTraces t;
    t.tr_a = tr_a;
    t.tr_a_pi = tr_a_pi;
    t.tr_at_pi = tr_at_pi;
    return t;
}

}  // namespace

TEST(TimeScales, RatioAndValues) {
    for (int n : {2, 10, 1000}) {
        const auto s = an::time_scales(n, 1.7);
        EXPECT_DOUBLE_EQ(s.tau_lambda / s.tau_d, pi / (2.0 * n));
        EXPECT_DOUBLE_EQ(s.ratio, pi / (2.0 * n));
        EXPECT_LT(s.ratio, 1.0);
    }
    EXPECT_THROW(an::time_scales(1, 1.0), InvalidArgument);
    EXPECT_THROW(an::time_scales(10, 0.0), InvalidArgument);
}

TEST(Semicircle, Examples) {
    EXPECT_NEAR(an::semicircle(0.0, 100, 1.0), 31.831, 5e-4);
    EXPECT_EQ(an::semicircle(2.0, 100, 1.0), 0.0);
    EXPECT_EQ(an::semicircle(-2.5, 100, 1.0), 0.0);
    quadrature::Options opt;
    opt.abs_tol = 1e-10;
    const double mass = quadrature::integrate([](double e) { return an::semicircle(e, 100, 1.0); }, -2.0, 2.0, opt).value;
    EXPECT_NEAR(mass / 100.0, 1.0, 1e-8);
    EXPECT_NEAR(an::semicircle_count(2.0, 100, 1.0), 100.0, 1e-12);
    EXPECT_NEAR(an::semicircle_count(0.0, 100, 1.0), 50.0, 1e-12);
    EXPECT_THROW(an::semicircle(0.0, 10, -1.0), InvalidArgument);
}

TEST(G, BasicProperties) {
    EXPECT_EQ(an::g(0.0), 1.0);
    EXPECT_EQ(an::g(12.3), an::g(-12.3));
    EXPECT_NEAR(an::g(10.0), oracle::g(10.0), 1e-8);
}

TEST(G, AgreesWithBesselSeriesOracle) {
    double worst = 0.0;
    for (double tau = 0.0; tau <= 50.0; tau += 0.05) worst = std::max(worst, std::abs(an::g(tau) - oracle::g(tau)));
    EXPECT_LT(worst, 1e-8);
}

TEST(G, EnvelopeBound) {
    for (double tau = 1.0; tau <= 100.0; tau += 0.01) {
        EXPECT_LE(std::abs(an::g(tau)), 2.0 / tau);
        EXPECT_LE(std::abs(an::g(tau)), an::g_envelope(tau) + 1e-9);
    }
}

TEST(Y2, Examples) {
    EXPECT_EQ(an::y2(0.0, EnsembleKind::GUE), 1.0);
    EXPECT_NEAR(an::y2(1.0, EnsembleKind::GUE), 0.0, 1e-30);
    EXPECT_NEAR(an::y2(0.0, EnsembleKind::GOE), 1.0, 1e-15);
    EXPECT_NEAR(an::y2(1e-6, EnsembleKind::GOE), 1.0, 1e-5);
}

TEST(Y2, EvenBoundedAndDecaying) {
    for (auto k : {EnsembleKind::GOE, EnsembleKind::GUE}) {
        for (double y = 0.0; y <= 30.0; y += 0.01) {
            EXPECT_EQ(an::y2(y, k), an::y2(-y, k));
            EXPECT_LE(std::abs(an::y2(y, k)), 1.05);
        }
        EXPECT_LT(std::abs(an::y2(500.5, k)), 1e-5);
    }
    // The GOE correction to s^2 dies off at large spacing.
    for (double y : {40.25, 80.75}) {
        const double s = std::sin(pi * y) / (pi * y);
        EXPECT_NEAR(an::y2(y, EnsembleKind::GOE), s * s, 2.0 / (pi * pi * y * y));
    }
}

TEST(Y2Normalization, IsOneForBothEnsembles) {
    EXPECT_NEAR(an::y2_normalization(EnsembleKind::GUE), 1.0, 1e-6);
    EXPECT_NEAR(an::y2_normalization(EnsembleKind::GOE), 1.0, 1e-4);
    EXPECT_LT(std::abs(an::y2_normalization(EnsembleKind::GOE, 100.0) - an::y2_normalization(EnsembleKind::GOE, 200.0)),
              1e-4);
}

TEST(CorrF, TimeReversalEvenness) {
    for (auto conv : {an::CorrConvention::connected_form_factor, an::CorrConvention::product_form,
                      an::CorrConvention::stated_prefactor}) {
        for (auto k : {EnsembleKind::GOE, EnsembleKind::GUE}) {
            for (auto [t1, t2] : std::vector<std::pair<double, double>>{{0.3, 1.1}, {2.0, -0.5}, {7.0, 7.0}}) {
                EXPECT_NEAR(an::corr_f(t1, t2, 200, 1.0, k, conv), an::corr_f(-t1, -t2, 200, 1.0, k, conv), 1e-15);
            }
        }
    }
}

TEST(CorrF, ProductFormEqualTimeMagnitude) {
    const int n = 100;
    const double v = an::corr_f(0.0, 0.0, n, 1.0, EnsembleKind::GOE, an::CorrConvention::product_form);
    EXPECT_NEAR(std::abs(v) * n, 8.0 / (3.0 * pi) * an::y2_normalization(EnsembleKind::GOE), 1e-6);
    EXPECT_NEAR(std::abs(v) * n, 0.849, 5e-4);
    const double s = an::corr_f(0.0, 0.0, n, 1.0, EnsembleKind::GOE, an::CorrConvention::stated_prefactor);
    EXPECT_NEAR(s * n, 4.0 / (3.0 * pi), 1e-12);
}

TEST(CorrF, ProductFormHalvesWhenNDoubles) {
    // Fixed physical times; b_hat depends on (t1 + t2)/(2 tau_d), so the halving
    // is exact only where b_hat is flat. Its argument vanishes at t1 = -t2.
    for (auto [t1, t2] : std::vector<std::pair<double, double>>{{0.0, 0.0}, {1.5, -1.5}, {0.25, -0.25}}) {
        const double a = an::corr_f(t1, t2, 300, 1.0, EnsembleKind::GOE, an::CorrConvention::product_form);
        const double b = an::corr_f(t1, t2, 600, 1.0, EnsembleKind::GOE, an::CorrConvention::product_form);
        EXPECT_NEAR(b / a, 0.5, 1e-10);
    }
}

TEST(CorrF, ConnectedScalesAsOneOverNAtFixedScaledTime) {
    // N^2 corr(t, t) for t << tau_d grows like t; compare at equal t/tau_lambda.
    const double a = an::corr_f(2.0, 2.0, 2000, 1.0, EnsembleKind::GUE);
    const double b = an::corr_f(2.0, 2.0, 4000, 1.0, EnsembleKind::GUE);
    EXPECT_NEAR(b / a, 0.25, 0.01);
    EXPECT_EQ(an::corr_f(0.0, 0.0, 100, 1.0, EnsembleKind::GOE), 0.0);
}

TEST(CorrF, FrozenConnectedValues) {
    // N^2 corr(t, t), GOE, N = 500, lambda = 1.
    const std::vector<std::pair<double, double>> frozen{
        {0.5, 0.44195}, {1.0, 1.27072}, {2.5, 3.16796}, {5.0, 6.29527}, {10.0, 12.52884}};
    for (auto [t, v] : frozen) EXPECT_NEAR(an::corr_f(t, t, 500, 1.0, EnsembleKind::GOE) * 500.0 * 500.0, v, 5e-5);
}

TEST(CorrF, ConnectedMatchesMonteCarlo) {
    const int n = 100;
    const EnsembleSpec spec{EnsembleKind::GOE, n, 1.0, 77};
    const std::vector<double> taus{1.0, 2.0, 5.0, 10.0};
    moments::Options opt;
    opt.threads = 0;
    const auto mc = moments::estimate_form_factor<double>(spec, taus, 2000, opt);
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const double t = physical_time(taus[i], 1.0);
        const double pred = an::corr_f(t, t, n, 1.0, EnsembleKind::GOE);
        EXPECT_LE(std::abs(mc.connected[i] - pred), 4.0 * mc.connected_se[i]) << "tau=" << taus[i];
        // The 1/N mean correction is visible at this N.
        EXPECT_LE(std::abs(mc.mean_f[i].real() - an::mean_f(t, n, 1.0, EnsembleKind::GOE)), 4.0 * mc.mean_f_se[i]);
    }
}

TEST(CRm, LimitsAndDecay) {
    for (double t : {0.0, 0.7, 3.0}) {
        const double tau = t / 0.5;
        EXPECT_NEAR(an::c_rm(t, 1000, 1.0, EnsembleKind::GOE, false), std::pow(an::g(tau), 2), 1e-15);
    }
    EXPECT_NEAR(an::c_rm(0.0, 1000, 1.0, EnsembleKind::GOE), 1.0, 1e-2);
    for (double t = 5.0; t <= 40.0; t += 1.3) {
        const double c = an::corr_f(t, t, 1000, 1.0, EnsembleKind::GOE);
        EXPECT_LE(an::c_rm(t, 1000, 1.0, EnsembleKind::GOE), std::pow(0.5 * 2.0 / t, 2) * 4.0 + std::abs(c));
        EXPECT_GE(an::c_rm(t, 1000, 1.0, EnsembleKind::GOE, false), 0.0);
    }
}

TEST(PredictedMean, Examples) {
    const int n = 100;
    const auto tr = traces(50.0, 0.6, 0.6);
    // Large t: g and corr vanish (corr only to O(1/N^2)).
    const double far = an::predicted_mean(1e4, tr, n, 1.0, EnsembleKind::GOE, false);
    EXPECT_NEAR(far, 50.0 / n + 0.6 / n, 1e-7);
    EXPECT_NEAR(an::predicted_mean(0.0, tr, n, 1.0, EnsembleKind::GOE, false), 0.5 + 0.6 + 0.006, 1e-15);
    EXPECT_NEAR(an::predicted_mean(0.0, tr, n, 1.0, EnsembleKind::GUE, false), 0.5 + 0.6, 1e-15);
    for (double t : {0.4, 2.0, 9.0}) {
        const double goe = an::predicted_mean(t, tr, n, 1.0, EnsembleKind::GOE, false);
        const double gue = an::predicted_mean(t, tr, n, 1.0, EnsembleKind::GUE, false);
        EXPECT_NEAR(goe - gue, tr.tr_at_pi / n, 1e-15);
        EXPECT_EQ(an::predicted_mean(t, tr, n, 1.0, EnsembleKind::GOE), an::predicted_mean(-t, tr, n, 1.0,
                                                                                            EnsembleKind::GOE));
    }
}

TEST(InvariantMean, ExactLimits) {
    const int n = 40;
    const auto tr = traces(12.0, 0.7, 0.4);
    // F = 1 means U is a pure phase: Tr(A Pi) exactly.
    EXPECT_NEAR(an::invariant_mean(1.0, tr, n, EnsembleKind::GOE), tr.tr_a_pi, 1e-14);
    EXPECT_NEAR(an::invariant_mean(1.0, tr, n, EnsembleKind::GUE), tr.tr_a_pi, 1e-14);
}

// Haar eigenvectors with a fixed spectrum, sampled directly.
TEST(InvariantMean, MatchesHaarAverageAtFixedSpectrum) {
    const int n = 3;
    const std::vector<double> energies{-0.9, 0.2, 1.4};
    const double t = 0.8;
    ComplexVector phase(n);
    Complex tr_u = 0.0;
    for (int a = 0; a < n; ++a) tr_u += (phase[a] = std::exp(Complex(0.0, -energies[a] * t)));
    const double form = std::norm(tr_u) / (n * n);
    ComplexMatrix a(n, n), p(n, n);
    a << 1.0, Complex(0.3, 0.2), 0.1, Complex(0.3, -0.2), -0.5, Complex(0.0, 0.4), 0.1, Complex(0.0, -0.4), 0.8;
    p << 0.5, Complex(0.1, 0.1), 0.0, Complex(0.1, -0.1), 0.3, 0.05, 0.0, 0.05, 0.2;
    RealMatrix ar = a.real(), pr = p.real();
    for (auto kind : {EnsembleKind::GUE, EnsembleKind::GOE}) {
        const bool goe = kind == EnsembleKind::GOE;
        const ComplexMatrix am = goe ? ComplexMatrix(ar.cast<Complex>()) : a;
        const ComplexMatrix pm = goe ? ComplexMatrix(pr.cast<Complex>()) : p;
        PairTraces tr;
        tr.tr_a = std::real(am.trace());
        tr.tr_a_pi = std::real((am * pm).trace());
        tr.tr_at_pi = std::real((am.transpose() * pm).trace());
        const int m = 200000;
        std::vector<double> v(m);
        const EnsembleSpec spec{kind, n, 1.0, 5150};
        for (int r = 0; r < m; ++r) {
            ComplexMatrix vecs;
            if (goe) vecs = decompose<double>(sample_hamiltonian<double>(spec, r)).eigenvectors.cast<Complex>();
            else vecs = decompose<Complex>(sample_hamiltonian<Complex>(spec, r)).eigenvectors;
            const ComplexMatrix u = vecs * phase.asDiagonal() * vecs.adjoint();
            v[r] = std::real((am * u * pm * u.adjoint()).trace());
        }
        double mean = 0.0, sq = 0.0;
        for (double x : v) mean += x;
        mean /= m;
        for (double x : v) sq += (x - mean) * (x - mean);
        const double se = std::sqrt(sq / (m - 1.0) / m);
        EXPECT_NEAR(an::invariant_mean(form, tr, n, kind), mean, 4.0 * se) << to_string(kind);
    }
}

// The leading-order form keeps Tr A / N as a constant offset, while the exact
// invariant average multiplies it by (1 - F): the two differ by -(Tr A / N) F.
TEST(InvariantMean, DiffersFromLeadingOrderByOffsetTimesForm) {
    const int n = 2000;
    const auto tr = traces(1000.0, 1.0, 1.0);
    for (double t : {0.5, 2.0, 5.0, 20.0}) {
        const double lead = an::predicted_mean(t, tr, n, 1.0, EnsembleKind::GOE);
        const double exact = an::finite_n_mean(t, tr, n, 1.0, EnsembleKind::GOE);
        const double form = an::c_rm(t, n, 1.0, EnsembleKind::GOE);
        EXPECT_NEAR(exact - lead, -(tr.tr_a / n) * form, 3.0 / n);
    }
}

TEST(Crossover, Examples) {
    EXPECT_NEAR(an::crossover_time(1000, 1.0), 12.6157, 5e-4);
    EXPECT_NEAR(an::crossover_time(50, 1.0), 0.5 * std::sqrt(100.0 / pi), 1e-12);
    double prev = 0.0;
    for (int n : {2, 10, 100, 1000, 10000}) {
        EXPECT_GT(an::crossover_time(n, 1.0), prev);
        prev = an::crossover_time(n, 1.0);
    }
}

TEST(Crossover, CrossingTimesFrozen) {
    const auto c = an::thermalization_crossing(1000, 1.0);
    EXPECT_NEAR(c.scale, 12.6157, 5e-4);
    EXPECT_NEAR(c.envelope, 6.83239, 5e-4);
    EXPECT_NEAR(c.first_below, 1.84457, 5e-4);
    EXPECT_NEAR(c.last_above, 6.14922, 5e-4);
    const double g_last = an::g(c.last_above / 0.5);
    EXPECT_NEAR(g_last * g_last, 1e-3, 1e-8);
}

TEST(CEth, ProfilesAndStructure) {
    const auto gauss = an::BandProfile::gaussian(0.4);
    const auto rect = an::BandProfile::rectangular(0.4);
    EXPECT_EQ(an::c_eth(0.0, gauss), 1.0);
    EXPECT_EQ(an::c_eth(0.0, rect), 1.0);
    EXPECT_NEAR(an::c_eth(3.0, gauss), std::exp(-0.5 * 0.16 * 9.0), 1e-15);
    for (int k = 1; k <= 3; ++k) EXPECT_NEAR(an::c_eth(2.0 * pi * k / 0.4, rect), 0.0, 1e-15);
    const auto custom = an::BandProfile::custom({-0.2, 0.2}, {1.0, 1.0});
    for (double t : {0.0, 1.0, 7.0, 40.0}) EXPECT_NEAR(an::c_eth(t, custom), an::c_eth(t, rect), 1e-10);
    EXPECT_THROW(an::c_eth(1.0, an::BandProfile::gaussian(0.0)), InvalidArgument);
    EXPECT_THROW(an::c_eth(1.0, an::BandProfile::custom({0.0, 1.0}, {0.0, 0.0})), InvalidArgument);
    EXPECT_EQ(an::BandProfile::default_for(2.0).width, 0.4);
}

TEST(CEth, SignChangesContrastWithCRm) {
    const auto rect = an::BandProfile::rectangular(0.5);
    int eth_flips = 0, rm_negative = 0;
    double prev = 1.0;
    for (double t = 0.05; t <= 100.0; t += 0.05) {
        const double c = an::c_eth(t, rect);
        if (c * prev < 0) ++eth_flips;
        prev = c;
        if (an::c_rm(t, 1000, 1.0, EnsembleKind::GOE, false) < 0.0) ++rm_negative;
    }
    EXPECT_GT(eth_flips, 3);
    EXPECT_EQ(rm_negative, 0);
}

TEST(VarianceLeadingOrder, ScalingAndZeroPrefactor) {
    EXPECT_EQ(an::variance_leading_order(1.0, 500, 1.0, 0.0, EnsembleKind::GOE), 0.0);
    // Halving in N at fixed scaled time; b_hat is evaluated at (t1+t2)/2 = 0 for
    // the (-t, t) pair and is near flat for (t, t) when t << tau_d.
    for (double t : {0.5, 1.0}) {
        const double a = an::variance_leading_order(t, 4000, 1.0, 1.0, EnsembleKind::GOE,
                                                    an::CorrConvention::product_form);
        const double b = an::variance_leading_order(t, 8000, 1.0, 1.0, EnsembleKind::GOE,
                                                    an::CorrConvention::product_form);
        EXPECT_NEAR(b / a, 0.5, 1e-3);
    }
    for (double t = 20.0; t <= 200.0; t += 20.0) {
        const double g = an::g(2.0 * t);
        EXPECT_LE(std::abs(an::variance_leading_order(t, 500, 1.0, 1.0, EnsembleKind::GOE)), 10.0 * g * g / 500 + 1e-12);
    }
}
