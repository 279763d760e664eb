#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "rmtherm/core.hpp"
#include "rmtherm/quadrature.hpp"
#include "rmtherm/special.hpp"
#include "rmtherm/states.hpp"

namespace rmtherm::analytics {

struct TimeScales {
    double tau_lambda = 0.0;  // 1/(2 lambda)
    double tau_d = 0.0;       // 1/d = N/(pi lambda)
    double ratio = 0.0;       // tau_lambda/tau_d = pi/(2N)
};

inline TimeScales time_scales(int n, double lambda) {
    if (n < 2) throw InvalidArgument("time_scales: N must be >= 2");
    if (!(lambda > 0.0)) throw InvalidArgument("time_scales: lambda must be positive");
    TimeScales s;
    s.tau_lambda = 1.0 / (2.0 * lambda);
    s.tau_d = n / (pi * lambda);
    s.ratio = pi / (2.0 * n);
    return s;
}

// Mean level density, normalized to N states on [-2 lambda, 2 lambda].
inline double semicircle(double e, int n, double lambda) {
    if (!(lambda > 0.0)) throw InvalidArgument("semicircle: lambda must be positive");
    const double x = e / (2.0 * lambda);
    if (std::abs(x) >= 1.0) return 0.0;
    return n / (pi * lambda) * std::sqrt(1.0 - x * x);
}

// Number of states below e under the semicircle.
inline double semicircle_count(double e, int n, double lambda) {
    const double x = std::clamp(e / (2.0 * lambda), -1.0, 1.0);
    return n / pi * (x * std::sqrt(1.0 - x * x) + std::asin(x) + 0.5 * pi);
}

// g(tau) = (4/pi) int_0^1 sqrt(1 - x^2) cos(x tau) dx, evaluated with
// x = sin(theta) and panels split at the zeros of the cosine.
inline double g(double tau, double abs_tol = 1e-10) {
    const double a = std::abs(tau);
    if (a == 0.0) return 1.0;
    std::vector<double> cuts{0.0};
    for (int k = 0;; ++k) {
        const double s = (k + 0.5) * pi / a;
        if (s >= 1.0) break;
        cuts.push_back(std::asin(s));
    }
    cuts.push_back(0.5 * pi);
    auto integrand = [a](double th) {
        const double c = std::cos(th);
        return c * c * std::cos(a * std::sin(th));
    };
    quadrature::Options opt;
    opt.abs_tol = abs_tol * pi / 4.0;
    return 4.0 / pi * quadrature::integrate_panels(integrand, cuts, opt).value;
}

// Smooth upper envelope 2 sqrt(J1^2 + Y1^2)/tau of |g| (tau > 0).
inline double g_envelope(double tau) {
    const double a = std::abs(tau);
    const double j = std::cyl_bessel_j(1.0, a);
    const double y = std::cyl_neumann(1.0, a);
    return 2.0 * std::sqrt(j * j + y * y) / a;
}

// Two-level cluster function at spacing y (units of the mean spacing).
inline double y2(double y, EnsembleKind kind) {
    const double ay = std::abs(y);
    const double s = special::sinc(pi * ay);
    if (kind == EnsembleKind::GUE) return s * s;
    const double tail = (0.5 * pi - special::sine_integral(pi * ay)) / pi;  // int_y^inf s
    const double ds = pi * special::sinc_derivative(pi * ay);
    return s * s + tail * ds;
}

// int_{-inf}^{inf} Y2 dy: quadrature on [-cutoff, cutoff] plus the tail beyond.
inline double y2_normalization(EnsembleKind kind, double cutoff = 200.0) {
    if (!(cutoff > 1.0)) throw InvalidArgument("y2_normalization: cutoff must exceed 1");
    std::vector<double> cuts;
    for (int k = 0; k < cutoff; ++k) cuts.push_back(k);
    cuts.push_back(cutoff);
    quadrature::Options opt;
    opt.abs_tol = 1e-11;
    const double body = quadrature::integrate_panels([kind](double y) { return y2(y, kind); }, cuts, opt).value;
    double tail;
    if (kind == EnsembleKind::GUE) {
        const double s = std::sin(pi * cutoff);
        tail = (s * s / cutoff + pi * (0.5 * pi - special::sine_integral(2.0 * pi * cutoff))) / (pi * pi);
    } else {
        tail = 1.0 / (pi * pi * cutoff);
    }
    return 2.0 * (body + tail);
}

// Fourier transform int Y2(y) cos(u y) dy in closed form, 1 - K(|u|/2pi).
inline double b_hat(double u, EnsembleKind kind) {
    return 1.0 - special::form_factor_complement(std::abs(u) / (2.0 * pi), kind);
}

enum class CorrConvention {
    connected_form_factor,  // exact connected two-time correlator to order 1/N^2 (default)
    product_form,           // (8/pi)(cos x/x^2 - sin x/x^3) (1/N) b_hat
    stated_prefactor,       // half the product form with opposite sign: +4/(3 pi N) b_hat at equal times
};

inline std::string_view to_string(CorrConvention c) {
    switch (c) {
        case CorrConvention::connected_form_factor: return "connected_form_factor";
        case CorrConvention::product_form: return "product_form";
        case CorrConvention::stated_prefactor: return "stated_prefactor";
    }
    return "?";
}

inline CorrConvention parse_corr_convention(std::string_view s) {
    for (auto c : {CorrConvention::connected_form_factor, CorrConvention::product_form,
                   CorrConvention::stated_prefactor})
        if (s == to_string(c)) return c;
    throw InvalidArgument("unknown corr convention '" + std::string(s) + "'");
}

namespace detail {

// (cos x)/x^2 - (sin x)/x^3, with its Taylor series near zero.
inline double kernel(double x) {
    if (std::abs(x) < 0.1) {
        const double x2 = x * x;
        return -1.0 / 3.0 + x2 / 30.0 - x2 * x2 / 840.0 + x2 * x2 * x2 / 45360.0;
    }
    return std::cos(x) / (x * x) - std::sin(x) / (x * x * x);
}

inline double bessel_j(int k, double x) {
    const double v = std::cyl_bessel_j(static_cast<double>(k), std::abs(x));
    return (x < 0 && (k % 2 == 1)) ? -v : v;
}

// sum_{k>=1} k J_k(x1) J_k(x2)
inline double chebyshev_sum(double x1, double x2) {
    if (x1 == 0.0 || x2 == 0.0) return 0.0;
    const int kmax = static_cast<int>(std::max(std::abs(x1), std::abs(x2))) + 40;
    double sum = 0.0;
    for (int k = 1; k <= kmax; ++k) sum += k * bessel_j(k, x1) * bessel_j(k, x2);
    return sum;
}

// int dE rho(E) cos(E dt) [K(|T|/(2 pi rho)) - (2/beta)|T|/(2 pi rho)]
inline double form_factor_integral(double dt, double mean_t, int n, double lambda, EnsembleKind kind) {
    const double a = std::abs(mean_t) * lambda / (2.0 * n);
    if (a == 0.0) return 0.0;
    const double slope = 2.0 / dyson_index(kind);
    const double w = 2.0 * lambda * std::abs(dt);
    auto integrand = [&](double th) {
        const double c = std::cos(th);
        if (c <= 0.0) return 0.0;
        const double arg = a / c;
        const double h = special::form_factor_complement(arg, kind) - slope * arg;
        return c * c * std::cos(w * std::sin(th)) * h;
    };
    std::vector<double> cuts{0.0};
    for (int k = 0; w > 0.0; ++k) {
        const double s = (k + 0.5) * pi / w;
        if (s >= 1.0) break;
        cuts.push_back(std::asin(s));
    }
    if (a < 1.0) cuts.push_back(std::acos(a));
    cuts.push_back(0.5 * pi);
    std::sort(cuts.begin(), cuts.end());
    quadrature::Options opt;
    opt.abs_tol = 1e-12;
    return 2.0 * (2.0 * n / pi) * quadrature::integrate_panels(integrand, cuts, opt).value;
}

}  // namespace detail

// Connected correlator <f(t1) f(t2)^*> - <f(t1)><f(t2)>^* at physical times.
inline double corr_f(double t1, double t2, int n, double lambda, EnsembleKind kind,
                     CorrConvention convention = CorrConvention::connected_form_factor) {
    if (n < 2) throw InvalidArgument("corr_f: N must be >= 2");
    const TimeScales ts = time_scales(n, lambda);
    switch (convention) {
        case CorrConvention::product_form:
        case CorrConvention::stated_prefactor: {
            const double x = (t1 - t2) / ts.tau_lambda;
            const double v = 8.0 / pi * detail::kernel(x) / n * b_hat((t1 + t2) / (2.0 * ts.tau_d), kind);
            return convention == CorrConvention::product_form ? v : -0.5 * v;
        }
        case CorrConvention::connected_form_factor: {
            const double x1 = t1 / ts.tau_lambda;
            const double x2 = t2 / ts.tau_lambda;
            const double cheb = 2.0 / dyson_index(kind) * detail::chebyshev_sum(x1, x2);
            const double ff = detail::form_factor_integral(t1 - t2, 0.5 * (t1 + t2), n, lambda, kind);
            return (cheb + ff) / (static_cast<double>(n) * n);
        }
    }
    return 0.0;
}

// <f(t)> including the leading finite-N correction (GOE only; GUE's is O(1/N^2)).
inline double mean_f(double t, int n, double lambda, EnsembleKind kind) {
    const double tau = t / time_scales(n, lambda).tau_lambda;
    double v = g(tau);
    if (kind == EnsembleKind::GOE) v += (std::cos(tau) - std::cyl_bessel_j(0.0, std::abs(tau))) / (2.0 * n);
    return v;
}

// <|f(t)|^2> = g^2 + corr(t, t). Without the correlated part this is g^2.
inline double c_rm(double t, int n, double lambda, EnsembleKind kind, bool include_corr = true,
                   CorrConvention convention = CorrConvention::connected_form_factor) {
    const double gv = g(t / time_scales(n, lambda).tau_lambda);
    return gv * gv + (include_corr ? corr_f(t, t, n, lambda, kind, convention) : 0.0);
}

// Ensemble mean of Tr(A rho(t)) to order 1/N. GOE carries the transpose
// offset Tr(A^T Pi)/N; GUE does not.
inline double predicted_mean(double t, const PairTraces& tr, int n, double lambda, EnsembleKind kind,
                             bool include_corr = true,
                             CorrConvention convention = CorrConvention::connected_form_factor) {
    const double form = c_rm(t, n, lambda, kind, include_corr, convention);
    double v = tr.tr_a / n + tr.tr_a_pi * form;
    if (kind == EnsembleKind::GOE) v += tr.tr_at_pi / n;
    return v;
}

// Exact mean of Tr(A rho(t)) over Haar-distributed eigenvectors given
// F = <|f(t)|^2>; the eigenvalue average enters only through F.
inline double invariant_mean(double form, const PairTraces& tr, int n, EnsembleKind kind) {
    const double a = tr.tr_a_pi;
    const double b = tr.tr_at_pi;
    const double c = tr.tr_a;
    const double nn = n;
    const double s = nn * nn * form;
    if (kind == EnsembleKind::GOE)
        return (a + b + c) / (nn + 2.0) + (s - nn) * ((nn + 1.0) * a - b - c) / (nn * (nn - 1.0) * (nn + 2.0));
    return (a + c) / (nn + 1.0) + (s - nn) * (nn * a - c) / (nn * (nn * nn - 1.0));
}

inline double finite_n_mean(double t, const PairTraces& tr, int n, double lambda, EnsembleKind kind,
                            CorrConvention convention = CorrConvention::connected_form_factor) {
    const double m = mean_f(t, n, lambda, kind);
    const double form = m * m + corr_f(t, t, n, lambda, kind, convention);
    return invariant_mean(form, tr, n, kind);
}

// sqrt(tau_lambda tau_d), where g^2 is of order 1/N.
inline double crossover_time(int n, double lambda) {
    const TimeScales s = time_scales(n, lambda);
    return std::sqrt(s.tau_lambda * s.tau_d);
}

struct CrossingTimes {
    double scale = 0.0;          // sqrt(tau_lambda tau_d)
    double envelope = 0.0;       // envelope of g^2 falls to 1/N
    double first_below = 0.0;    // first time g^2 drops below 1/N
    double last_above = 0.0;     // last time g^2 >= 1/N
};

// Times (physical) at which g^2 reaches the 1/N level.
inline CrossingTimes thermalization_crossing(int n, double lambda) {
    const TimeScales s = time_scales(n, lambda);
    const double level = 1.0 / n;
    CrossingTimes out;
    out.scale = crossover_time(n, lambda);
    auto bisect = [](auto&& fn, double lo, double hi) {
        for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++i) {
            const double mid = 0.5 * (lo + hi);
            (fn(mid) ? hi : lo) = mid;
        }
        return 0.5 * (lo + hi);
    };
    // Envelope is decreasing; find where it drops below sqrt(level).
    double hi = 1.0;
    while (g_envelope(hi) * g_envelope(hi) >= level) hi *= 2.0;
    const double tau_env = bisect([&](double x) { return g_envelope(x) * g_envelope(x) < level; }, 0.5 * hi, hi);
    out.envelope = tau_env * s.tau_lambda;

    const double step = 0.01;
    auto below = [&](double x) { const double v = g(x); return v * v < level; };
    double x = 0.0;
    while (!below(x + step)) x += step;
    out.first_below = bisect(below, x, x + step) * s.tau_lambda;

    double last = 0.0;
    for (double y = 0.0; y <= tau_env + 1.0; y += step)
        if (!below(y)) last = y;
    out.last_above = bisect([&](double y) { return below(y); }, last, last + step) * s.tau_lambda;
    return out;
}

// (Tr A Pi)^2 * 2 g^2 [corr(-t, t) + corr(t, t)]
inline double variance_leading_order(double t, int n, double lambda, double tr_a_pi, EnsembleKind kind,
                                     CorrConvention convention = CorrConvention::connected_form_factor) {
    if (tr_a_pi == 0.0) return 0.0;
    const double gv = g(t / time_scales(n, lambda).tau_lambda);
    const double c = corr_f(-t, t, n, lambda, kind, convention) + corr_f(t, t, n, lambda, kind, convention);
    return tr_a_pi * tr_a_pi * 2.0 * gv * gv * c;
}

// |F(omega)|^2 at fixed energy. gaussian: exp(-omega^2/(2 w^2)).
// rectangular: indicator of |omega| <= w/2. custom: piecewise linear table.
struct BandProfile {
    enum class Shape { gaussian, rectangular, custom };
    Shape shape = Shape::gaussian;
    double width = 0.2;  // omega_0
    std::vector<double> omega;
    std::vector<double> weight;

    static BandProfile gaussian(double w) { return {Shape::gaussian, w}; }
    static BandProfile rectangular(double w) { return {Shape::rectangular, w}; }
    static BandProfile custom(std::vector<double> om, std::vector<double> wt) {
        return {Shape::custom, 0.0, std::move(om), std::move(wt)};
    }
    // Default for a spectrum of scale lambda: gaussian with omega_0 = lambda/5.
    static BandProfile default_for(double lambda) { return gaussian(lambda / 5.0); }

    void validate() const {
        if (shape != Shape::custom) {
            if (!(width > 0.0)) throw InvalidArgument("band profile width must be positive");
            return;
        }
        if (omega.size() < 2 || omega.size() != weight.size())
            throw InvalidArgument("custom band profile needs matching omega/weight tables of length >= 2");
        double mass = 0.0;
        for (std::size_t i = 0; i < omega.size(); ++i) {
            if (!(weight[i] >= 0.0)) throw InvalidArgument("band profile must be nonnegative");
            if (i > 0) {
                if (!(omega[i] > omega[i - 1])) throw InvalidArgument("band profile omega must increase");
                mass += 0.5 * (weight[i] + weight[i - 1]) * (omega[i] - omega[i - 1]);
            }
        }
        if (!(mass > 0.0)) throw InvalidArgument("band profile has zero mass");
    }

    double operator()(double w) const {
        switch (shape) {
            case Shape::gaussian: return std::exp(-w * w / (2.0 * width * width));
            case Shape::rectangular: return std::abs(w) <= 0.5 * width ? 1.0 : 0.0;
            case Shape::custom: {
                if (w < omega.front() || w > omega.back()) return 0.0;
                auto it = std::upper_bound(omega.begin(), omega.end(), w);
                if (it == omega.end()) return weight.back();
                const std::size_t i = static_cast<std::size_t>(it - omega.begin());
                const double f = (w - omega[i - 1]) / (omega[i] - omega[i - 1]);
                return weight[i - 1] + f * (weight[i] - weight[i - 1]);
            }
        }
        return 0.0;
    }
};

// Normalized cosine transform of |F|^2 at physical time t; c_eth(0) = 1.
inline double c_eth(double t, const BandProfile& p) {
    p.validate();
    switch (p.shape) {
        case BandProfile::Shape::gaussian: {
            const double x = p.width * t;
            return std::exp(-0.5 * x * x);
        }
        case BandProfile::Shape::rectangular:
            return special::sinc(0.5 * p.width * t);
        case BandProfile::Shape::custom: {
            quadrature::Options opt;
            opt.abs_tol = 1e-12;
            double num = 0.0;
            double den = 0.0;
            for (std::size_t i = 0; i + 1 < p.omega.size(); ++i) {
                const double a = p.omega[i];
                const double b = p.omega[i + 1];
                const double a0 = p.weight[i];
                const double slope = (p.weight[i + 1] - a0) / (b - a);
                auto f = [&](double w) { return (a0 + slope * (w - a)) * std::cos(w * t); };
                const int pieces = 1 + static_cast<int>(std::abs(t) * (b - a) / pi);
                std::vector<double> cuts;
                for (int k = 0; k <= pieces; ++k) cuts.push_back(a + (b - a) * k / pieces);
                num += quadrature::integrate_panels(f, cuts, opt).value;
                den += 0.5 * (p.weight[i] + p.weight[i + 1]) * (b - a);
            }
            return num / den;
        }
    }
    return 0.0;
}

}  // namespace rmtherm::analytics
