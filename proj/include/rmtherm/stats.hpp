#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "rmtherm/core.hpp"

namespace rmtherm::stats {

// Pairwise summation in index order; the result depends only on the input
// sequence, never on how it was produced.
template <class T>
T pairwise_sum(std::span<const T> x) {
    if (x.size() <= 8) {
        T s{};
        for (const T& v : x) s += v;
        return s;
    }
    const std::size_t h = x.size() / 2;
    return pairwise_sum(x.first(h)) + pairwise_sum(x.subspan(h));
}

template <class T>
T mean(std::span<const T> x) {
    if (x.empty()) throw InvalidArgument("mean of empty sample");
    return pairwise_sum(x) / static_cast<double>(x.size());
}

// Unbiased sample variance; for complex data the variance of the modulus
// around the mean, E|x - m|^2.
template <class T>
double variance(std::span<const T> x) {
    if (x.size() < 2) return 0.0;
    const T m = mean(x);
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = std::norm(x[i] - m);
    return pairwise_sum(std::span<const double>(d)) / static_cast<double>(x.size() - 1);
}

template <class T>
double standard_error(std::span<const T> x) {
    if (x.size() < 2) return 0.0;
    return std::sqrt(variance(x) / static_cast<double>(x.size()));
}

struct Summary {
    double mean = 0.0;
    double variance = 0.0;
    double mean_se = 0.0;
    double variance_se = 0.0;
    std::size_t count = 0;
};

// Mean, unbiased variance and their standard errors. The variance error uses
// the fourth central moment: Var(s^2) ~ (m4 - s^4 (M-3)/(M-1))/M.
inline Summary summarize(std::span<const double> x) {
    Summary s;
    s.count = x.size();
    if (x.empty()) return s;
    s.mean = mean(x);
    if (x.size() < 2) return s;
    const double m = s.mean;
    std::vector<double> d2(x.size()), d4(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - m;
        d2[i] = d * d;
        d4[i] = d2[i] * d2[i];
    }
    const double n = static_cast<double>(x.size());
    s.variance = pairwise_sum(std::span<const double>(d2)) / (n - 1.0);
    s.mean_se = std::sqrt(s.variance / n);
    const double m4 = pairwise_sum(std::span<const double>(d4)) / n;
    const double v = (m4 - s.variance * s.variance * (n - 3.0) / (n - 1.0)) / n;
    s.variance_se = std::sqrt(std::max(v, 0.0));
    return s;
}

struct JackknifeResult {
    Complex estimate;   // bias-corrected
    double standard_error = 0.0;
    Complex plain;      // estimator applied to the full sample
};

// Delete-one-group jackknife. `estimator` maps a list of included group
// indices to a complex estimate.
inline JackknifeResult jackknife(std::size_t groups,
                                 const std::function<Complex(const std::vector<std::size_t>&)>& estimator) {
    if (groups < 2) throw InvalidArgument("jackknife needs at least two groups");
    std::vector<std::size_t> all(groups);
    for (std::size_t g = 0; g < groups; ++g) all[g] = g;
    JackknifeResult r;
    r.plain = estimator(all);
    std::vector<Complex> loo(groups);
    for (std::size_t g = 0; g < groups; ++g) {
        std::vector<std::size_t> keep;
        keep.reserve(groups - 1);
        for (std::size_t h = 0; h < groups; ++h)
            if (h != g) keep.push_back(h);
        loo[g] = estimator(keep);
    }
    const Complex bar = mean(std::span<const Complex>(loo));
    double ss = 0.0;
    for (const auto& v : loo) ss += std::norm(v - bar);
    const double gm = static_cast<double>(groups);
    r.standard_error = std::sqrt((gm - 1.0) / gm * ss);
    r.estimate = gm * r.plain - (gm - 1.0) * bar;
    return r;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
};

// Ordinary least squares y = intercept + slope*x. With `y_se` the fit is
// weighted by 1/se^2 and the slope error is propagated from those errors.
inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y,
                            std::span<const double> y_se = {}) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("linear_fit: need >= 2 matched points");
    const bool weighted = !y_se.empty();
    if (weighted && y_se.size() != x.size()) throw InvalidArgument("linear_fit: error vector length mismatch");
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = weighted ? 1.0 / (y_se[i] * y_se[i]) : 1.0;
        sw += w;
        sx += w * x[i];
        sy += w * y[i];
        sxx += w * x[i] * x[i];
        sxy += w * x[i] * y[i];
    }
    const double det = sw * sxx - sx * sx;
    if (det == 0.0) throw InvalidArgument("linear_fit: degenerate abscissae");
    LinearFit f;
    f.slope = (sw * sxy - sx * sy) / det;
    f.intercept = (sxx * sy - sx * sxy) / det;
    if (weighted) {
        f.slope_se = std::sqrt(sw / det);
    } else if (x.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - f.intercept - f.slope * x[i];
            rss += r * r;
        }
        const double s2 = rss / static_cast<double>(x.size() - 2);
        f.slope_se = std::sqrt(s2 * sw / det);
    }
    return f;
}

// |a - b| / se; 0 when both the difference and the error vanish, +inf when
// only the error does.
inline double z_score(double a, double b, double se) {
    const double d = std::abs(a - b);
    if (se > 0.0) return d / se;
    return d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace rmtherm::stats
