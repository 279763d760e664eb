#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature in the spirit of QUADPACK's
// QAG, plus a panel driver that integrates piecewise between caller-supplied
// breakpoints (used for oscillatory integrands split at their zeros).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace rmtherm::quadrature {

struct Result {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = true;
};

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    int max_intervals = 4000;
};

namespace detail {

inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
    double a;
    double b;
    double value;
    double error;
};

template <class F>
Interval gk15(F& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = fc * kronrod_weights[7];
    double gauss = fc * gauss_weights[3];
    double abs_sum = std::abs(kronrod);
    std::array<double, 7> f1{}, f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kronrod_nodes[j];
        f1[j] = f(centre - dx);
        f2[j] = f(centre + dx);
        const double pair = f1[j] + f2[j];
        kronrod += kronrod_weights[j] * pair;
        abs_sum += kronrod_weights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) gauss += gauss_weights[j / 2] * pair;
    }
    const double mean = 0.5 * kronrod;
    double asc = kronrod_weights[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j)
        asc += kronrod_weights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

    double err = std::abs((kronrod - gauss) * half);
    const double resasc = asc * std::abs(half);
    const double resabs = abs_sum * std::abs(half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    return {a, b, kronrod * half, err};
}

}  // namespace detail

// Integrates f over [a, b]. Bisects the interval with the largest error
// estimate until the summed error falls below max(abs_tol, rel_tol*|I|).
template <class F>
Result integrate(F f, double a, double b, const Options& opt = {}) {
    Result out;
    if (a == b) return out;
    auto cmp = [](const detail::Interval& x, const detail::Interval& y) { return x.error < y.error; };
    std::vector<detail::Interval> heap;
    heap.push_back(detail::gk15(f, a, b));
    out.evaluations = 15;
    double total = heap.front().value;
    double total_err = heap.front().error;
    while (total_err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (static_cast<int>(heap.size()) >= opt.max_intervals) {
            out.converged = false;
            break;
        }
        std::pop_heap(heap.begin(), heap.end(), cmp);
        const detail::Interval worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            out.converged = false;
            heap.push_back(worst);
            std::push_heap(heap.begin(), heap.end(), cmp);
            break;
        }
        const auto left = detail::gk15(f, worst.a, mid);
        const auto right = detail::gk15(f, mid, worst.b);
        out.evaluations += 30;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), cmp);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), cmp);
        // Re-sum rather than update incrementally so rounding does not drift.
        total = 0.0;
        total_err = 0.0;
        for (const auto& iv : heap) {
            total += iv.value;
            total_err += iv.error;
        }
    }
    out.value = total;
    out.error = total_err;
    return out;
}

// Integrates f across consecutive breakpoints, spending the absolute
// tolerance proportionally to panel length.
template <class F>
Result integrate_panels(F f, std::span<const double> breakpoints, const Options& opt = {}) {
    Result out;
    if (breakpoints.size() < 2) return out;
    const double span = breakpoints.back() - breakpoints.front();
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double a = breakpoints[i];
        const double b = breakpoints[i + 1];
        if (b <= a) continue;
        Options local = opt;
        local.abs_tol = opt.abs_tol * (b - a) / span;
        const Result part = integrate(f, a, b, local);
        out.value += part.value;
        out.error += part.error;
        out.evaluations += part.evaluations;
        out.converged = out.converged && part.converged;
    }
    return out;
}

}  // namespace rmtherm::quadrature
