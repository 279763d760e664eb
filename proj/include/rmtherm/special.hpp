#pragma once

#include <cmath>
#include <complex>
#include <limits>

#include "rmtherm/core.hpp"

namespace rmtherm::special {

// Sine integral Si(x) = int_0^x sin(t)/t dt. Power series for |x| <= 4,
// continued fraction for E1(ix) (modified Lentz) beyond.
inline double sine_integral(double x) {
    const double t = std::abs(x);
    if (t == 0.0) return 0.0;
    double si;
    if (t <= 4.0) {
        const double t2 = t * t;
        double term = t;  // t^(2k+1)/(2k+1)!
        double sum = t;
        for (int k = 1; k < 40; ++k) {
            term *= -t2 / ((2.0 * k) * (2.0 * k + 1.0));
            const double add = term / (2.0 * k + 1.0);
            sum += add;
            if (std::abs(add) < 1e-18 * std::abs(sum)) break;
        }
        si = sum;
    } else {
        constexpr double tiny = 1e-300;
        constexpr double eps = 1e-16;
        Complex b(1.0, t);
        Complex c(1.0 / tiny, 0.0);
        Complex d = 1.0 / b;
        Complex h = d;
        for (int i = 2; i < 200; ++i) {
            const double a = -static_cast<double>((i - 1) * (i - 1));
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            const Complex del = c * d;
            h *= del;
            if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < eps) break;
        }
        h *= Complex(std::cos(t), -std::sin(t));
        si = -std::conj(h).imag() + 0.5 * pi;
    }
    return x < 0 ? -si : si;
}

// sin(z)/z and its derivative, with Taylor series near the origin.
inline double sinc(double z) {
    if (std::abs(z) < 1e-4) return 1.0 - z * z / 6.0;
    return std::sin(z) / z;
}

inline double sinc_derivative(double z) {
    if (std::abs(z) < 0.5) {
        const double z2 = z * z;
        double term = -z / 6.0;  // (-1)^k z^(2k-1)/(2k+1)!
        double sum = 0.0;
        for (int k = 1; k < 12; ++k) {
            sum += 2.0 * k * term;
            term *= -z2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
        }
        return sum;
    }
    return std::cos(z) / z - std::sin(z) / (z * z);
}

// One minus the two-level form factor, K(tau) with tau = u/(2 pi) in units of
// the mean spacing: K -> 0 at tau = 0 and K -> 1 for large tau.
inline double form_factor_complement(double tau, EnsembleKind kind) {
    tau = std::abs(tau);
    if (kind == EnsembleKind::GUE) return std::min(tau, 1.0);
    if (tau <= 1.0) return 2.0 * tau - tau * std::log1p(2.0 * tau);
    return 2.0 - tau * std::log1p(2.0 / (2.0 * tau - 1.0));
}

}  // namespace rmtherm::special
