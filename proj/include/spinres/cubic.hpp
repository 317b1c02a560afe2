// cubic.hpp: real roots of polynomials up to degree 3.
//
// Trigonometric / Cardano solution in long double, then Newton polishing on
// the original coefficients. Leading coefficients that are negligible
// relative to the rest drop the degree.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace spinres {

namespace detail {

inline constexpr long double kPi = 3.141592653589793238462643383279502884L;

inline std::vector<long double> quadratic_roots(long double a, long double b, long double c) {
    const long double scale = std::max({std::fabs(a), std::fabs(b), std::fabs(c)});
    if (scale == 0.0L) return {};
    if (std::fabs(a) <= 1e-15L * scale) {
        if (b == 0.0L) return {};
        return {-c / b};
    }
    const long double disc = b * b - 4.0L * a * c;
    if (disc < 0.0L) {
        // keep a numerically double root that rounding pushed slightly negative
        if (-disc <= 1e-14L * b * b) return {-b / (2.0L * a)};
        return {};
    }
    const long double s = std::sqrt(disc);
    const long double q = -0.5L * (b + (b >= 0.0L ? s : -s));
    std::vector<long double> r;
    if (q != 0.0L) r = {q / a, c / q};
    else r = {0.0L, 0.0L};
    return r;
}

} // namespace detail

// Polynomial a x^3 + b x^2 + c x + d evaluated with Horner's rule.
inline double poly3(const std::array<double, 4>& k, double x) {
    return ((k[0] * x + k[1]) * x + k[2]) * x + k[3];
}

// Real roots of a x^3 + b x^2 + c x + d = 0, ascending, each polished with
// three Newton steps. Repeated roots may appear twice.
inline std::vector<double> solve_cubic(double a, double b, double c, double d) {
    using ld = long double;
    const ld A = a, B = b, C = c, D = d;
    const ld scale = std::max({std::fabs(A), std::fabs(B), std::fabs(C), std::fabs(D)});
    std::vector<ld> roots;
    if (scale == 0.0L) return {};
    if (std::fabs(A) <= 1e-15L * scale) {
        roots = detail::quadratic_roots(B, C, D);
    } else {
        const ld bn = B / A, cn = C / A, dn = D / A;
        const ld shift = bn / 3.0L;
        const ld p = cn - bn * bn / 3.0L;
        const ld q = 2.0L * bn * bn * bn / 27.0L - bn * cn / 3.0L + dn;
        const ld disc = q * q / 4.0L + p * p * p / 27.0L;
        if (p == 0.0L && q == 0.0L) {
            roots = {-shift};
        } else if (disc > 0.0L) {
            const ld s = std::sqrt(disc);
            const ld u = -std::copysign(std::cbrt(std::fabs(q) / 2.0L + s), q);
            const ld t = (u == 0.0L) ? 0.0L : u - p / (3.0L * u);
            roots = {t - shift};
        } else {
            const ld m = 2.0L * std::sqrt(-p / 3.0L);
            ld arg = 3.0L * q / (p * m);
            arg = std::clamp(arg, -1.0L, 1.0L);
            const ld theta = std::acos(arg) / 3.0L;
            for (int k = 0; k < 3; ++k) {
                roots.push_back(m * std::cos(theta - 2.0L * detail::kPi * k / 3.0L) - shift);
            }
        }
    }

    std::vector<double> out;
    out.reserve(roots.size());
    for (ld x : roots) {
        for (int it = 0; it < 3; ++it) {
            const ld f = ((A * x + B) * x + C) * x + D;
            const ld df = (3.0L * A * x + 2.0L * B) * x + C;
            if (df == 0.0L) break;
            const ld xn = x - f / df;
            const ld fn = ((A * xn + B) * xn + C) * xn + D;
            if (!(std::fabs(fn) <= std::fabs(f))) break;
            x = xn;
        }
        out.push_back(static_cast<double>(x));
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<double> solve_cubic(const std::array<double, 4>& k) {
    return solve_cubic(k[0], k[1], k[2], k[3]);
}

} // namespace spinres
