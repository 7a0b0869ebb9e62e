#pragma once

// Generalized exponential integrals E_n(x) = int_1^inf e^{-x t} t^{-n} dt.
// Power series below x = 1, modified Lentz continued fraction above.

#include <cmath>
#include <limits>
#include <numbers>

#include "besselaf/error.hpp"

namespace besselaf {

namespace detail {

inline constexpr double kExpintEps = 1e-16;
inline constexpr int kExpintMaxIter = 10000;

// e^x E_n(x) for x > 1.
inline double expint_en_scaled_cf(int n, double x) {
    const double tiny = std::numeric_limits<double>::min() / kExpintEps;
    double b = x + n;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kExpintMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (n - 1 + i);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < kExpintEps) return h;
    }
    throw numerical_error("expint: continued fraction did not converge");
}

// E_n(x) for 0 < x <= 1.
inline double expint_en_series(int n, double x) {
    const int nm1 = n - 1;
    double ans = (nm1 != 0) ? 1.0 / nm1 : -std::log(x) - std::numbers::egamma;
    double fact = 1.0;
    for (int i = 1; i <= kExpintMaxIter; ++i) {
        fact *= -x / i;
        double del = 0.0;
        if (i != nm1) {
            del = -fact / (i - nm1);
        } else {
            double psi = -std::numbers::egamma;
            for (int ii = 1; ii <= nm1; ++ii) psi += 1.0 / ii;
            del = fact * (-std::log(x) + psi);
        }
        ans += del;
        if (std::abs(del) < std::abs(ans) * kExpintEps) return ans;
    }
    throw numerical_error("expint: series did not converge");
}

}  // namespace detail

// e^x E_n(x), finite for large x where E_n underflows.
inline double expint_en_scaled(int n, double x) {
    detail::require(n >= 0, "expint order must be nonnegative");
    detail::require(!std::isnan(x) && x >= 0.0, "expint argument must be nonnegative");
    if (x == 0.0) {
        detail::require(n >= 2, "E_0 and E_1 diverge at 0");
        return 1.0 / (n - 1);
    }
    if (std::isinf(x)) return 0.0;
    if (n == 0) return 1.0 / x;
    if (x > 1.0) return detail::expint_en_scaled_cf(n, x);
    return std::exp(x) * detail::expint_en_series(n, x);
}

inline double expint_en(int n, double x) {
    detail::require(n >= 0, "expint order must be nonnegative");
    detail::require(!std::isnan(x) && x >= 0.0, "expint argument must be nonnegative");
    if (x > 1.0) return std::exp(-x) * expint_en_scaled(n, x);
    if (x == 0.0 || n == 0) return expint_en_scaled(n, x) * std::exp(-x);
    return detail::expint_en_series(n, x);
}

inline double expint_e1(double x) {
    detail::require(x > 0.0, "E_1 requires x > 0");
    return expint_en(1, x);
}

}  // namespace besselaf
