#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "besselaf/error.hpp"

namespace besselaf {

struct QuadratureSpec {
    double abs_tol = 1e-14;
    double rel_tol = 1e-11;
    int max_subdivisions = 4096;

    void validate() const {
        detail::require(abs_tol > 0.0 && rel_tol > 0.0, "quadrature tolerances must be positive");
        detail::require(max_subdivisions >= 1, "max_subdivisions must be at least 1");
    }
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

namespace detail {

struct QuadSegment {
    double lo = 0.0;
    double hi = 0.0;
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;

    bool operator<(const QuadSegment& o) const { return error < o.error; }
};

}  // namespace detail

// Globally adaptive 61-point Gauss-Kronrod quadrature on [a, b]; b may be
// +infinity (mapped by x = a + t/(1-t)). The segment with the largest error
// estimate is bisected until the total error meets max(abs_tol, rel_tol |I|)
// or max_subdivisions segments exist. Segments whose error is at the rounding
// floor of their own L1 norm are not split further.
// Throws numerical_error when the final estimate grossly misses the tolerance.
template <typename F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
    spec.validate();
    detail::require(std::isfinite(a) && !std::isnan(b) && a <= b, "integration limits must satisfy a <= b");
    if (a == b) return {0.0, 0.0};
    using gk = boost::math::quadrature::gauss_kronrod<double, 61>;
    const bool infinite = std::isinf(b);
    const auto g = [&](double t) -> double {
        if (!infinite) return f(t);
        const double w = 1.0 - t;
        const double x = a + t / w;
        if (!std::isfinite(x)) return 0.0;
        return f(x) / (w * w);
    };
    const double lo0 = infinite ? 0.0 : a;
    const double hi0 = infinite ? 1.0 : b;
    const auto rule = [&](double lo, double hi) {
        detail::QuadSegment s{lo, hi, 0.0, 0.0, 0.0};
        s.value = gk::integrate(g, lo, hi, 0, 0.0, &s.error, &s.l1);
        return s;
    };
    constexpr double kNoiseFloor = 50.0 * std::numeric_limits<double>::epsilon();

    std::priority_queue<detail::QuadSegment> open;
    double settled_value = 0.0, settled_error = 0.0, settled_l1 = 0.0;
    double open_value = 0.0, open_error = 0.0, open_l1 = 0.0;
    const auto push = [&](const detail::QuadSegment& s) {
        const bool at_floor = s.error <= kNoiseFloor * s.l1 ||
                              s.hi - s.lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(s.hi);
        if (at_floor) {
            settled_value += s.value;
            settled_error += s.error;
            settled_l1 += s.l1;
        } else {
            open.push(s);
            open_value += s.value;
            open_error += s.error;
            open_l1 += s.l1;
        }
    };
    double value = 0.0, error = 0.0, l1 = 0.0;
    push(rule(lo0, hi0));
    int segments = 1;
    for (;;) {
        value = settled_value + open_value;
        error = settled_error + open_error;
        l1 = settled_l1 + open_l1;
        if (!std::isfinite(value)) break;
        if (error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(value))) break;
        if (open.empty() || segments >= spec.max_subdivisions) break;
        const detail::QuadSegment worst = open.top();
        open.pop();
        open_value -= worst.value;
        open_error -= worst.error;
        open_l1 -= worst.l1;
        const double mid = 0.5 * (worst.lo + worst.hi);
        push(rule(worst.lo, mid));
        push(rule(mid, worst.hi));
        ++segments;
    }
    // Re-sum the open segments to drop accumulated update rounding.
    value = settled_value;
    error = settled_error;
    l1 = settled_l1;
    while (!open.empty()) {
        value += open.top().value;
        error += open.top().error;
        l1 += open.top().l1;
        open.pop();
    }
    if (!std::isfinite(value)) throw numerical_error("quadrature produced a non-finite value", error);
    // Failure means the estimate misses the tolerance by more than 1e4.
    const double allowed = 1e4 * std::max(spec.abs_tol, spec.rel_tol * std::abs(l1));
    if (error > allowed) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "quadrature did not converge (estimated error %.3e, value %.6e)", error,
                      value);
        throw numerical_error(buf, error);
    }
    return {value, error};
}

}  // namespace besselaf
