#pragma once

// Reference K_nu(z) by quadrature of the integral representation
//
//   K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt
//
// and the Riemann-Liouville fractional integral. Both are slow reference
// implementations for testing and error reporting.

#include <cmath>
#include <limits>

#include "besselaf/error.hpp"
#include "besselaf/quadrature.hpp"

namespace besselaf {

// Riemann-Liouville order s > 0.
class FractionalOrder {
public:
    explicit FractionalOrder(double s) : s_(s) {
        detail::require(std::isfinite(s) && s > 0.0, "fractional order must be positive");
    }

    double value() const noexcept { return s_; }

private:
    double s_;
};

namespace detail {

// log of exp(-z (cosh t - 1)) cosh(nu t), stable for large t.
inline double log_cosh_integrand(double nu, double z, double t) {
    const double cosh_minus_one = 2.0 * std::sinh(0.5 * t) * std::sinh(0.5 * t);
    return -z * cosh_minus_one + nu * t + std::log1p(std::exp(-2.0 * nu * t)) - std::log(2.0);
}

}  // namespace detail

inline double K_reference(double nu, double z, const QuadratureSpec& spec = {}) {
    detail::require(std::isfinite(nu) && nu >= 0.0, "K_reference requires nu >= 0");
    detail::require(std::isfinite(z) && z > 0.0, "K_reference requires z > 0");
    spec.validate();
    // Cut the tail past the peak (z sinh t = nu) once the scaled integrand
    // drops below min(abs_tol, rel_tol)/10.
    const double log_cutoff = std::log(std::min(spec.abs_tol, spec.rel_tol) / 10.0);
    double upper = 1.0;
    while (detail::log_cosh_integrand(nu, z, upper) > log_cutoff || z * std::sinh(upper) < nu) {
        upper *= 1.25;
        if (upper > 1e3) throw numerical_error("K_reference: integrand cutoff not found");
    }
    const auto integrand = [nu, z](double t) { return std::exp(detail::log_cosh_integrand(nu, z, t)); };
    QuadratureSpec scaled = spec;
    scaled.abs_tol = spec.abs_tol * std::exp(z);
    if (!std::isfinite(scaled.abs_tol)) scaled.abs_tol = std::numeric_limits<double>::max();
    const QuadratureResult r = integrate(integrand, 0.0, upper, scaled);
    return std::exp(-z) * r.value;
}

// (1/Gamma(s)) int_0^x (x-t)^{s-1} f(t) dt.
//
// For s < 1 the substitution u = (x-t)^s removes the endpoint singularity:
// the integral becomes (1/Gamma(s+1)) int_0^{x^s} f(x - u^{1/s}) du.
template <typename F>
double riemann_liouville(F&& f, FractionalOrder order, double x, const QuadratureSpec& spec = {}) {
    detail::require(std::isfinite(x) && x > 0.0, "riemann_liouville requires x > 0");
    const double s = order.value();
    if (s < 1.0) {
        const double inv_s = 1.0 / s;
        const auto g = [&](double u) {
            const double t = x - std::pow(u, inv_s);
            return f(std::max(t, 0.0));
        };
        return integrate(g, 0.0, std::pow(x, s), spec).value / std::tgamma(s + 1.0);
    }
    const auto g = [&](double t) { return std::pow(x - t, s - 1.0) * f(t); };
    return integrate(g, 0.0, x, spec).value / std::tgamma(s);
}

}  // namespace besselaf
