#pragma once

// Distribution of the equivalent channel power of a two-hop variable-gain
// amplify-and-forward link with MRC at the destination:
//
//   |h_eq|^2 = |h_sd|^2 + |h_sr|^2 |h_rd|^2 / (|h_sr|^2 + |h_rd|^2 + 1/gamma),
//
// all three fading powers exponential.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "besselaf/bessel_oracle.hpp"
#include "besselaf/error.hpp"
#include "besselaf/quadrature.hpp"
#include "besselaf/series.hpp"

namespace besselaf {

struct ChannelParams {
    double gamma = 1000.0;  // transmit SNR, linear
    double lambda_sd = 1.0;
    double lambda_sr = 1.0;
    double lambda_rd = 1.0;

    void validate() const {
        const auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
        detail::require(ok(gamma), "gamma must be positive");
        detail::require(ok(lambda_sd) && ok(lambda_sr) && ok(lambda_rd),
                        "fading parameters must be positive");
    }
};

struct DerivedParams {
    double lambda_P = 0.0;    // lambda_sr * lambda_rd
    double lambda_S = 0.0;    // lambda_sr + lambda_rd
    double lambda_srd = 0.0;  // (sqrt(lambda_sr) + sqrt(lambda_rd))^2
};

inline DerivedParams derive(const ChannelParams& p) {
    p.validate();
    const double product = p.lambda_sr * p.lambda_rd;
    const double sum = p.lambda_sr + p.lambda_rd;
    return {product, sum, sum + 2.0 * std::sqrt(product)};
}

// zeta(x) = sqrt(lambda_P x (x + 1/gamma))
inline double zeta(const ChannelParams& p, double x) {
    return std::sqrt(derive(p).lambda_P * x * (x + 1.0 / p.gamma));
}

enum class BesselBackend { quadrature, series };

struct SrdOptions {
    BesselBackend backend = BesselBackend::quadrature;
    int k = 10;  // series depth when backend == series
    QuadratureSpec spec{};
};

namespace detail {

inline double bessel_k(int order, double z, const SrdOptions& opt) {
    if (opt.backend == BesselBackend::quadrature) return K_reference(order, z, opt.spec);
    if (order == 0) return eval_K0_truncated(TruncationDepth{opt.k}, z).value;
    return evaluate_series(series_coeffs(SeriesOrder{static_cast<double>(order)}, TruncationDepth{opt.k}), z);
}

inline double clamp_probability(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace detail

// Exact CDF of |h_srd|^2: 1 - 2 zeta e^{-lambda_S x} K_1(2 zeta).
inline double cdf_srd_exact(const ChannelParams& p, double x, const SrdOptions& opt = {}) {
    detail::require(std::isfinite(x) && x >= 0.0, "cdf_srd_exact requires x >= 0");
    if (x == 0.0) return 0.0;
    const DerivedParams d = derive(p);
    const double z = 2.0 * zeta(p, x);
    const double tail = z * std::exp(-d.lambda_S * x) * detail::bessel_k(1, z, opt);
    return detail::clamp_probability(1.0 - tail);
}

// Exact PDF of |h_srd|^2. Logarithmically singular at x = 0.
inline double pdf_srd_exact(const ChannelParams& p, double x, const SrdOptions& opt = {}) {
    detail::require(std::isfinite(x) && x > 0.0, "pdf_srd_exact requires x > 0 (log singularity at 0)");
    const DerivedParams d = derive(p);
    const double zt = zeta(p, x);
    const double z = 2.0 * zt;
    return 2.0 * std::exp(-d.lambda_S * x) *
           (d.lambda_P * (2.0 * x + 1.0 / p.gamma) * detail::bessel_k(0, z, opt) +
            d.lambda_S * zt * detail::bessel_k(1, z, opt));
}

// High-SNR series CDF of |h_eq|^2:
//
//   F(x) = 1 - A e^{-lambda_sd x} + sum_q sum_{c<=q} B[q][c] x^c e^{-lambda_srd x}
//
// A and B do not depend on x or gamma.
struct SeriesCdfCoeffs {
    int k = 0;
    double A = 0.0;
    std::vector<std::vector<double>> B;  // B[q][c], 0 <= c <= q <= k
    double lambda_sd = 0.0;
    double lambda_srd = 0.0;
};

inline constexpr double kDegenerateRelativeGap = 1e-9;

inline SeriesCdfCoeffs series_cdf_coeffs(const ChannelParams& p, const CoefficientTable& table) {
    detail::require(table.nu == 1.0, "series CDF coefficients need the K_1 table (nu = 1)");
    detail::require(table.a.size() == static_cast<std::size_t>(table.k) + 1, "malformed coefficient table");
    const DerivedParams d = derive(p);
    const double gap = d.lambda_srd - p.lambda_sd;
    if (std::abs(gap) / d.lambda_srd < kDegenerateRelativeGap) {
        throw degenerate_parameter_error(
            "degenerate parameters: lambda_srd == lambda_sd; perturb lambda_sd by a factor 1 +/- 1e-6");
    }
    const double scale = 2.0 * std::sqrt(d.lambda_P);
    SeriesCdfCoeffs out{table.k, 1.0, {}, p.lambda_sd, d.lambda_srd};
    out.B.resize(static_cast<std::size_t>(table.k) + 1);
    double scale_pow = 1.0;  // (2 sqrt(lambda_P))^q
    double q_factorial = 1.0;
    for (int q = 0; q <= table.k; ++q) {
        if (q > 0) {
            scale_pow *= scale;
            q_factorial *= q;
        }
        // lambda_sd (2 sqrt(lambda_P))^q q! a_q / gap^{q+1}
        const double head =
            p.lambda_sd * scale_pow * q_factorial * table.a[static_cast<std::size_t>(q)] / std::pow(gap, q + 1);
        auto& row = out.B[static_cast<std::size_t>(q)];
        row.resize(static_cast<std::size_t>(q) + 1);
        double gap_pow_over_fact = 1.0;  // gap^c / c!
        for (int c = 0; c <= q; ++c) {
            if (c > 0) gap_pow_over_fact *= gap / c;
            row[static_cast<std::size_t>(c)] = head * gap_pow_over_fact;
        }
        out.A += head;
    }
    return out;
}

// Cancellation amplification of the series CDF: A + sum |B[q][c]| max_x x^c e^{-lambda_srd x}.
// Absolute rounding error of cdf_eq and pdf_eq is about condition * epsilon.
inline double series_condition(const SeriesCdfCoeffs& s) {
    double total = std::abs(s.A);
    for (const auto& row : s.B) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            const double peak = c == 0 ? 1.0 : std::pow(static_cast<double>(c) / (s.lambda_srd * std::exp(1.0)), c);
            total += std::abs(row[c]) * peak;
        }
    }
    return total;
}

inline double cdf_eq_raw(const SeriesCdfCoeffs& s, double x) {
    detail::require(!std::isnan(x) && x >= 0.0, "cdf_eq requires x >= 0");
    if (std::isinf(x)) return 1.0;
    double poly = 0.0;
    for (const auto& row : s.B) {
        double xc = 1.0;
        for (double b : row) {
            poly += b * xc;
            xc *= x;
        }
    }
    return 1.0 - s.A * std::exp(-s.lambda_sd * x) + poly * std::exp(-s.lambda_srd * x);
}

// Clamped to [0, 1]; use cdf_eq_raw or cdf_excursion for the pre-clamp value.
inline double cdf_eq(const SeriesCdfCoeffs& s, double x) {
    if (x == 0.0) return 0.0;  // A - 1 == sum_q B[q][0] identically
    return detail::clamp_probability(cdf_eq_raw(s, x));
}

struct CdfExcursion {
    double below_zero = 0.0;  // max of -F over the grid, if positive
    double above_one = 0.0;   // max of F - 1 over the grid, if positive

    bool exceeds(double tol) const { return below_zero > tol || above_one > tol; }
};

inline CdfExcursion cdf_excursion(const SeriesCdfCoeffs& s, std::span<const double> grid) {
    CdfExcursion e;
    for (double x : grid) {
        const double v = cdf_eq_raw(s, x);
        e.below_zero = std::max(e.below_zero, -v);
        e.above_one = std::max(e.above_one, v - 1.0);
    }
    return e;
}

// Derivative of the series CDF; finite at x = 0 (evaluated by its limit).
inline double pdf_eq(const SeriesCdfCoeffs& s, double x) {
    detail::require(std::isfinite(x) && x >= 0.0, "pdf_eq requires x >= 0");
    double poly = 0.0;
    for (const auto& row : s.B) {
        double x_c_minus_1 = 0.0;  // x^{c-1}, with 0^0 = 1 at c = 1
        double x_c = 1.0;
        for (std::size_t c = 0; c < row.size(); ++c) {
            poly += row[c] * (static_cast<double>(c) * x_c_minus_1 - s.lambda_srd * x_c);
            x_c_minus_1 = x_c;
            x_c *= x;
        }
    }
    return s.A * s.lambda_sd * std::exp(-s.lambda_sd * x) + poly * std::exp(-s.lambda_srd * x);
}

// Exact convolution F_eq(x) = int_0^x lambda_sd e^{-lambda_sd (x-u)} F_srd(u) du,
// without the high-SNR simplification.
inline double cdf_eq_quadrature(const ChannelParams& p, double x, const QuadratureSpec& spec = {},
                                const SrdOptions& srd = {}) {
    detail::require(std::isfinite(x) && x >= 0.0, "cdf_eq_quadrature requires x >= 0");
    if (x == 0.0) return 0.0;
    const auto integrand = [&](double u) {
        return p.lambda_sd * std::exp(-p.lambda_sd * (x - u)) * cdf_srd_exact(p, u, srd);
    };
    return detail::clamp_probability(integrate(integrand, 0.0, x, spec).value);
}

namespace detail {

// (e^{-a x} - e^{-b x}) / (b - a), with the a == b limit x e^{-a x}.
inline double exp_difference_quotient(double a, double b, double x) {
    if (a == b) return x * std::exp(-a * x);
    return std::exp(-a * x) * -std::expm1(-(b - a) * x) / (b - a);
}

}  // namespace detail

// Min-bound baseline: |h_srd|^2 replaced by min(|h_sr|^2, |h_rd|^2) ~ Exp(lambda_S);
// |h_eq|^2 is then hypoexponential (Erlang when lambda_S == lambda_sd).
inline double cdf_minbound(const ChannelParams& p, double x) {
    detail::require(std::isfinite(x) && x >= 0.0, "cdf_minbound requires x >= 0");
    const double a = p.lambda_sd;
    const double b = derive(p).lambda_S;
    const double v = -std::expm1(-a * x) - a * detail::exp_difference_quotient(a, b, x);
    return detail::clamp_probability(v);
}

inline double pdf_minbound(const ChannelParams& p, double x) {
    detail::require(std::isfinite(x) && x >= 0.0, "pdf_minbound requires x >= 0");
    const double a = p.lambda_sd;
    const double b = derive(p).lambda_S;
    return a * b * detail::exp_difference_quotient(a, b, x);
}

}  // namespace besselaf
