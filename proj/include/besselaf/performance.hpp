#pragma once

// Outage probability, BPSK bit error probability and ergodic capacity from
// the series distribution of |h_eq|^2, with quadrature counterparts.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>

#include "besselaf/error.hpp"
#include "besselaf/expint.hpp"
#include "besselaf/quadrature.hpp"
#include "besselaf/relay_model.hpp"

namespace besselaf {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

struct PerfPoint {
    double gamma_db = 0.0;
    double outage = 0.0;
    double bep = 0.0;
    double capacity_nats = 0.0;
};

// P(gamma |h_eq|^2 <= snr_threshold).
inline double outage(const ChannelParams& p, const SeriesCdfCoeffs& s, double snr_threshold) {
    p.validate();
    detail::require(!std::isnan(snr_threshold) && snr_threshold > 0.0, "outage threshold must be positive");
    return cdf_eq(s, snr_threshold / p.gamma);
}

// Coherent BPSK: (1/2) int erfc(sqrt(gamma x)) f(x) dx, integrated by parts
// against 1 - F(x) term by term.
inline double bep(const ChannelParams& p, const SeriesCdfCoeffs& s) {
    p.validate();
    const double g = p.gamma;
    double sum = 0.0;
    for (const auto& row : s.B) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            const double h = static_cast<double>(c) + 0.5;
            sum += row[c] * std::tgamma(h) / std::pow(g + s.lambda_srd, h);
        }
    }
    const double direct = std::sqrt(g * s.A * s.A / (g + s.lambda_sd));
    const double pb = 0.5 * (1.0 - direct + std::sqrt(g / std::numbers::pi) * sum);
    return std::clamp(pb, 0.0, 1.0);
}

// Ergodic capacity in nats/s/Hz with the half-duplex 1/2 pre-log.
//
// By parts, C = (1/2) int gamma/(1 + gamma x) (1 - F(x)) dx, and
//   int_0^inf gamma x^c e^{-l x} / (1 + gamma x) dx = c! l^{-c} e^{y} E_{c+1}(y),  y = l/gamma.
inline double capacity(const ChannelParams& p, const SeriesCdfCoeffs& s) {
    p.validate();
    const double g = p.gamma;
    const double y_sd = s.lambda_sd / g;
    const double y_srd = s.lambda_srd / g;
    double total = s.A * expint_en_scaled(1, y_sd);
    double c_factorial_over_pow = 1.0;  // c! / lambda_srd^c
    std::size_t max_c = 0;
    for (const auto& row : s.B) max_c = std::max(max_c, row.size());
    for (std::size_t c = 0; c < max_c; ++c) {
        if (c > 0) c_factorial_over_pow *= static_cast<double>(c) / s.lambda_srd;
        double b_sum = 0.0;
        for (const auto& row : s.B)
            if (c < row.size()) b_sum += row[c];
        total -= b_sum * c_factorial_over_pow * expint_en_scaled(static_cast<int>(c) + 1, y_srd);
    }
    return std::max(0.5 * total, 0.0);
}

inline double bits_from_nats(double nats) { return nats / std::numbers::ln2; }

inline PerfPoint performance_point(const ChannelParams& p, const SeriesCdfCoeffs& s, double snr_threshold) {
    return {linear_to_db(p.gamma), outage(p, s, snr_threshold), bep(p, s), capacity(p, s)};
}

// Quadrature counterparts over the same series density.

inline double bep_quadrature(const ChannelParams& p, const SeriesCdfCoeffs& s, const QuadratureSpec& spec = {}) {
    p.validate();
    const double g = p.gamma;
    const auto f = [&](double x) { return 0.5 * std::erfc(std::sqrt(g * x)) * pdf_eq(s, x); };
    // erfc(sqrt(t)) < 1e-300 beyond t = 700.
    double total = 0.0;
    double lo = 0.0;
    for (double edge : {1.0, 30.0, 700.0}) {
        total += integrate(f, lo, edge / g, spec).value;
        lo = edge / g;
    }
    return total;
}

inline double capacity_quadrature(const ChannelParams& p, const SeriesCdfCoeffs& s,
                                  const QuadratureSpec& spec = {}) {
    p.validate();
    const double g = p.gamma;
    const auto f = [&](double x) { return 0.5 * std::log1p(g * x) * pdf_eq(s, x); };
    const double knee = 1.0 / g;
    return integrate(f, 0.0, knee, spec).value + integrate(f, knee, INFINITY, spec).value;
}

}  // namespace besselaf
