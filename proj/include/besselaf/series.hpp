#pragma once

// Elementary-function series for the modified Bessel function of the second
// kind:
//
//   K_nu(z) = e^{-z} sum_{n>=0} sum_{i=0}^{n} Lambda(nu,n,i) z^{i-nu}
//
// truncated at n = k and regrouped by powers of z into
//
//   K_nu(z) ~ e^{-z} z^{-nu} sum_{q=0}^{k} a_{nu,k,q} z^q,
//   a_{nu,k,q} = sum_{l=q}^{k} Lambda(nu,l,q).
//
// The representation is undefined for nu in {0, 1/2, 3/2, ...}; K_0 is
// reached through the recurrence K_0 = K_2 - (2/z) K_1.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "besselaf/error.hpp"

namespace besselaf {

inline constexpr int kMaxDepth = 30;

// Bessel order nu of the series. Must be positive and not a half-integer.
class SeriesOrder {
public:
    explicit SeriesOrder(double nu) : nu_(nu) {
        detail::require(std::isfinite(nu) && nu > 0.0, "series order must be positive");
        const double twice = 2.0 * nu;
        const double nearest = std::round(twice);
        if (std::abs(twice - nearest) <= 1e-12 * std::max(1.0, twice) &&
            std::fmod(nearest, 2.0) == 1.0) {
            throw domain_error("half-integer order unsupported");
        }
    }

    double value() const noexcept { return nu_; }

private:
    double nu_;
};

// Outer-sum cutoff k of the truncated series, 0 <= k <= kMaxDepth.
class TruncationDepth {
public:
    explicit TruncationDepth(int k) : k_(k) {
        detail::require(k >= 0 && k <= kMaxDepth, "truncation depth must lie in [0, 30]");
    }

    int value() const noexcept { return k_; }

private:
    int k_;
};

struct CoefficientTable {
    double nu = 0.0;
    int k = 0;
    std::vector<double> a;  // a_{nu,k,q}, q = 0..k
};

struct TruncatedValue {
    double value = 0.0;
    // |S_{k+1}(z) - S_k(z)|: an estimate of the discarded tail, not a bound.
    double epsilon_estimate = 0.0;
};

using BigInt = boost::multiprecision::cpp_int;

// Unsigned Lah number L(n,i) = C(n-1,i-1) n!/i!, with L(0,0) = 1, L(n,0) = 0.
inline BigInt lah(int n, int i) {
    detail::require(n >= 0 && i >= 0, "Lah indices must be nonnegative");
    detail::require(i <= n, "Lah number requires i <= n");
    if (n == 0) return BigInt(1);
    if (i == 0) return BigInt(0);
    // C(n,i) * C(n-1,i-1) * (n-i)!
    BigInt result = 1;
    for (int j = 1; j <= i; ++j) {
        result *= (n - i + j);
        result /= j;
    }
    BigInt lower = 1;
    for (int j = 1; j <= i - 1; ++j) {
        lower *= (n - i + j);
        lower /= j;
    }
    result *= lower;
    for (int j = 2; j <= n - i; ++j) result *= j;
    return result;
}

namespace detail {

struct SignedLog {
    long double log_abs;
    int sign;
};

// ln|Gamma(x)| and sign(Gamma(x)) for x not a nonpositive integer.
inline SignedLog signed_lgamma(long double x) {
    const long double log_abs = std::lgamma(x);
    if (x > 0.0L) return {log_abs, 1};
    const auto poles_crossed = static_cast<std::int64_t>(std::floor(-x));
    return {log_abs, (poles_crossed % 2 == 0) ? -1 : 1};
}

inline long double log_lah(int n, int i) {
    return std::log(lah(n, i).convert_to<long double>());
}

inline long double lambda_coeff_ld(long double nu, int n, int i) {
    if (i == 0 && n > 0) return 0.0L;
    constexpr long double half = 0.5L;
    const SignedLog g_num = signed_lgamma(half + n - nu);
    const SignedLog g_den = signed_lgamma(half - nu);
    const long double log_mag = half * std::log(std::numbers::pi_v<long double>) +
                                std::lgamma(2.0L * nu) + g_num.log_abs + log_lah(n, i) -
                                (nu - i) * std::numbers::ln2_v<long double> - g_den.log_abs -
                                std::lgamma(half + n + nu) - std::lgamma(n + 1.0L);
    const int sign = ((i % 2 == 0) ? 1 : -1) * g_num.sign * g_den.sign;
    return sign * std::exp(log_mag);
}

// Lambda(nu, n, i) for i = 0..n.
inline std::vector<long double> lambda_row(long double nu, int n) {
    std::vector<long double> row(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) row[static_cast<std::size_t>(i)] = lambda_coeff_ld(nu, n, i);
    return row;
}

inline void require_positive_argument(double z) {
    require(std::isfinite(z) && z > 0.0, "series argument must be positive");
}

// e^{-z} z^{-nu} sum_q c_q z^q
template <typename Coeffs>
long double scaled_polynomial(const Coeffs& c, long double nu, long double z) {
    long double acc = 0.0L;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + static_cast<long double>(*it);
    return std::exp(-z) * std::pow(z, -nu) * acc;
}

}  // namespace detail

// Lambda(nu, n, i), evaluated in the log-Gamma domain with explicit sign.
inline double lambda_coeff(SeriesOrder nu, int n, int i) {
    detail::require(n >= 0 && i >= 0 && i <= n, "lambda_coeff requires 0 <= i <= n");
    return static_cast<double>(detail::lambda_coeff_ld(nu.value(), n, i));
}

// Column sums a_{nu,k,q} = sum_{l=q}^{k} Lambda(nu,l,q).
inline CoefficientTable series_coeffs(SeriesOrder nu, TruncationDepth depth) {
    const int k = depth.value();
    std::vector<long double> acc(static_cast<std::size_t>(k) + 1, 0.0L);
    for (int l = 0; l <= k; ++l) {
        const auto row = detail::lambda_row(nu.value(), l);
        for (int q = 0; q <= l; ++q) acc[static_cast<std::size_t>(q)] += row[static_cast<std::size_t>(q)];
    }
    CoefficientTable table{nu.value(), k, {}};
    table.a.reserve(acc.size());
    for (long double v : acc) table.a.push_back(static_cast<double>(v));
    return table;
}

// Truncated series value for a precomputed table; no tail estimate.
inline double evaluate_series(const CoefficientTable& table, double z) {
    detail::require_positive_argument(z);
    return static_cast<double>(detail::scaled_polynomial(table.a, table.nu, z));
}

namespace detail {

// S_{k+1}(z) - S_k(z): the next row of the double sum.
inline long double next_row_increment(const CoefficientTable& table, double z) {
    return scaled_polynomial(lambda_row(table.nu, table.k + 1), table.nu, z);
}

}  // namespace detail

// Truncated series with the successive-depth difference as tail estimate.
inline TruncatedValue eval_K_truncated(const CoefficientTable& table, double z) {
    detail::require_positive_argument(z);
    return {evaluate_series(table, z),
            static_cast<double>(std::abs(detail::next_row_increment(table, z)))};
}

inline TruncatedValue eval_K_truncated(SeriesOrder nu, TruncationDepth k, double z) {
    detail::require_positive_argument(z);
    return eval_K_truncated(series_coeffs(nu, k), z);
}

// Row-wise double sum e^{-z} sum_{n<=k} sum_{i<=n} Lambda(nu,n,i) z^{i-nu}.
inline double eval_K_double_sum(SeriesOrder nu, TruncationDepth k, double z) {
    detail::require_positive_argument(z);
    long double total = 0.0L;
    for (int n = 0; n <= k.value(); ++n) {
        const auto row = detail::lambda_row(nu.value(), n);
        long double row_sum = 0.0L;
        for (int i = 0; i <= n; ++i)
            row_sum += row[static_cast<std::size_t>(i)] * std::pow(static_cast<long double>(z), i - nu.value());
        total += row_sum;
    }
    return static_cast<double>(std::exp(-static_cast<long double>(z)) * total);
}

// K_0 through K_0 = K_2 - (2/z) K_1, both from the truncated series.
inline TruncatedValue eval_K0_truncated(TruncationDepth k, double z) {
    detail::require_positive_argument(z);
    const CoefficientTable t1 = series_coeffs(SeriesOrder{1.0}, k);
    const CoefficientTable t2 = series_coeffs(SeriesOrder{2.0}, k);
    const double value = evaluate_series(t2, z) - (2.0 / z) * evaluate_series(t1, z);
    const long double step = detail::next_row_increment(t2, z) -
                             (2.0L / z) * detail::next_row_increment(t1, z);
    return {value, static_cast<double>(std::abs(step))};
}

// n-th derivative of e^{-beta/x} with respect to x.
inline double deriv_exp_reciprocal(int n, double beta, double x) {
    detail::require(n >= 0, "derivative order must be nonnegative");
    detail::require(beta > 0.0 && x > 0.0, "deriv_exp_reciprocal requires beta, x > 0");
    const double ratio = beta / x;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double term = lah(n, i).convert_to<double>() * std::pow(ratio, i);
        sum += (i % 2 == 0) ? term : -term;
    }
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return std::exp(-ratio) * sign / std::pow(x, n) * sum;
}

}  // namespace besselaf
