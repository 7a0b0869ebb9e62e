#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "besselaf/bessel_oracle.hpp"

using namespace besselaf;

namespace {

double relative_error(double got, double want) { return std::abs(got - want) / std::abs(want); }

double k_half(double z) { return std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z); }
double k_three_halves(double z) { return k_half(z) * (1.0 + 1.0 / z); }

// Right-hand side of I^s{x^{-2s} e^{-beta/x}} = beta^{1/2-s}/sqrt(pi x) e^{-beta/(2x)} K_{s-1/2}(beta/(2x)).
double fractional_bessel_rhs(double s, double beta, double x) {
    return std::pow(beta, 0.5 - s) / std::sqrt(std::numbers::pi * x) * std::exp(-beta / (2.0 * x)) *
           K_reference(std::abs(s - 0.5), beta / (2.0 * x));
}

}  // namespace

TEST(KReference, HalfIntegerClosedForms) {
    EXPECT_NEAR(K_reference(0.5, 1.0), 0.461069, 1e-6);
    for (double z : {0.05, 0.3, 1.0, 2.5, 7.0, 15.0}) {
        EXPECT_LE(relative_error(K_reference(0.5, z), k_half(z)), 1e-9) << "z=" << z;
        EXPECT_LE(relative_error(K_reference(1.5, z), k_three_halves(z)), 1e-9) << "z=" << z;
    }
}

TEST(KReference, KnownValues) {
    EXPECT_NEAR(K_reference(1.0, 2.0), 0.139866, 1e-6);
    EXPECT_NEAR(K_reference(0.0, 1.0), 0.421024, 1e-6);
}

TEST(KReference, AgreesWithStandardLibrary) {
    for (double nu : {0.0, 0.3, 1.0, 2.0, 3.7})
        for (double z : {0.02, 0.1, 0.5, 1.0, 4.0, 12.0, 40.0})
            EXPECT_LE(relative_error(K_reference(nu, z), std::cyl_bessel_k(nu, z)), 1e-10)
                << "nu=" << nu << " z=" << z;
}

TEST(KReference, LargeArgumentAsymptotic) {
    // K_nu(z) ~ sqrt(pi/2z) e^{-z} (1 + (4nu^2-1)/(8z)) with O(z^-2) remainder.
    for (double z : {30.0, 60.0}) {
        const double asym = k_half(z) * (1.0 + 3.0 / (8.0 * z));
        EXPECT_LE(relative_error(K_reference(1.0, z), asym), 1.0 / (z * z));
    }
}

TEST(KReference, ThreeTermRecurrence) {
    for (double z = 0.5; z <= 5.0 + 1e-12; z += 0.25) {
        const double k0 = K_reference(0.0, z);
        const double k1 = K_reference(1.0, z);
        const double k2 = K_reference(2.0, z);
        EXPECT_LE(relative_error(k0 + (2.0 / z) * k1, k2), 1e-8) << "z=" << z;
    }
}

TEST(KReference, RejectsDomain) {
    EXPECT_THROW(K_reference(1.0, 0.0), domain_error);
    EXPECT_THROW(K_reference(-1.0, 1.0), domain_error);
    QuadratureSpec bad;
    bad.abs_tol = 0.0;
    EXPECT_THROW(K_reference(1.0, 1.0, bad), domain_error);
}

TEST(Quadrature, ReportsNonConvergence) {
    QuadratureSpec spec;
    spec.rel_tol = 1e-15;
    spec.abs_tol = 1e-300;
    spec.max_subdivisions = 1;
    try {
        integrate([](double t) { return std::sin(200.0 * t) * std::sqrt(std::abs(t - 0.3)); }, 0.0, 1.0, spec);
        FAIL() << "expected numerical_error";
    } catch (const numerical_error& e) {
        EXPECT_GT(e.achieved_error(), 0.0);
    }
}

TEST(Quadrature, SemiInfiniteInterval) {
    const QuadratureResult r = integrate([](double t) { return std::exp(-t); }, 0.0, INFINITY);
    EXPECT_NEAR(r.value, 1.0, 1e-12);
    EXPECT_GE(r.error_estimate, 0.0);
}

TEST(RiemannLiouville, PowerRule) {
    for (double s : {0.2, 0.5, 0.9, 1.0, 1.6, 2.3}) {
        for (double p : {0.0, 1.0, 2.5}) {
            for (double x : {0.5, 2.0}) {
                const double want = std::tgamma(1.0 + p) / std::tgamma(1.0 + p + s) * std::pow(x, p + s);
                const double got = riemann_liouville([p](double t) { return std::pow(t, p); }, FractionalOrder{s}, x);
                EXPECT_LE(relative_error(got, want), 1e-9) << "s=" << s << " p=" << p << " x=" << x;
            }
        }
    }
}

TEST(RiemannLiouville, ZeroFunction) {
    EXPECT_EQ(riemann_liouville([](double) { return 0.0; }, FractionalOrder{0.4}, 1.3), 0.0);
    EXPECT_EQ(riemann_liouville([](double) { return 0.0; }, FractionalOrder{1.4}, 1.3), 0.0);
}

TEST(RiemannLiouville, FractionalBesselIdentity) {
    for (double s : {0.2, 0.25, 0.4}) {
        for (double beta : {0.5, 1.0, 2.0}) {
            for (double x : {0.5, 1.0, 2.0}) {
                const auto f = [s, beta](double t) {
                    return t <= 0.0 ? 0.0 : std::pow(t, -2.0 * s) * std::exp(-beta / t);
                };
                const double lhs = riemann_liouville(f, FractionalOrder{s}, x);
                EXPECT_LE(relative_error(lhs, fractional_bessel_rhs(s, beta, x)), 1e-6)
                    << "s=" << s << " beta=" << beta << " x=" << x;
            }
        }
    }
}

TEST(RiemannLiouville, RejectsDomain) {
    EXPECT_THROW(FractionalOrder{0.0}, domain_error);
    EXPECT_THROW(riemann_liouville([](double) { return 1.0; }, FractionalOrder{0.5}, 0.0), domain_error);
}
