#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "besselaf/montecarlo.hpp"

using namespace besselaf;

namespace {

ChannelParams unit_channel(double gamma = 1000.0) { return {gamma, 1.0, 1.0, 1.0}; }

SimConfig config(std::uint64_t samples, unsigned workers = 0) {
    SimConfig cfg;
    cfg.samples = samples;
    cfg.workers = workers;
    return cfg;
}

}  // namespace

TEST(CounterRng, ReproducibleAndKeyed) {
    CounterRng a = CounterRng::for_stream(42, 0, 5);
    CounterRng b = CounterRng::for_stream(42, 0, 5);
    CounterRng c = CounterRng::for_stream(42, 1, 5);
    CounterRng d = CounterRng::for_stream(43, 0, 5);
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next();
        EXPECT_EQ(va, b.next());
        EXPECT_NE(va, c.next());
        EXPECT_NE(va, d.next());
    }
}

TEST(CounterRng, UniformRange) {
    CounterRng rng(1);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(CounterRng, ExponentialMoments) {
    CounterRng rng = CounterRng::for_stream(9, 2, 0);
    const double lambda = 2.5;
    const int n = 1'000'000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = rng.exponential(lambda);
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    EXPECT_NEAR(mean, 1.0 / lambda, 4.0 / (lambda * std::sqrt(n)));
    EXPECT_NEAR(var, 1.0 / (lambda * lambda), 0.01 / (lambda * lambda));
}

TEST(CounterRng, ExponentialKolmogorovSmirnov) {
    CounterRng rng = CounterRng::for_stream(123, 0, 0);
    const int n = 100'000;
    std::vector<double> v(n);
    for (double& x : v) x = rng.exponential(1.0);
    std::sort(v.begin(), v.end());
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
        const double f = -std::expm1(-v[static_cast<std::size_t>(i)]);
        d = std::max({d, (i + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    // Critical value at the 0.1% level.
    EXPECT_LT(d, 1.949 / std::sqrt(static_cast<double>(n)));
}

TEST(Moments, MergeMatchesSinglePass) {
    CounterRng rng(77);
    detail::Moments all, left, right;
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.exponential(0.3);
        all.add(v);
        (i < 357 ? left : right).add(v);
    }
    left.merge(right);
    EXPECT_EQ(left.n, all.n);
    EXPECT_NEAR(left.mean, all.mean, 1e-12 * all.mean);
    EXPECT_NEAR(left.m2, all.m2, 1e-10 * all.m2);
    detail::Moments empty;
    empty.merge(all);
    EXPECT_EQ(empty.mean, all.mean);
}

TEST(SrdPower, Values) {
    EXPECT_EQ(srd_power(0.0, 3.0, 100.0), 0.0);
    EXPECT_EQ(srd_power(2.0, 0.0, 100.0), 0.0);
    EXPECT_NEAR(srd_power(2.0, 2.0, 1e300), 1.0, 1e-15);
    EXPECT_LT(srd_power(2.0, 2.0, 1.0), 1.0);
}

TEST(Simulate, IndependentOfWorkerCount) {
    const ChannelParams p{100.0, 0.8, 1.3, 0.6};
    const std::uint64_t n = 5 * kSamplesPerBlock + 1234;
    const SimEstimate one = simulate(p, config(n, 1), metric::Capacity{});
    for (unsigned w : {2u, 3u, 8u}) {
        const SimEstimate many = simulate(p, config(n, w), metric::Capacity{});
        EXPECT_EQ(one.value, many.value) << "workers=" << w;
        EXPECT_EQ(one.std_error, many.std_error) << "workers=" << w;
        EXPECT_EQ(many.samples_used, n);
    }
}

TEST(Simulate, HistogramIndependentOfWorkerCount) {
    const ChannelParams p = unit_channel();
    SimConfig a = config(3 * kSamplesPerBlock + 7, 1);
    SimConfig b = a;
    b.workers = 5;
    const Histogram ha = simulate_histogram(p, a);
    const Histogram hb = simulate_histogram(p, b);
    EXPECT_EQ(ha.counts, hb.counts);
    EXPECT_EQ(ha.overflow, hb.overflow);
    EXPECT_EQ(ha.mean.value, hb.mean.value);
}

TEST(Simulate, SeedChangesResult) {
    SimConfig a = config(100000), b = config(100000);
    b.seed = 43;
    EXPECT_NE(simulate(unit_channel(), a, metric::Bep{}).value, simulate(unit_channel(), b, metric::Bep{}).value);
}

TEST(Simulate, CertainOutage) {
    const SimEstimate e = simulate(unit_channel(), config(50000), metric::Outage{1e300});
    EXPECT_EQ(e.value, 1.0);
    EXPECT_EQ(e.std_error, 0.0);
}

TEST(Simulate, DirectLinkMean) {
    // Exact-model mean: 1/lambda_sd + E[XY/(X+Y+1/gamma)]; the min-bound model has 1/lambda_sd + 1/lambda_S.
    const ChannelParams p{1000.0, 2.0, 1.0, 3.0};
    const Histogram h = simulate_minbound(p, config(2'000'000));
    EXPECT_NEAR(h.mean.value, 0.5 + 0.25, 4.0 * h.mean.std_error);
}

TEST(Simulate, MoreRelaysReduceOutage) {
    const ChannelParams p = unit_channel();
    SimConfig one = config(500000);
    SimConfig two = one;
    two.relays = 2;
    const SimEstimate o1 = simulate(p, one, metric::CdfAt{1.0});
    const SimEstimate o2 = simulate(p, two, metric::CdfAt{1.0});
    EXPECT_LT(o2.value, o1.value - 5.0 * (o1.std_error + o2.std_error));
}

TEST(Simulate, ConfigValidation) {
    const ChannelParams p = unit_channel();
    SimConfig cfg = config(0);
    EXPECT_THROW(simulate(p, cfg, metric::Bep{}), domain_error);
    cfg = config(10);
    cfg.relays = 0;
    EXPECT_THROW(simulate(p, cfg, metric::Bep{}), domain_error);
    cfg = config(10);
    cfg.histogram_hi = cfg.histogram_lo;
    EXPECT_THROW(simulate_histogram(p, cfg), domain_error);
    EXPECT_THROW(simulate({-1.0, 1.0, 1.0, 1.0}, config(10), metric::Bep{}), domain_error);
}

TEST(Histogram, MassAccounting) {
    SimConfig cfg = config(300000);
    cfg.histogram_hi = 2.0;
    const Histogram h = simulate_histogram(unit_channel(), cfg);
    const std::uint64_t in_range = std::accumulate(h.counts.begin(), h.counts.end(), std::uint64_t{0});
    EXPECT_EQ(in_range + h.underflow + h.overflow, cfg.samples);
    EXPECT_EQ(h.underflow, 0u);
    double mass = 0.0;
    for (std::size_t i = 0; i < h.counts.size(); ++i) mass += h.density(i) * h.bin_width();
    EXPECT_NEAR(mass, 1.0 - h.out_of_range_fraction(), 1e-12);
    EXPECT_TRUE(h.range_warning());
    EXPECT_NEAR(h.bin_center(0), 0.01, 1e-15);
}

TEST(Histogram, DensityIntegratesToOneInWideRange) {
    SimConfig cfg = config(200000);
    cfg.histogram_hi = 40.0;
    cfg.histogram_bins = 400;
    const Histogram h = simulate_histogram(unit_channel(), cfg);
    double mass = 0.0;
    for (std::size_t i = 0; i < h.counts.size(); ++i) mass += h.density(i) * h.bin_width();
    EXPECT_NEAR(mass, 1.0, 1e-12);
    EXPECT_FALSE(h.range_warning());
}

TEST(MinBound, MatchesClosedFormCdf) {
    const ChannelParams p{1000.0, 0.7, 1.4, 0.9};
    SimConfig cfg = config(1'000'000);
    for (double x : {0.3, 1.0, 2.5}) {
        const SimEstimate e = simulate(p, cfg, metric::CdfAt{x}, SimModel::minbound);
        EXPECT_NEAR(e.value, cdf_minbound(p, x), 4.0 * e.std_error + 1e-12) << "x=" << x;
    }
}

TEST(MinBound, HistogramFurtherFromSeriesPdfThanExactModel) {
    const ChannelParams p = unit_channel();
    const SeriesCdfCoeffs s = series_cdf_coeffs(p, series_coeffs(SeriesOrder{1.0}, TruncationDepth{10}));
    SimConfig cfg = config(2'000'000);
    cfg.histogram_bins = 50;
    const Histogram exact = simulate_histogram(p, cfg);
    const Histogram minb = simulate_minbound(p, cfg);
    double dev_exact = 0.0, dev_min = 0.0;
    for (std::size_t i = 0; i < exact.counts.size(); ++i) {
        const double f = pdf_eq(s, exact.bin_center(i));
        dev_exact += std::abs(exact.density(i) - f);
        dev_min += std::abs(minb.density(i) - f);
    }
    EXPECT_GT(dev_min, 5.0 * dev_exact);
}
