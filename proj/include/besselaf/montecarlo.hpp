#pragma once

// Seeded Monte Carlo simulation of the exact relay model (no high-SNR
// simplification). Samples are processed in fixed-size blocks; every block
// owns independent counter-based streams keyed by (seed, stream, block), with
// stream 0 for the direct link and stream r for relay r. Block results are
// merged in block order, so estimates do not depend on the worker count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <type_traits>
#include <variant>
#include <vector>

#include "besselaf/error.hpp"
#include "besselaf/relay_model.hpp"

namespace besselaf {

inline constexpr std::uint64_t kSamplesPerBlock = 1u << 16;

// SplitMix64 over a Weyl sequence; the state is the counter.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : state_(key) {}

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    static CounterRng for_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t block) {
        std::uint64_t key = mix(seed + 0x9E3779B97F4A7C15ULL);
        key = mix(key ^ (stream * 0xD1B54A32D192ED03ULL + 1));
        key = mix(key ^ (block * 0xAEF17502108EF2D9ULL + 2));
        return CounterRng(key);
    }

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Inverse-CDF exponential with rate lambda.
    double exponential(double lambda) { return -std::log1p(-uniform()) / lambda; }

private:
    std::uint64_t state_;
};

struct SimConfig {
    std::uint64_t seed = 42;
    std::uint64_t samples = 1'000'000;
    int relays = 1;
    int histogram_bins = 100;
    double histogram_lo = 0.0;
    double histogram_hi = 5.0;
    unsigned workers = 0;  // 0: hardware concurrency

    void validate() const {
        detail::require(samples >= 1, "samples must be positive");
        detail::require(relays >= 1, "relays must be positive");
        detail::require(histogram_bins >= 2, "histogram needs at least two bins");
        detail::require(histogram_lo >= 0.0 && histogram_hi > histogram_lo, "invalid histogram range");
    }
};

struct SimEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t samples_used = 0;
};

struct Histogram {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<std::uint64_t> counts;
    std::uint64_t underflow = 0;
    std::uint64_t overflow = 0;
    std::uint64_t samples_used = 0;
    SimEstimate mean;  // of the sampled power

    double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
    double bin_center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * bin_width(); }
    // Density estimate normalized by all samples, in range or not.
    double density(std::size_t i) const {
        return static_cast<double>(counts[i]) / (static_cast<double>(samples_used) * bin_width());
    }
    double out_of_range_fraction() const {
        return static_cast<double>(underflow + overflow) / static_cast<double>(samples_used);
    }
    bool range_warning() const { return out_of_range_fraction() > 0.01; }
};

// Source-relay-destination power for given hop powers.
inline double srd_power(double sr, double rd, double gamma) { return sr * rd / (sr + rd + 1.0 / gamma); }

inline double sample_srd_power(const ChannelParams& p, CounterRng& rng) {
    const double sr = rng.exponential(p.lambda_sr);
    const double rd = rng.exponential(p.lambda_rd);
    return srd_power(sr, rd, p.gamma);
}

enum class SimModel {
    exact,     // |h_sd|^2 + sum_r |h_srd,r|^2
    minbound,  // |h_sd|^2 + sum_r min(|h_sr,r|^2, |h_rd,r|^2)
    high_snr,  // exact model with the 1/gamma term dropped from each |h_srd,r|^2
};

namespace metric {
struct CdfAt { double x; };
struct Outage { double snr_threshold; };
struct Bep {};
struct Capacity {};
}  // namespace metric

using Metric = std::variant<metric::CdfAt, metric::Outage, metric::Bep, metric::Capacity>;

namespace detail {

// Welford accumulator; merged with Chan's update in a fixed order.
struct Moments {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double v) {
        ++n;
        const double delta = v - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (v - mean);
    }

    void merge(const Moments& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double total = static_cast<double>(n + o.n);
        const double delta = o.mean - mean;
        mean += delta * static_cast<double>(o.n) / total;
        m2 += o.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(o.n) / total;
        n += o.n;
    }

    SimEstimate estimate() const {
        const double var = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
        return {mean, std::sqrt(std::max(var, 0.0) / static_cast<double>(n)), n};
    }
};

// Draws one total equivalent power for sample index i of a block.
class PowerSampler {
public:
    PowerSampler(const ChannelParams& p, const SimConfig& cfg, SimModel model, std::uint64_t block)
        : p_(p), model_(model), direct_(CounterRng::for_stream(cfg.seed, 0, block)) {
        relays_.reserve(static_cast<std::size_t>(cfg.relays));
        for (int r = 1; r <= cfg.relays; ++r)
            relays_.push_back(CounterRng::for_stream(cfg.seed, static_cast<std::uint64_t>(r), block));
    }

    double operator()() {
        double total = direct_.exponential(p_.lambda_sd);
        for (auto& rng : relays_) {
            const double sr = rng.exponential(p_.lambda_sr);
            const double rd = rng.exponential(p_.lambda_rd);
            switch (model_) {
                case SimModel::exact: total += srd_power(sr, rd, p_.gamma); break;
                case SimModel::minbound: total += std::min(sr, rd); break;
                case SimModel::high_snr: total += sr * rd / (sr + rd); break;
            }
        }
        return total;
    }

private:
    ChannelParams p_;
    SimModel model_;
    CounterRng direct_;
    std::vector<CounterRng> relays_;
};

inline unsigned resolve_workers(unsigned requested) {
    if (requested != 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs block_fn(block_index, samples_in_block) for every block across workers
// and returns the per-block results in block order.
template <typename BlockFn>
auto run_blocks(const SimConfig& cfg, BlockFn&& block_fn) {
    using Result = std::invoke_result_t<BlockFn&, std::uint64_t, std::uint64_t>;
    const std::uint64_t blocks = (cfg.samples + kSamplesPerBlock - 1) / kSamplesPerBlock;
    std::vector<Result> results(blocks);
    std::atomic<std::uint64_t> next{0};
    const auto work = [&] {
        for (std::uint64_t b = next++; b < blocks; b = next++) {
            const std::uint64_t begin = b * kSamplesPerBlock;
            const std::uint64_t count = std::min(kSamplesPerBlock, cfg.samples - begin);
            results[b] = block_fn(b, count);
        }
    };
    const unsigned workers = static_cast<unsigned>(
        std::min<std::uint64_t>(resolve_workers(cfg.workers), blocks));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    return results;
}

inline double metric_value(const Metric& m, double gamma, double power) {
    return std::visit(
        [&](const auto& mm) -> double {
            using T = std::decay_t<decltype(mm)>;
            if constexpr (std::is_same_v<T, metric::CdfAt>) {
                return power <= mm.x ? 1.0 : 0.0;
            } else if constexpr (std::is_same_v<T, metric::Outage>) {
                return gamma * power <= mm.snr_threshold ? 1.0 : 0.0;
            } else if constexpr (std::is_same_v<T, metric::Bep>) {
                return 0.5 * std::erfc(std::sqrt(gamma * power));
            } else {
                return 0.5 * std::log1p(gamma * power);
            }
        },
        m);
}

}  // namespace detail

inline SimEstimate simulate(const ChannelParams& p, const SimConfig& cfg, const Metric& m,
                            SimModel model = SimModel::exact) {
    p.validate();
    cfg.validate();
    const auto parts = detail::run_blocks(cfg, [&](std::uint64_t block, std::uint64_t count) {
        detail::PowerSampler draw(p, cfg, model, block);
        detail::Moments acc;
        for (std::uint64_t i = 0; i < count; ++i) acc.add(detail::metric_value(m, p.gamma, draw()));
        return acc;
    });
    detail::Moments total;
    for (const auto& part : parts) total.merge(part);
    return total.estimate();
}

inline Histogram simulate_histogram(const ChannelParams& p, const SimConfig& cfg,
                                    SimModel model = SimModel::exact) {
    p.validate();
    cfg.validate();
    struct Part {
        std::vector<std::uint64_t> counts;
        std::uint64_t underflow = 0;
        std::uint64_t overflow = 0;
        detail::Moments moments;
    };
    const auto bins = static_cast<std::size_t>(cfg.histogram_bins);
    const double width = (cfg.histogram_hi - cfg.histogram_lo) / static_cast<double>(bins);
    const auto parts = detail::run_blocks(cfg, [&](std::uint64_t block, std::uint64_t count) {
        detail::PowerSampler draw(p, cfg, model, block);
        Part part;
        part.counts.assign(bins, 0);
        for (std::uint64_t i = 0; i < count; ++i) {
            const double v = draw();
            part.moments.add(v);
            if (v < cfg.histogram_lo) {
                ++part.underflow;
            } else if (v >= cfg.histogram_hi) {
                ++part.overflow;
            } else {
                const auto idx = std::min(bins - 1, static_cast<std::size_t>((v - cfg.histogram_lo) / width));
                ++part.counts[idx];
            }
        }
        return part;
    });
    Histogram h{cfg.histogram_lo, cfg.histogram_hi, std::vector<std::uint64_t>(bins, 0), 0, 0, 0, {}};
    detail::Moments moments;
    for (const auto& part : parts) {
        for (std::size_t i = 0; i < bins; ++i) h.counts[i] += part.counts[i];
        h.underflow += part.underflow;
        h.overflow += part.overflow;
        moments.merge(part.moments);
    }
    h.samples_used = moments.n;
    h.mean = moments.estimate();
    return h;
}

inline Histogram simulate_minbound(const ChannelParams& p, const SimConfig& cfg) {
    return simulate_histogram(p, cfg, SimModel::minbound);
}

}  // namespace besselaf
