// besselaf: coefficient tables, Bessel series checks, relay-channel
// distributions, performance sweeps and the acceptance report.
//
// Every output starts with a '#'-prefixed JSON manifest line (CSV) or carries
// a "manifest" member (JSON). Exit codes: 0 ok, 1 validation failure,
// 2 usage or domain error, 3 numerical failure.

#include <unistd.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "besselaf/acceptance.hpp"
#include "besselaf/bessel_oracle.hpp"
#include "besselaf/montecarlo.hpp"
#include "besselaf/performance.hpp"
#include "besselaf/relay_model.hpp"
#include "besselaf/series.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace besselaf;

enum ExitCode : int { kOk = 0, kCriteriaFailed = 1, kUsage = 2, kNumerical = 3 };

class usage_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---- logging ---------------------------------------------------------------

bool use_color() {
    const char* no_color = std::getenv("NO_COLOR");
    if (no_color != nullptr && no_color[0] != '\0') return false;
    return ::isatty(STDERR_FILENO) != 0;
}

void log_line(const char* level, const char* ansi, const std::string& msg) {
    if (use_color())
        std::cerr << ansi << level << "\033[0m: " << msg << '\n';
    else
        std::cerr << level << ": " << msg << '\n';
}

void log_error(const std::string& msg) { log_line("error", "\033[31m", msg); }
void log_warn(const std::string& msg) { log_line("warning", "\033[33m", msg); }
void log_info(const std::string& msg) { log_line("info", "\033[36m", msg); }

// ---- output ----------------------------------------------------------------

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;  // null cells print empty
};

std::string fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string csv_cell(const json& v, const char* number_format) {
    if (v.is_null()) return "";
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string quoted = "\"";
        for (char c : s) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
        return quoted + "\"";
    }
    if (v.is_number_integer()) return v.dump();
    char buf[64];
    std::snprintf(buf, sizeof buf, number_format, v.get<double>());
    return buf;
}

// Non-finite doubles become null in JSON.
json cell(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct Output {
    std::string path = "-";
    std::string format = "csv";
};

struct Manifest {
    std::string command;
    json parameters = json::object();
    std::optional<std::uint64_t> seed;
};

void emit(const Table& t, const Manifest& m, const Output& out, const char* number_format = "%.10g") {
    std::string body;
    json records = json::array();
    if (out.format == "json") {
        for (const auto& row : t.rows) {
            json rec = json::object();
            for (std::size_t i = 0; i < t.columns.size(); ++i) rec[t.columns[i]] = row[i];
            records.push_back(rec);
        }
        body = records.dump(2);
    } else {
        std::ostringstream os;
        for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
        os << '\n';
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i], number_format);
            os << '\n';
        }
        body = os.str();
    }
    json manifest = json::object();
    manifest["command"] = m.command;
    manifest["parameters"] = m.parameters;
    manifest["seed"] = m.seed ? json(*m.seed) : json(nullptr);
    manifest["output_path"] = out.path;
    manifest["artifact_checksum"] = fnv1a64(body);

    std::string text;
    if (out.format == "json") {
        json doc = json::object();
        doc["manifest"] = manifest;
        doc["records"] = records;
        text = doc.dump(2) + "\n";
    } else {
        text = "# " + manifest.dump() + "\n" + body;
    }
    if (out.path == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream f(out.path, std::ios::binary);
    if (!f) throw usage_error("cannot open output file: " + out.path);
    f << text;
    if (!f) throw usage_error("failed writing output file: " + out.path);
}

// ---- shared option groups ----------------------------------------------------

std::vector<double> linear_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !std::isfinite(lo) || !std::isfinite(hi)) throw usage_error("grid step must be positive");
    std::vector<double> out;
    if (hi < lo) return out;
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
    return out;
}

struct ChannelOptions {
    double gamma_db = 30.0;
    double gamma_linear = 0.0;
    double lambda_sd = 1.0;
    double lambda_sr = 1.0;
    double lambda_rd = 1.0;
    CLI::Option* linear_opt = nullptr;

    void add(CLI::App* app, bool with_gamma) {
        if (with_gamma) {
            auto* db = app->add_option("--gamma-db", gamma_db, "transmit SNR in dB")->capture_default_str();
            linear_opt = app->add_option("--gamma-linear", gamma_linear, "transmit SNR, linear (overrides dB)");
            db->excludes(linear_opt);
        }
        app->add_option("--lambda-sd", lambda_sd, "S-D fading rate")->capture_default_str();
        app->add_option("--lambda-sr", lambda_sr, "S-R fading rate")->capture_default_str();
        app->add_option("--lambda-rd", lambda_rd, "R-D fading rate")->capture_default_str();
    }

    double gamma() const { return linear_opt != nullptr && *linear_opt ? gamma_linear : db_to_linear(gamma_db); }

    ChannelParams params(double gamma_value) const { return {gamma_value, lambda_sd, lambda_sr, lambda_rd}; }

    void record(json& p, bool with_gamma) const {
        if (with_gamma) p["gamma"] = gamma();
        p["lambda_sd"] = lambda_sd;
        p["lambda_sr"] = lambda_sr;
        p["lambda_rd"] = lambda_rd;
    }
};

struct SimOptions {
    std::uint64_t seed = 42;
    std::uint64_t samples = 1'000'000;
    int relays = 1;
    unsigned workers = 0;

    void add(CLI::App* app, std::uint64_t default_samples) {
        samples = default_samples;
        app->add_option("--seed", seed, "random seed")->capture_default_str();
        app->add_option("--samples", samples, "Monte Carlo sample count")->capture_default_str();
        app->add_option("--relays", relays, "number of relays in the simulation")->capture_default_str();
        app->add_option("--workers", workers, "worker threads (0: all cores); does not change results");
    }

    SimConfig config() const {
        SimConfig c;
        c.seed = seed;
        c.samples = samples;
        c.relays = relays;
        c.workers = workers;
        return c;
    }
};

void add_output(CLI::App* app, Output& out, const std::vector<std::string>& formats) {
    app->add_option("--out", out.path, "output file ('-' for stdout)")->capture_default_str();
    app->add_option("--format", out.format, "output format")->check(CLI::IsMember(formats))->capture_default_str();
}

SeriesCdfCoeffs k1_series(const ChannelParams& p, int k) {
    return series_cdf_coeffs(p, series_coeffs(SeriesOrder{1.0}, TruncationDepth{k}));
}

void warn_conditioning(const SeriesCdfCoeffs& s) {
    const double kappa = series_condition(s);
    if (kappa > acceptance::kMaxCondition) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "series coefficients cancel heavily (condition %.3g); expect about %.0e absolute error", kappa,
                      kappa * 2.2e-16);
        log_warn(buf);
    }
}

// ---- coeffs ------------------------------------------------------------------

struct CoeffsArgs {
    double nu = 1.0;
    int k = 10;
    Output out;
};

int run_coeffs(const CoeffsArgs& a) {
    const CoefficientTable t = series_coeffs(SeriesOrder{a.nu}, TruncationDepth{a.k});
    Table table{{"nu", "k", "q", "a"}, {}};
    for (std::size_t q = 0; q < t.a.size(); ++q)
        table.rows.push_back({json(a.nu), json(a.k), json(static_cast<int>(q)), json(t.a[q])});
    Manifest m{"coeffs", json::object(), std::nullopt};
    m.parameters["nu"] = a.nu;
    m.parameters["k"] = a.k;
    m.parameters["format"] = a.out.format;
    Output out = a.out;
    const bool short_fmt = out.format == "short";
    if (short_fmt) out.format = "csv";
    emit(table, m, out, short_fmt ? "%.4g" : "%.17g");
    return kOk;
}

// ---- bessel ------------------------------------------------------------------

struct BesselArgs {
    double nu = 1.0;
    std::vector<double> betas{0.5, 1.0, 2.0};
    std::vector<double> xs;
    double x_min = 0.1, x_max = 5.0, x_step = 0.1;
    std::vector<int> ks{2, 10};
    Output out;
};

int run_bessel(const BesselArgs& a) {
    const std::vector<double> xs = a.xs.empty() ? linear_grid(a.x_min, a.x_max, a.x_step) : a.xs;
    if (xs.empty() || a.betas.empty() || a.ks.empty()) throw usage_error("empty grid: need at least one beta, x and k");
    for (double x : xs)
        if (!(x > 0.0)) throw usage_error("x grid values must be positive");
    for (double b : a.betas)
        if (!(b > 0.0)) throw usage_error("beta values must be positive");
    std::vector<CoefficientTable> tables;
    for (int k : a.ks) tables.push_back(series_coeffs(SeriesOrder{a.nu}, TruncationDepth{k}));
    Table table{{"beta", "x", "z", "k", "series", "oracle", "rel_error"}, {}};
    for (double beta : a.betas) {
        for (double x : xs) {
            const double z = beta * x;
            const double ref = K_reference(a.nu, z);
            for (const auto& t : tables) {
                const double v = evaluate_series(t, z);
                table.rows.push_back({json(beta), json(x), json(z), json(t.k), cell(v), cell(ref),
                                      cell(std::abs(v - ref) / std::abs(ref))});
            }
        }
    }
    Manifest m{"bessel", json::object(), std::nullopt};
    m.parameters["nu"] = a.nu;
    m.parameters["beta"] = a.betas;
    m.parameters["x"] = xs;
    m.parameters["k"] = a.ks;
    m.parameters["format"] = a.out.format;
    emit(table, m, a.out);
    return kOk;
}

// ---- dist --------------------------------------------------------------------

struct DistArgs {
    ChannelOptions channel;
    SimOptions sim;
    int k = 10;
    double x_max = 5.0;
    double x_step = 0.05;
    bool mc = true;
    bool minbound = true;
    bool quadrature = true;
    Output out;
};

int run_dist(const DistArgs& a) {
    const ChannelParams p = a.channel.params(a.channel.gamma());
    p.validate();
    if (!(a.x_step > 0.0) || !(a.x_max >= 0.0)) throw usage_error("need --x-step > 0 and --x-max >= 0");
    const SeriesCdfCoeffs s = k1_series(p, a.k);
    warn_conditioning(s);
    const auto steps = static_cast<std::size_t>(std::floor(a.x_max / a.x_step + 1e-9));
    std::vector<double> xs;
    for (std::size_t j = 0; j <= steps; ++j) xs.push_back(static_cast<double>(j) * a.x_step);

    const CdfExcursion exc = cdf_excursion(s, xs);
    if (exc.exceeds(1e-6)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "series CDF leaves [0,1] before clamping (below %.3g, above %.3g)",
                      exc.below_zero, exc.above_one);
        log_warn(buf);
    }

    // Half-step bins: grid point j covers fine bins 2j-1 and 2j, so the
    // density at x_j averages over [x_j - h, x_j + h).
    std::optional<Histogram> hist;
    if (a.mc) {
        SimConfig cfg = a.sim.config();
        const double h = 0.5 * a.x_step;
        cfg.histogram_lo = 0.0;
        cfg.histogram_bins = static_cast<int>(2 * steps + 1);
        cfg.histogram_hi = h * static_cast<double>(cfg.histogram_bins);
        hist = simulate_histogram(p, cfg);
        if (hist->range_warning()) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "%.2f%% of simulated samples fall outside the x grid",
                          100.0 * hist->out_of_range_fraction());
            log_warn(buf);
        }
    }
    Table table{{"x", "cdf_eq", "pdf_eq", "cdf_quadrature", "mc_density", "minbound_density"}, {}};
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const double x = xs[j];
        json mc = nullptr;
        if (hist) {
            mc = j == 0 ? json(hist->density(0)) : json(0.5 * (hist->density(2 * j - 1) + hist->density(2 * j)));
        }
        table.rows.push_back({json(x), json(cdf_eq(s, x)), json(pdf_eq(s, x)),
                              a.quadrature ? json(cdf_eq_quadrature(p, x)) : json(nullptr), mc,
                              a.minbound ? json(pdf_minbound(p, x)) : json(nullptr)});
    }
    Manifest m{"dist", json::object(), std::nullopt};
    a.channel.record(m.parameters, true);
    m.parameters["k"] = a.k;
    m.parameters["x_max"] = a.x_max;
    m.parameters["x_step"] = a.x_step;
    m.parameters["mc"] = a.mc;
    m.parameters["minbound"] = a.minbound;
    m.parameters["quadrature"] = a.quadrature;
    if (a.mc) {
        m.seed = a.sim.seed;
        m.parameters["samples"] = a.sim.samples;
        m.parameters["relays"] = a.sim.relays;
    }
    m.parameters["format"] = a.out.format;
    emit(table, m, a.out);
    return kOk;
}

// ---- perf --------------------------------------------------------------------

struct PerfArgs {
    ChannelOptions channel;
    SimOptions sim;
    std::vector<double> gamma_db{-5, 0, 5, 10, 15, 20, 25, 30, 35};
    std::vector<double> gamma_linear;
    CLI::Option* linear_opt = nullptr;
    double threshold = 1.0;
    int k = 10;
    bool mc = false;
    bool bits = false;
    Output out;
};

int run_perf(const PerfArgs& a) {
    const bool linear = a.linear_opt != nullptr && *a.linear_opt;
    std::vector<double> gammas;
    if (linear) {
        gammas = a.gamma_linear;
    } else {
        for (double db : a.gamma_db) gammas.push_back(db_to_linear(db));
    }
    if (gammas.empty()) throw usage_error("empty SNR grid");
    for (double g : gammas)
        if (!(g >= 0.0) || !std::isfinite(g)) throw usage_error("SNR grid values must be finite and >= 0");
    detail::require(a.threshold > 0.0, "outage threshold must be positive");
    if (a.mc && a.sim.relays > 1) log_info("closed-form columns describe a single relay; simulation columns use --relays");

    const double unit = a.bits ? 1.0 / std::numbers::ln2 : 1.0;
    const std::string cap = a.bits ? "capacity_bits" : "capacity_nats";
    Table table{{"gamma_db", "gamma", "outage", "bep", cap}, {}};
    if (a.mc) {
        for (const char* c : {"mc_outage", "mc_outage_se", "mc_bep", "mc_bep_se"}) table.columns.emplace_back(c);
        table.columns.push_back("mc_" + cap);
        table.columns.push_back("mc_" + cap + "_se");
    }
    // The coefficients do not depend on gamma.
    const SeriesCdfCoeffs s = k1_series(a.channel.params(1.0), a.k);
    warn_conditioning(s);
    for (double g : gammas) {
        std::vector<json> row;
        if (g == 0.0) {
            // Zero transmit power: certain outage, coin-flip bits, no capacity.
            row = {json(nullptr), json(0.0), json(1.0), json(0.5), json(0.0)};
            if (a.mc) row.insert(row.end(), {json(1.0), json(0.0), json(0.5), json(0.0), json(0.0), json(0.0)});
            table.rows.push_back(row);
            continue;
        }
        const ChannelParams p = a.channel.params(g);
        const PerfPoint pt = performance_point(p, s, a.threshold);
        row = {cell(pt.gamma_db), json(g), json(pt.outage), json(pt.bep), json(pt.capacity_nats * unit)};
        if (a.mc) {
            const SimConfig cfg = a.sim.config();
            const SimEstimate o = simulate(p, cfg, metric::Outage{a.threshold});
            const SimEstimate b = simulate(p, cfg, metric::Bep{});
            const SimEstimate c = simulate(p, cfg, metric::Capacity{});
            row.insert(row.end(), {json(o.value), json(o.std_error), json(b.value), json(b.std_error),
                                   json(c.value * unit), json(c.std_error * unit)});
        }
        table.rows.push_back(row);
    }
    Manifest m{"perf", json::object(), std::nullopt};
    a.channel.record(m.parameters, false);
    m.parameters["gamma"] = gammas;
    m.parameters["threshold"] = a.threshold;
    m.parameters["k"] = a.k;
    m.parameters["mc"] = a.mc;
    m.parameters["bits"] = a.bits;
    if (a.mc) {
        m.seed = a.sim.seed;
        m.parameters["samples"] = a.sim.samples;
        m.parameters["relays"] = a.sim.relays;
    }
    m.parameters["format"] = a.out.format;
    emit(table, m, a.out);
    return kOk;
}

// ---- validate ----------------------------------------------------------------

struct ValidateArgs {
    SimOptions sim;
    Output out;
};

int run_validate(const ValidateArgs& a) {
    acceptance::Config cfg;
    cfg.seed = a.sim.seed;
    cfg.samples = a.sim.samples;
    cfg.workers = a.sim.workers;
    Table table{{"id", "name", "status", "detail"}, {}};
    int failed = 0;
    for (int id = 1; id <= acceptance::kCriterionCount; ++id) {
        const acceptance::CriterionResult r = acceptance::run_criterion(id, cfg);
        if (!r.passed) ++failed;
        table.rows.push_back({json(r.id), json(r.name), json(r.passed ? "PASS" : "FAIL"), json(r.summary)});
        for (const auto& note : r.notes) table.rows.push_back({json(r.id), json(r.name), json("note"), json(note)});
        log_info("criterion " + std::to_string(id) + (r.passed ? " PASS" : " FAIL"));
    }
    Manifest m{"validate", json::object(), a.sim.seed};
    m.parameters["samples"] = a.sim.samples;
    m.parameters["format"] = a.out.format;
    emit(table, m, a.out);
    if (failed > 0) {
        log_warn(std::to_string(failed) + " of " + std::to_string(acceptance::kCriterionCount) + " criteria failed");
        return kCriteriaFailed;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bessel series and AF relay performance toolkit"};
    app.require_subcommand(1);

    CoeffsArgs coeffs;
    auto* c = app.add_subcommand("coeffs", "series coefficient table a_{nu,k,q}");
    c->add_option("--nu", coeffs.nu, "Bessel order")->capture_default_str();
    c->add_option("--k", coeffs.k, "truncation depth")->capture_default_str();
    add_output(c, coeffs.out, {"csv", "json", "short"});

    BesselArgs bessel;
    auto* b = app.add_subcommand("bessel", "series vs quadrature K_nu(beta x)");
    b->add_option("--nu", bessel.nu, "Bessel order")->capture_default_str();
    b->add_option("--beta", bessel.betas, "beta values")->capture_default_str();
    b->add_option("--x", bessel.xs, "explicit x values (overrides the range)");
    b->add_option("--x-min", bessel.x_min)->capture_default_str();
    b->add_option("--x-max", bessel.x_max)->capture_default_str();
    b->add_option("--x-step", bessel.x_step)->capture_default_str();
    b->add_option("--k", bessel.ks, "truncation depths")->capture_default_str();
    add_output(b, bessel.out, {"csv", "json"});

    DistArgs dist;
    auto* d = app.add_subcommand("dist", "CDF/PDF of the equivalent channel power");
    dist.channel.add(d, true);
    dist.sim.add(d, 10'000'000);
    d->add_option("--k", dist.k, "truncation depth")->capture_default_str();
    d->add_option("--x-max", dist.x_max)->capture_default_str();
    d->add_option("--x-step", dist.x_step)->capture_default_str();
    d->add_flag("--mc,!--no-mc", dist.mc, "simulated density column");
    d->add_flag("--minbound,!--no-minbound", dist.minbound, "min-bound baseline column");
    d->add_flag("--quadrature,!--no-quadrature", dist.quadrature, "exact-convolution CDF column");
    add_output(d, dist.out, {"csv", "json"});

    PerfArgs perf;
    auto* p = app.add_subcommand("perf", "outage, bit error probability and capacity vs SNR");
    perf.channel.add(p, false);
    perf.sim.add(p, 1'000'000);
    auto* db = p->add_option("--gamma-db", perf.gamma_db, "SNR grid in dB")->capture_default_str();
    perf.linear_opt = p->add_option("--gamma-linear", perf.gamma_linear, "SNR grid, linear");
    db->excludes(perf.linear_opt);
    p->add_option("--threshold", perf.threshold, "outage SNR threshold, linear")->capture_default_str();
    p->add_option("--k", perf.k, "truncation depth")->capture_default_str();
    p->add_flag("--mc", perf.mc, "add Monte Carlo columns with standard errors");
    p->add_flag("--bits", perf.bits, "capacity in bits/s/Hz instead of nats");
    add_output(p, perf.out, {"csv", "json"});

    ValidateArgs validate;
    auto* v = app.add_subcommand("validate", "run acceptance criteria 1-9");
    validate.sim.add(v, 10'000'000);
    add_output(v, validate.out, {"csv", "json"});

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*c) return run_coeffs(coeffs);
        if (*b) return run_bessel(bessel);
        if (*d) return run_dist(dist);
        if (*p) return run_perf(perf);
        if (*v) return run_validate(validate);
    } catch (const usage_error& e) {
        log_error(e.what());
        return kUsage;
    } catch (const besselaf::domain_error& e) {
        log_error(e.what());
        return kUsage;
    } catch (const degenerate_parameter_error& e) {
        log_error(e.what());
        return kNumerical;
    } catch (const numerical_error& e) {
        char buf[64];
        std::snprintf(buf, sizeof buf, " (achieved error %.3g)", e.achieved_error());
        log_error(std::string(e.what()) + buf);
        return kNumerical;
    } catch (const std::exception& e) {
        log_error(e.what());
        return kNumerical;
    }
    return kUsage;
}
