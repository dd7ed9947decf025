#include "adversketch/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace adversketch {

const char* to_string(ExperimentMode mode) {
    switch (mode) {
        case ExperimentMode::countsketch_hh: return "countsketch_hh";
        case ExperimentMode::inner_product: return "inner_product";
        case ExperimentMode::mean_est: return "mean_est";
        case ExperimentMode::ams: return "ams";
    }
    throw std::invalid_argument("unknown ExperimentMode");
}

ExperimentMode experiment_mode_from_string(const std::string& name) {
    if (name == "countsketch_hh") return ExperimentMode::countsketch_hh;
    if (name == "inner_product") return ExperimentMode::inner_product;
    if (name == "mean_est") return ExperimentMode::mean_est;
    if (name == "ams") return ExperimentMode::ams;
    throw std::invalid_argument("unknown experiment mode: " + name);
}

int ExperimentConfig::resolved_r() const {
    if (r > 0) return r;
    return static_cast<int>(std::lround(B * ell * ell));
}

std::uint64_t ExperimentConfig::resolved_m() const {
    if (m > 0) return m;
    return mode == ExperimentMode::ams ? 256 : 256 * static_cast<std::uint64_t>(b);
}

double ExperimentConfig::resolved_g() const { return g > 0.0 ? g : a; }

void ExperimentConfig::validate() const {
    if (ell < 1) throw std::invalid_argument("config: ell must be >= 1");
    if (seeds < 0) throw std::invalid_argument("config: seeds must be >= 0");
    if (mode == ExperimentMode::ams) {
        if (b != 1) throw std::invalid_argument("config: ams mode requires b = 1");
    } else if (mode != ExperimentMode::mean_est) {
        if (b < 2) throw std::invalid_argument("config: countsketch modes require b >= 2");
    }
    if (resolved_r() < 0) throw std::invalid_argument("config: r must be >= 0");
}

namespace {

void parallel_for(int n, const std::function<void(int)>& fn) {
    const int workers = std::min<int>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

std::unique_ptr<ReportingFunction> fresh_estimator(const ExperimentConfig& cfg, double sigma,
                                                   std::uint64_t seed) {
    CorrectnessParams params{std::pow(cfg.delta2, 0.25), cfg.a, cfg.c, cfg.ell, sigma};
    return make_estimator(cfg.estimator, params, seed);
}

void run_gate(const ExperimentConfig& cfg, double sigma) {
    CorrectnessParams gate_params{std::pow(cfg.delta2, 0.25), cfg.a, cfg.c, cfg.ell, sigma};
    auto estimator = make_estimator(cfg.estimator, gate_params, derive_seed(cfg.master_seed, 0xAAAAu));
    const CorrectnessReport rep =
        verify_correctness(*estimator, gate_params, 5000, derive_seed(cfg.master_seed, 0xBBBBu));
    if (!rep.pass) {
        throw GateFailure(std::string(to_string(cfg.estimator)) +
                          " failed the correctness gate: rate_at_c=" + std::to_string(rep.rate_at_c) +
                          " rate_at_a=" + std::to_string(rep.rate_at_a));
    }
}

void run_norm_gate(const ExperimentConfig& cfg) {
    // Definition of a correct norm estimator mapped onto the reporting-function
    // band: a = 1, c = sqrt(1 + 2*epsilon), sigma = tau/sqrt(2).
    struct Adapter final : ReportingFunction {
        std::unique_ptr<NormEstimator> inner;
        double report_probability(std::span<const double> adjusted) override {
            return inner->decide(adjusted) > 0 ? 1.0 : 0.0;
        }
    };
    Adapter adapter;
    adapter.inner = norm_estimator(cfg.tau, cfg.epsilon);
    CorrectnessParams params{std::pow(cfg.delta2, 0.25), 1.0, std::sqrt(1.0 + 2.0 * cfg.epsilon),
                             cfg.ell, cfg.tau * std::sqrt(0.5)};
    const CorrectnessReport rep =
        verify_correctness(adapter, params, 5000, derive_seed(cfg.master_seed, 0xBBBBu));
    if (!rep.pass) {
        throw GateFailure("norm estimator failed the correctness gate: rate_at_c=" +
                          std::to_string(rep.rate_at_c) + " rate_at_a=" + std::to_string(rep.rate_at_a));
    }
}

SeedRecord run_countsketch_seed(const ExperimentConfig& cfg, int index) {
    const SketchParams params{cfg.n, cfg.ell, cfg.b};
    const std::uint64_t rho_seed = derive_seed(cfg.master_seed, 2 * static_cast<std::uint64_t>(index));
    const std::uint64_t attack_seed = derive_seed(cfg.master_seed, 2 * static_cast<std::uint64_t>(index) + 1);
    const SketchRandomness rho(params, rho_seed);

    AttackConfig attack{params, cfg.resolved_r(), cfg.resolved_m(), cfg.a, cfg.c,
                        cfg.resolved_g(), cfg.delta2, attack_seed, cfg.random_supports};
    auto estimator = fresh_estimator(cfg, attack.sigma(), derive_seed(attack_seed, 7));
    const QueryRoute route = cfg.mode == ExperimentMode::inner_product
                                 ? QueryRoute::inner_product
                                 : QueryRoute::heavy_hitter;
    const AttackTrace trace = universal_attack(
        rho, [&](int) -> ReportingFunction& { return *estimator; }, attack, /*gate=*/false, route);
    const BiasReport bias = bias_under(rho, trace.adversarial, trace.heavy_key, cfg.B, &attack);

    SeedRecord rec;
    rec.seed = rho_seed;
    rec.metrics = {
        {"mean_adjusted", bias.mean_adjusted},
        {"threshold", bias.threshold},
        {"norm", bias.norm},
        {"predicted_mean", bias.predicted_mean},
        {"predicted_var", bias.predicted_var},
        {"adversarial", bias.adversarial ? 1.0 : 0.0},
    };
    return rec;
}

SeedRecord run_mean_est_seed(const ExperimentConfig& cfg, int index, MeanAttackOutput* out) {
    const std::uint64_t seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(index));
    MeanAttackConfig attack{cfg.a, cfg.c, cfg.resolved_g(), cfg.sigma, cfg.ell, cfg.resolved_r(), seed};
    auto estimator = fresh_estimator(cfg, cfg.sigma, derive_seed(seed, 7));
    *out = mean_est_attack([&](int) -> ReportingFunction& { return *estimator; }, attack);

    double sq = 0.0;
    for (double x : out->attack_vector) sq += x * x;
    SeedRecord rec;
    rec.seed = seed;
    rec.metrics = {
        {"attack_mean", out->attack_mean()},
        {"sq_norm_over_ell", sq / cfg.ell},
    };
    return rec;
}

SeedRecord run_ams_seed(const ExperimentConfig& cfg, int index) {
    const SketchParams params{cfg.n, cfg.ell, 1};
    const std::uint64_t rho_seed = derive_seed(cfg.master_seed, 2 * static_cast<std::uint64_t>(index));
    const std::uint64_t attack_seed = derive_seed(cfg.master_seed, 2 * static_cast<std::uint64_t>(index) + 1);
    const SketchRandomness rho(params, rho_seed);

    AmsAttackConfig attack{params, cfg.tau, cfg.epsilon, cfg.resolved_r(), cfg.resolved_m(),
                           attack_seed, cfg.random_supports};
    auto estimator = norm_estimator(cfg.tau, cfg.epsilon);
    const AttackTrace trace =
        ams_attack(rho, [&](int) -> NormEstimator& { return *estimator; }, attack);
    const AmsBiasReport bias = ams_bias_under(rho, trace.adversarial, cfg.xi);

    SeedRecord rec;
    rec.seed = rho_seed;
    rec.metrics = {
        {"mean_sq", bias.mean_sq},
        {"norm_sq", bias.norm_sq},
        {"ratio", bias.ratio},
        {"adversarial", bias.adversarial ? 1.0 : 0.0},
    };
    return rec;
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();

    RunReport report;
    report.config = cfg;
    report.records.resize(static_cast<std::size_t>(cfg.seeds));

    const bool sketch_mode = cfg.mode == ExperimentMode::countsketch_hh ||
                             cfg.mode == ExperimentMode::inner_product;
    if (sketch_mode) {
        const SketchParams params{cfg.n, cfg.ell, cfg.b};
        AttackConfig probe{params, cfg.resolved_r(), cfg.resolved_m(), cfg.a, cfg.c,
                           cfg.resolved_g(), cfg.delta2, 0};
        run_gate(cfg, probe.sigma());
    } else if (cfg.mode == ExperimentMode::mean_est) {
        run_gate(cfg, cfg.sigma);
    } else {
        run_norm_gate(cfg);
    }

    std::vector<MeanAttackOutput> mean_runs(cfg.mode == ExperimentMode::mean_est
                                                ? static_cast<std::size_t>(cfg.seeds)
                                                : 0);
    parallel_for(cfg.seeds, [&](int i) {
        const auto start = std::chrono::steady_clock::now();
        SeedRecord rec;
        switch (cfg.mode) {
            case ExperimentMode::countsketch_hh:
            case ExperimentMode::inner_product:
                rec = run_countsketch_seed(cfg, i);
                break;
            case ExperimentMode::mean_est:
                rec = run_mean_est_seed(cfg, i, &mean_runs[static_cast<std::size_t>(i)]);
                break;
            case ExperimentMode::ams:
                rec = run_ams_seed(cfg, i);
                break;
        }
        rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        report.records[static_cast<std::size_t>(i)] = std::move(rec);
    });

    if (cfg.mode == ExperimentMode::mean_est) {
        if (cfg.seeds >= 100) {
            MeanAttackConfig attack{cfg.a, cfg.c, cfg.resolved_g(), cfg.sigma,
                                    cfg.ell, cfg.resolved_r(), 0};
            const MeanAttackStats st = mean_attack_stats(mean_runs, attack);
            double sq_sum = 0.0;
            for (const auto& rec : report.records) sq_sum += rec.metrics[1].second;
            const double emp_sq = sq_sum / cfg.seeds;
            const bool mean_ok = std::abs(st.emp_mean - st.pred_mean) <= 0.15 * st.pred_mean;
            const bool var_ok = st.emp_var >= 0.8 * st.var_lo && st.emp_var <= 1.2 * st.var_hi;
            const bool sq_ok = emp_sq >= 0.8 * st.sq_norm_lo;
            report.pass = mean_ok && var_ok && sq_ok;
            report.aggregates = {
                {"emp_mean", st.emp_mean},     {"emp_var", st.emp_var},
                {"pred_mean", st.pred_mean},   {"var_lo", st.var_lo},
                {"var_hi", st.var_hi},         {"sq_norm_lo", st.sq_norm_lo},
                {"emp_sq_norm_over_ell", emp_sq},
            };
        } else {
            report.pass = cfg.seeds == 0;
        }
    } else {
        int adversarial = 0;
        for (const auto& rec : report.records) {
            for (const auto& [name, value] : rec.metrics) {
                if (name == "adversarial" && value > 0.5) ++adversarial;
            }
        }
        report.aggregates = {
            {"adversarial_count", static_cast<double>(adversarial)},
            {"seed_count", static_cast<double>(cfg.seeds)},
        };
        report.pass = cfg.seeds == 0 ||
                      adversarial >= cfg.min_pass_fraction * cfg.seeds - 1e-9;
    }
    return report;
}

namespace {

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void config_json(const ExperimentConfig& c, std::ostringstream& os) {
    os << "{\"mode\":\"" << to_string(c.mode) << "\""
       << ",\"ell\":" << c.ell << ",\"b\":" << c.b << ",\"n\":" << c.n
       << ",\"r\":" << c.resolved_r() << ",\"B\":" << fmt17(c.B)
       << ",\"m\":" << c.resolved_m() << ",\"a\":" << fmt17(c.a)
       << ",\"c\":" << fmt17(c.c) << ",\"g\":" << fmt17(c.resolved_g())
       << ",\"delta2\":" << fmt17(c.delta2) << ",\"epsilon\":" << fmt17(c.epsilon)
       << ",\"xi\":" << fmt17(c.xi) << ",\"tau\":" << fmt17(c.tau)
       << ",\"sigma\":" << fmt17(c.sigma)
       << ",\"estimator\":\"" << to_string(c.estimator) << "\""
       << ",\"seeds\":" << c.seeds << ",\"master_seed\":" << c.master_seed
       << ",\"min_pass_fraction\":" << fmt17(c.min_pass_fraction)
       << ",\"random_supports\":" << (c.random_supports ? "true" : "false") << "}";
}

}  // namespace

std::string report_to_json(const RunReport& report) {
    std::ostringstream os;
    os << "{\"config\":";
    config_json(report.config, os);
    os << ",\"seeds\":[";
    for (std::size_t i = 0; i < report.records.size(); ++i) {
        const auto& rec = report.records[i];
        if (i) os << ",";
        os << "{\"seed\":" << rec.seed << ",\"metrics\":{";
        for (std::size_t k = 0; k < rec.metrics.size(); ++k) {
            if (k) os << ",";
            os << "\"" << rec.metrics[k].first << "\":" << fmt17(rec.metrics[k].second);
        }
        os << "}";
        if (report.config.timings) os << ",\"wall_seconds\":" << fmt17(rec.wall_seconds);
        os << "}";
    }
    os << "],\"aggregates\":{";
    for (std::size_t k = 0; k < report.aggregates.size(); ++k) {
        if (k) os << ",";
        os << "\"" << report.aggregates[k].first << "\":" << fmt17(report.aggregates[k].second);
    }
    os << "},\"pass\":" << (report.pass ? "true" : "false") << "}\n";
    return os.str();
}

std::string report_to_csv(const RunReport& report) {
    std::ostringstream os;
    os << "seed,metric,value\n";
    for (const auto& rec : report.records) {
        for (const auto& [name, value] : rec.metrics) {
            os << rec.seed << "," << name << "," << fmt17(value) << "\n";
        }
    }
    return os.str();
}

ReportFormat report_format_from_string(const std::string& name) {
    if (name == "json") return ReportFormat::json;
    if (name == "csv") return ReportFormat::csv;
    throw std::invalid_argument("unknown report format: " + name);
}

void emit_report(const RunReport& report, ReportFormat format, std::ostream& os) {
    os << (format == ReportFormat::json ? report_to_json(report) : report_to_csv(report));
}

void emit_report_file(const RunReport& report, ReportFormat format, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output path: " + path);
    emit_report(report, format, out);
}

}  // namespace adversketch
