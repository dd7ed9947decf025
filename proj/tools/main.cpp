#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "adversketch/experiment.hpp"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitGateFailure = 3;

struct OutputOptions {
    std::string out;
    std::string format = "json";
};

// Relative --out paths land in $ADVERSKETCH_OUT_DIR when it is set.
std::string resolve_out(const std::string& out) {
    if (out.empty()) return out;
    std::filesystem::path p(out);
    if (p.is_absolute()) return out;
    if (const char* dir = std::getenv("ADVERSKETCH_OUT_DIR")) {
        return (std::filesystem::path(dir) / p).string();
    }
    return out;
}

void add_output_options(CLI::App& cmd, OutputOptions& opts) {
    cmd.add_option("--out", opts.out, "Output file (default: stdout)");
    cmd.add_option("--format", opts.format, "Report format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
}

void add_common_options(CLI::App& cmd, adversketch::ExperimentConfig& cfg) {
    cmd.set_config("--config");
    cmd.add_option("--ell", cfg.ell, "Number of sketch rows");
    cmd.add_option("--r", cfg.r, "Number of attack queries (0: derive from B)");
    cmd.add_option("--B", cfg.B, "Bias multiplier; r = B*ell^2 when --r is 0");
    cmd.add_option("--m", cfg.m, "Tail support size (0: default)");
    cmd.add_option("--delta2", cfg.delta2, "Failure probability target");
    cmd.add_option("--seeds", cfg.seeds, "Number of independent runs");
    cmd.add_option("--master-seed", cfg.master_seed, "Master seed for per-run derivation");
    cmd.add_flag("--random-supports", cfg.random_supports, "Sample tail supports uniformly");
    cmd.add_flag("--timings", cfg.timings, "Include wall-clock per run (breaks byte-determinism)");
}

void add_countsketch_options(CLI::App& cmd, adversketch::ExperimentConfig& cfg,
                             std::string& estimator) {
    cmd.add_option("--b", cfg.b, "Number of buckets per row");
    cmd.add_option("--n", cfg.n, "Key universe size");
    cmd.add_option("--a", cfg.a, "Lower reporting threshold (units of sigma)");
    cmd.add_option("--c", cfg.c, "Upper reporting threshold (units of sigma)");
    cmd.add_option("--g", cfg.g, "Guard width (0: g = a)");
    cmd.add_option("--estimator", estimator, "Reporting function")
        ->check(CLI::IsMember({"median_threshold", "trimmed_mean", "random_threshold",
                               "state_flipping"}));
    cmd.add_option("--min-pass-fraction", cfg.min_pass_fraction,
                   "Adversarial-seed fraction required for aggregate pass");
}

int run_and_emit(adversketch::ExperimentConfig& cfg, const std::string& estimator,
                 const OutputOptions& opts) {
    cfg.estimator = adversketch::estimator_kind_from_string(estimator);
    adversketch::RunReport report;
    try {
        report = adversketch::run_experiment(cfg);
    } catch (const adversketch::GateFailure& e) {
        std::cerr << "gate failure: " << e.what() << "\n";
        return kExitGateFailure;
    }
    const auto format = adversketch::report_format_from_string(opts.format);
    const std::string out = resolve_out(opts.out);
    if (out.empty()) {
        adversketch::emit_report(report, format, std::cout);
    } else {
        adversketch::emit_report_file(report, format, out);
        std::cerr << (report.pass ? "pass" : "fail") << ": report written to " << out << "\n";
    }
    return report.pass ? 0 : kExitFail;
}

int run_report_cmd(const std::string& in, const std::string& format) {
    std::ifstream is(in, std::ios::binary);
    if (!is) {
        std::cerr << "cannot open " << in << "\n";
        return kExitFail;
    }
    nlohmann::json doc = nlohmann::json::parse(is);
    if (format == "csv") {
        std::cout << "seed,metric,value\n";
        char buf[64];
        for (const auto& rec : doc.at("seeds")) {
            for (const auto& [name, value] : rec.at("metrics").items()) {
                std::snprintf(buf, sizeof buf, "%.17g", value.get<double>());
                std::cout << rec.at("seed").get<std::uint64_t>() << "," << name << "," << buf << "\n";
            }
        }
    } else {
        std::cout << "mode: " << doc.at("config").at("mode").get<std::string>() << "\n";
        std::cout << "runs: " << doc.at("seeds").size() << "\n";
        for (const auto& [name, value] : doc.at("aggregates").items()) {
            std::cout << name << ": " << value.dump() << "\n";
        }
        std::cout << (doc.at("pass").get<bool>() ? "pass" : "fail") << "\n";
    }
    return doc.at("pass").get<bool>() ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CountSketch/AMS adversarial attack experiment harness"};
    app.require_subcommand(1);

    adversketch::ExperimentConfig cfg;
    std::string estimator = "median_threshold";
    OutputOptions opts;

    auto* hh = app.add_subcommand("attack-hh", "Universal attack on CountSketch heavy hitters");
    add_common_options(*hh, cfg);
    add_countsketch_options(*hh, cfg, estimator);
    add_output_options(*hh, opts);

    auto* ip = app.add_subcommand("attack-ip", "Universal attack via inner-product queries");
    add_common_options(*ip, cfg);
    add_countsketch_options(*ip, cfg, estimator);
    add_output_options(*ip, opts);

    auto* ams = app.add_subcommand("attack-ams", "Attack on the AMS norm estimator");
    add_common_options(*ams, cfg);
    ams->add_option("--n", cfg.n, "Key universe size");
    ams->add_option("--epsilon", cfg.epsilon, "Norm estimator accuracy");
    ams->add_option("--xi", cfg.xi, "Target norm inflation");
    ams->add_option("--tau", cfg.tau, "Norm threshold");
    ams->add_option("--min-pass-fraction", cfg.min_pass_fraction,
                    "Adversarial-seed fraction required for aggregate pass");

    add_output_options(*ams, opts);

    auto* me = app.add_subcommand("mean-est", "Idealized mean-estimation attack");
    add_common_options(*me, cfg);
    me->add_option("--a", cfg.a, "Lower reporting threshold (units of sigma)");
    me->add_option("--c", cfg.c, "Upper reporting threshold (units of sigma)");
    me->add_option("--g", cfg.g, "Guard width (0: g = a)");
    me->add_option("--sigma", cfg.sigma, "Noise scale");
    me->add_option("--estimator", estimator, "Reporting function")
        ->check(CLI::IsMember({"median_threshold", "trimmed_mean", "random_threshold",
                               "state_flipping"}));
    add_output_options(*me, opts);

    auto* verify = app.add_subcommand("verify-estimator", "Correctness gate for a reporting function");
    std::string v_estimator = "median_threshold";
    double v_a = 0.2, v_c = 1.2, v_delta = 0.1, v_sigma = 1.0;
    int v_ell = 9;
    long v_trials = 10000;
    std::uint64_t v_seed = 1;
    verify->add_option("--estimator", v_estimator, "Reporting function")
        ->check(CLI::IsMember({"median_threshold", "trimmed_mean", "random_threshold",
                               "state_flipping"}));
    verify->add_option("--ell", v_ell, "Number of measurements");
    verify->add_option("--a", v_a, "Lower reporting threshold (units of sigma)");
    verify->add_option("--c", v_c, "Upper reporting threshold (units of sigma)");
    verify->add_option("--delta", v_delta, "Allowed error rate");
    verify->add_option("--sigma", v_sigma, "Noise scale");
    verify->add_option("--trials", v_trials, "Monte Carlo trials (>= 1000)");
    verify->add_option("--master-seed", v_seed, "Seed");

    auto* rep = app.add_subcommand("report", "Summarize or convert an existing JSON report");
    std::string rep_in, rep_format = "json";
    rep->add_option("--in", rep_in, "Input JSON report")->required();
    rep->add_option("--format", rep_format, "Output: json summary or csv rows")
        ->check(CLI::IsMember({"json", "csv"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (hh->parsed()) {
            cfg.mode = adversketch::ExperimentMode::countsketch_hh;
            return run_and_emit(cfg, estimator, opts);
        }
        if (ip->parsed()) {
            cfg.mode = adversketch::ExperimentMode::inner_product;
            return run_and_emit(cfg, estimator, opts);
        }
        if (ams->parsed()) {
            cfg.mode = adversketch::ExperimentMode::ams;
            cfg.b = 1;
            return run_and_emit(cfg, estimator, opts);
        }
        if (me->parsed()) {
            cfg.mode = adversketch::ExperimentMode::mean_est;
            if (cfg.seeds == 20) cfg.seeds = 2000;
            return run_and_emit(cfg, estimator, opts);
        }
        if (verify->parsed()) {
            adversketch::CorrectnessParams params{v_delta, v_a, v_c, v_ell, v_sigma};
            auto f = adversketch::make_estimator(
                adversketch::estimator_kind_from_string(v_estimator), params,
                adversketch::derive_seed(v_seed, 7));
            const auto result = adversketch::verify_correctness(*f, params, v_trials, v_seed);
            std::printf("rate_at_c = %.6f (need >= %.6f)\n", result.rate_at_c, 1.0 - v_delta);
            std::printf("rate_at_a = %.6f (need <= %.6f)\n", result.rate_at_a, v_delta);
            std::printf("%s\n", result.pass ? "pass" : "fail");
            return result.pass ? 0 : kExitFail;
        }
        if (rep->parsed()) return run_report_cmd(rep_in, rep_format);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
    return 0;
}
