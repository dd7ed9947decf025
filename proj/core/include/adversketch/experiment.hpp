#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "adversketch/attack.hpp"
#include "adversketch/verification.hpp"

namespace adversketch {

enum class ExperimentMode { countsketch_hh, inner_product, mean_est, ams };

const char* to_string(ExperimentMode mode);
ExperimentMode experiment_mode_from_string(const std::string& name);

/// Thrown when the configured estimator fails the pre-run correctness gate.
struct GateFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    ExperimentMode mode = ExperimentMode::countsketch_hh;

    // Sketch geometry.
    int ell = 9;
    int b = 32;
    std::uint64_t n = 1ull << 40;

    // Attack size: r taken from B * ell^2 when r == 0.
    int r = 0;
    double B = 4.0;
    std::uint64_t m = 0;  ///< 0 selects the default 256*b (countsketch) / 256 (ams)

    // Thresholds. g == 0 selects g = a.
    double a = 0.2;
    double c = 1.2;
    double g = 0.0;
    double delta2 = 1e-3;

    // AMS parameters.
    double epsilon = 0.5;
    double xi = 0.5;
    double tau = 1.0;

    // Idealized mean-estimation attack.
    double sigma = 1.0;

    EstimatorKind estimator = EstimatorKind::median_threshold;

    int seeds = 20;  ///< independent runs (repetitions for mean_est)
    std::uint64_t master_seed = 1;

    double min_pass_fraction = 0.8;  ///< adversarial-seed fraction for aggregate pass
    bool random_supports = false;
    bool timings = false;  ///< include wall-clock (breaks byte-determinism)

    void validate() const;
    int resolved_r() const;
    std::uint64_t resolved_m() const;
    double resolved_g() const;
};

struct SeedRecord {
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, double>> metrics;
    double wall_seconds = 0.0;
};

struct RunReport {
    ExperimentConfig config;
    std::vector<SeedRecord> records;
    std::vector<std::pair<std::string, double>> aggregates;
    bool pass = false;
};

/// Runs the configured attack + verification over the seed grid (seeds are
/// derived from the master seed, dispatched to a worker pool) and aggregates
/// the per-seed reports.
RunReport run_experiment(const ExperimentConfig& cfg);

enum class ReportFormat { json, csv };
ReportFormat report_format_from_string(const std::string& name);

/// Deterministic serialization; doubles carry 17 significant digits.
std::string report_to_json(const RunReport& report);
/// One row per (seed, metric) with a header line.
std::string report_to_csv(const RunReport& report);

void emit_report(const RunReport& report, ReportFormat format, std::ostream& os);
void emit_report_file(const RunReport& report, ReportFormat format, const std::string& path);

}  // namespace adversketch
