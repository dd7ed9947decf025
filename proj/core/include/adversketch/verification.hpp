#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "adversketch/attack.hpp"
#include "adversketch/estimators.hpp"
#include "adversketch/sketch.hpp"

namespace adversketch {

/// Bias of a noise vector at a key, against the adversarial threshold.
struct BiasReport {
    double mean_adjusted = 0.0;   ///< (1/ell) sum of adjusted measurements of the key
    double threshold = 0.0;       ///< sqrt(B/b) * ||z||_2
    double norm = 0.0;            ///< ||z||_2
    double predicted_mean = 0.0;  ///< (r/ell) * 2*sigma/(c+a), when config attached
    double predicted_var = 0.0;   ///< (r/ell) * sigma^2, when config attached
    bool adversarial = false;     ///< mean_adjusted >= threshold
};

/// Evaluates the mean adjusted measurement of `heavy_key` on `z` under rho.
/// Pass the attack config to fill in the analytic predictions.
BiasReport bias_under(const SketchRandomness& rho, const SparseVector& z,
                      std::uint64_t heavy_key, double B, const AttackConfig* cfg = nullptr);

struct AmsBiasReport {
    double mean_sq = 0.0;   ///< (1/ell) sum of squared row measurements
    double norm_sq = 0.0;   ///< ||z||_2^2
    double ratio = 0.0;     ///< mean_sq / norm_sq
    double xi_target = 0.0;
    bool adversarial = false;  ///< mean_sq >= (1 + xi) * norm_sq
};

AmsBiasReport ams_bias_under(const SketchRandomness& rho, const SparseVector& z, double xi);

/// Aggregate statistics of repeated idealized attack runs against the
/// analytic expectation and variance window.
struct MeanAttackStats {
    double emp_mean = 0.0;
    double emp_var = 0.0;
    double pred_mean = 0.0;  ///< (r/ell) * 2*sigma/(c-a+2g)
    double var_lo = 0.0;     ///< (r/ell) * sigma^2 * (1 - 2g/(c-a+2g))^2
    double var_hi = 0.0;     ///< (r/ell) * sigma^2
    double sq_norm_lo = 0.0; ///< r*sigma^2 * (1 - 2*sqrt(2/pi)/sqrt(ell))
};

MeanAttackStats mean_attack_stats(std::span<const MeanAttackOutput> runs, const MeanAttackConfig& cfg);

/// Monte Carlo estimate of the reporting-probability gap between positive
/// and negative normalized bias alpha: E_v[pi(v | alpha) - pi(v | -alpha)].
/// Conditioning is exact: an isotropic Gaussian projected to zero mean gives
/// the law of the deviations given the empirical mean.
double gap_estimate(ReportingFunction& p, double alpha, double a, double c, double g,
                    double sigma, int ell, long samples, std::uint64_t seed);

/// log f_{v+alpha*sigma}(u) - log f_{v-alpha*sigma}(u) for the product normal
/// density, computed from the two quadratic forms. Zero (analytically) when
/// mean(u) = v.
double log_density_difference(double v, double alpha, double sigma, std::span<const double> u);

/// Same, but enforces the mean(u) = v precondition.
double symmetry_check(double v, double alpha, double sigma, std::span<const double> u);

}  // namespace adversketch
