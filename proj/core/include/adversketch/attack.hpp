#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "adversketch/estimators.hpp"
#include "adversketch/sketch.hpp"

namespace adversketch {

/// Heavy key plus r disjoint-support +-1 tail vectors of support size m.
struct TailSet {
    std::uint64_t heavy_key = 0;
    std::uint64_t support_size = 0;  ///< m, per tail
    std::vector<SparseVector> tails;
};

/// Draws the heavy key and r Rademacher tails with pairwise-disjoint
/// supports that exclude the heavy key.
///
/// By default tail t occupies a consecutive key block after the heavy key
/// (equivalent in distribution under per-key hashing, O(1) bookkeeping);
/// random_supports restores the literal random-subset sampling.
TailSet attack_tails(std::uint64_t n, std::uint64_t m, int r, std::uint64_t seed,
                     bool random_supports = false);

struct AttackConfig {
    SketchParams params;
    int r = 0;           ///< query count
    std::uint64_t m = 0; ///< tail support size
    double a = 0.0;      ///< lower threshold
    double c = 0.0;      ///< upper threshold
    double g = 0.0;      ///< guard width extending the value interval
    double delta2 = 1e-3;
    std::uint64_t seed = 0;
    bool random_supports = false;

    double sigma() const;
    void validate() const;
};

struct QueryRecord {
    double heavy_value = 0.0;  ///< v_h for this query
    int report = 0;            ///< +-1: whether the heavy key was reported
};

struct AttackTrace {
    std::uint64_t heavy_key = 0;
    std::vector<QueryRecord> queries;
    SparseVector adversarial;  ///< signed sum of the tails
};

/// Chooses the estimator used at each step; may return the same instance
/// every time or switch between steps.
using ResponderChooser = std::function<ReportingFunction&(int step)>;
using NormResponderChooser = std::function<NormEstimator&(int step)>;

/// How the report bit is obtained from the sketch; both routes see exactly
/// the same per-query values.
enum class QueryRoute {
    heavy_hitter,   ///< adjusted measurements of the heavy key
    inner_product,  ///< per-row inner-product estimates against e_h
};

/// The query loop against CountSketch: draws v_h ~ U[a*sigma, (c+2g)*sigma],
/// sketches v_h*e_h + z^(t) under rho, hands the ell relevant values to the
/// responder, and signs each tail by whether the heavy key was reported.
/// Queries are a function of cfg.seed alone; the attacker never reads rho.
///
/// With gate=true the step-0 reporting function must first pass the
/// correctness check at (delta2^(1/4), a, c).
AttackTrace universal_attack(const SketchRandomness& rho, const ResponderChooser& responder,
                             const AttackConfig& cfg, bool gate = true,
                             QueryRoute route = QueryRoute::heavy_hitter);

/// The idealized interaction: Gaussian samples replace sketch measurements.
struct MeanAttackConfig {
    double a = 0.0, c = 0.0, g = 0.0, sigma = 0.0;
    int ell = 0;
    int r = 0;
    std::uint64_t seed = 0;

    void validate() const;
    /// Guard condition sqrt(ell/2pi)*exp(-ell*g^2/2) vs 1/(c-a+2g); reported
    /// as a diagnostic (desk-scale configs routinely violate it yet track the
    /// predictions well).
    double guard_condition_ratio() const;
};

struct MeanAttackStep {
    double v = 0.0;                ///< drawn query value
    int report = 0;                ///< +-1
    double normalized_bias = 0.0;  ///< (mean(u) - v) / sigma
};

struct MeanAttackOutput {
    std::vector<double> attack_vector;  ///< sum of report * noise, length ell
    std::vector<MeanAttackStep> steps;

    double attack_mean() const;  ///< mean entry of attack_vector
};

MeanAttackOutput mean_est_attack(const ResponderChooser& responder, const MeanAttackConfig& cfg);

struct AmsAttackConfig {
    SketchParams params;  ///< must have b = 1
    double tau = 0.0;
    double epsilon = 0.0;
    int r = 0;
    std::uint64_t m = 0;
    std::uint64_t seed = 0;
    bool random_supports = false;

    void validate() const;
    double sigma() const;  ///< tau / sqrt(2)
    double a() const { return 1.0; }
    double c() const;      ///< sqrt(1 + 2*epsilon)
    double g() const;      ///< min(a, ln(sqrt(ell/epsilon)) / sqrt(ell))
};

/// Same query loop against the AMS sketch, with tails rescaled to l2 norm
/// sigma and the report bit taken from a one-bit norm estimator.
AttackTrace ams_attack(const SketchRandomness& rho, const NormResponderChooser& responder,
                       const AmsAttackConfig& cfg);

}  // namespace adversketch
