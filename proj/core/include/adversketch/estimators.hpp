#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "adversketch/rng.hpp"

namespace adversketch {

/// Correctness band for reporting functions: report with probability
/// >= 1-delta above c*sigma and <= delta below a*sigma.
struct CorrectnessParams {
    double delta = 0.0;
    double a = 0.0;  ///< lower normalized threshold
    double c = 0.0;  ///< upper normalized threshold
    int ell = 0;
    double sigma = 0.0;

    double theta() const { return 0.5 * (a + c); }

    void validate() const {
        if (!(a > 0.0 && a < c)) throw std::invalid_argument("CorrectnessParams: need 0 < a < c");
        if (!(delta > 0.0 && delta < 0.5)) throw std::invalid_argument("CorrectnessParams: need 0 < delta < 1/2");
        if (!(sigma > 0.0)) throw std::invalid_argument("CorrectnessParams: need sigma > 0");
        if (ell < 1) throw std::invalid_argument("CorrectnessParams: need ell >= 1");
    }
};

/// A heavy-hitter estimator reduced to its reporting function: maps the ell
/// adjusted measurements of the queried key to a reporting probability.
/// Implementations may keep state across queries (updated only from what
/// they have already seen).
class ReportingFunction {
public:
    virtual ~ReportingFunction() = default;
    virtual double report_probability(std::span<const double> adjusted) = 0;
};

/// Median of the values; mean of the two central order statistics for even
/// length.
double median_of(std::span<const double> values);

/// p(u) = 1 iff |median(u)| >= theta * sigma with theta = (a+c)/2.
std::unique_ptr<ReportingFunction> median_threshold_estimator(const CorrectnessParams& params);

enum class EstimatorKind {
    median_threshold,
    trimmed_mean,
    random_threshold,
    state_flipping,
};

const char* to_string(EstimatorKind kind);
EstimatorKind estimator_kind_from_string(const std::string& name);

/// Correct-by-construction alternatives to the median estimator, for
/// exercising attack universality.
std::unique_ptr<ReportingFunction> make_estimator(EstimatorKind kind,
                                                  const CorrectnessParams& params,
                                                  std::uint64_t seed);

struct CorrectnessReport {
    double rate_at_c = 0.0;
    double rate_at_a = 0.0;
    bool pass = false;
};

/// Monte Carlo check of the correctness band: draws u ~ Normal_ell(v, sigma^2)
/// at v = c*sigma and v = a*sigma; pass iff the rates satisfy the band up to
/// three binomial standard errors.
CorrectnessReport verify_correctness(ReportingFunction& f, const CorrectnessParams& params,
                                     int trials, std::uint64_t seed = 0x5eedull);

/// One-bit norm estimator over the ell AMS row measurements.
class NormEstimator {
public:
    virtual ~NormEstimator() = default;
    /// +1 iff the norm-squared estimate clears the threshold.
    virtual int decide(std::span<const double> row_values) = 0;
};

enum class NormEstimatorMode { mean_of_squares };

/// Reports +1 iff mean of squared row values >= (1 + epsilon/2) * tau^2,
/// the midpoint between tau^2 and (1+epsilon)*tau^2.
std::unique_ptr<NormEstimator> norm_estimator(double tau, double epsilon,
                                              NormEstimatorMode mode = NormEstimatorMode::mean_of_squares);

}  // namespace adversketch
