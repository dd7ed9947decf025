#include "adversketch/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace adversketch {

double median_of(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("median_of: empty input");
    std::vector<double> v(values.begin(), values.end());
    const std::size_t n = v.size();
    const std::size_t mid = n / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    if (n % 2 == 1) return v[mid];
    const double hi = v[mid];
    const double lo = *std::max_element(v.begin(), v.begin() + mid);
    return 0.5 * (lo + hi);
}

namespace {

double trimmed_mean_of(std::span<const double> values, double trim_fraction) {
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const auto cut = static_cast<std::size_t>(trim_fraction * static_cast<double>(v.size()));
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t i = cut; i + cut < v.size(); ++i) {
        acc += v[i];
        ++count;
    }
    return acc / static_cast<double>(count);
}

double mean_of(std::span<const double> values) {
    double acc = 0.0;
    for (double x : values) acc += x;
    return acc / static_cast<double>(values.size());
}

class MedianThreshold final : public ReportingFunction {
public:
    explicit MedianThreshold(const CorrectnessParams& p) : threshold_(p.theta() * p.sigma) {}
    double report_probability(std::span<const double> adjusted) override {
        return std::abs(median_of(adjusted)) >= threshold_ ? 1.0 : 0.0;
    }

private:
    double threshold_;
};

class TrimmedMeanThreshold final : public ReportingFunction {
public:
    explicit TrimmedMeanThreshold(const CorrectnessParams& p) : threshold_(p.theta() * p.sigma) {}
    double report_probability(std::span<const double> adjusted) override {
        return std::abs(trimmed_mean_of(adjusted, 0.2)) >= threshold_ ? 1.0 : 0.0;
    }

private:
    double threshold_;
};

// Thresholds the plain mean against a threshold redrawn per query from the
// interior of the [a, c] band.
class RandomThreshold final : public ReportingFunction {
public:
    RandomThreshold(const CorrectnessParams& p, std::uint64_t seed)
        : lo_((p.a + 0.1 * (p.c - p.a)) * p.sigma),
          hi_((p.c - 0.1 * (p.c - p.a)) * p.sigma),
          rng_(seed) {}
    double report_probability(std::span<const double> adjusted) override {
        const double threshold = rng_.uniform(lo_, hi_);
        return std::abs(mean_of(adjusted)) >= threshold ? 1.0 : 0.0;
    }

private:
    double lo_, hi_;
    Rng rng_;
};

// Alternates between two correct rules based on query parity.
class StateFlipping final : public ReportingFunction {
public:
    explicit StateFlipping(const CorrectnessParams& p) : threshold_(p.theta() * p.sigma) {}
    double report_probability(std::span<const double> adjusted) override {
        const bool odd = (queries_seen_++ % 2) != 0;
        const double stat = odd ? trimmed_mean_of(adjusted, 0.2) : median_of(adjusted);
        return std::abs(stat) >= threshold_ ? 1.0 : 0.0;
    }

private:
    double threshold_;
    std::uint64_t queries_seen_ = 0;
};

}  // namespace

std::unique_ptr<ReportingFunction> median_threshold_estimator(const CorrectnessParams& params) {
    params.validate();
    return std::make_unique<MedianThreshold>(params);
}

const char* to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::median_threshold: return "median_threshold";
        case EstimatorKind::trimmed_mean: return "trimmed_mean";
        case EstimatorKind::random_threshold: return "random_threshold";
        case EstimatorKind::state_flipping: return "state_flipping";
    }
    throw std::invalid_argument("unknown EstimatorKind");
}

EstimatorKind estimator_kind_from_string(const std::string& name) {
    if (name == "median_threshold") return EstimatorKind::median_threshold;
    if (name == "trimmed_mean") return EstimatorKind::trimmed_mean;
    if (name == "random_threshold") return EstimatorKind::random_threshold;
    if (name == "state_flipping") return EstimatorKind::state_flipping;
    throw std::invalid_argument("unknown estimator kind: " + name);
}

std::unique_ptr<ReportingFunction> make_estimator(EstimatorKind kind,
                                                  const CorrectnessParams& params,
                                                  std::uint64_t seed) {
    params.validate();
    switch (kind) {
        case EstimatorKind::median_threshold: return std::make_unique<MedianThreshold>(params);
        case EstimatorKind::trimmed_mean: return std::make_unique<TrimmedMeanThreshold>(params);
        case EstimatorKind::random_threshold: return std::make_unique<RandomThreshold>(params, seed);
        case EstimatorKind::state_flipping: return std::make_unique<StateFlipping>(params);
    }
    throw std::invalid_argument("unknown EstimatorKind");
}

CorrectnessReport verify_correctness(ReportingFunction& f, const CorrectnessParams& params,
                                     int trials, std::uint64_t seed) {
    params.validate();
    if (trials < 1000) throw std::invalid_argument("verify_correctness: trials must be >= 1000");
    Rng rng(seed);
    std::vector<double> u(static_cast<std::size_t>(params.ell));
    double sum_c = 0.0, sum_a = 0.0;
    for (int t = 0; t < trials; ++t) {
        for (auto& x : u) x = rng.normal(params.c * params.sigma, params.sigma);
        sum_c += f.report_probability(u);
        for (auto& x : u) x = rng.normal(params.a * params.sigma, params.sigma);
        sum_a += f.report_probability(u);
    }
    CorrectnessReport rep;
    rep.rate_at_c = sum_c / trials;
    rep.rate_at_a = sum_a / trials;
    const auto stderr_of = [trials](double rate) {
        return std::sqrt(rate * (1.0 - rate) / trials);
    };
    rep.pass = rep.rate_at_c >= 1.0 - params.delta - 3.0 * stderr_of(rep.rate_at_c) &&
               rep.rate_at_a <= params.delta + 3.0 * stderr_of(rep.rate_at_a);
    return rep;
}

namespace {
class MeanOfSquares final : public NormEstimator {
public:
    MeanOfSquares(double tau, double epsilon) : threshold_((1.0 + epsilon / 2.0) * tau * tau) {}
    int decide(std::span<const double> row_values) override {
        double acc = 0.0;
        for (double x : row_values) acc += x * x;
        return acc / static_cast<double>(row_values.size()) >= threshold_ ? 1 : -1;
    }

private:
    double threshold_;
};
}  // namespace

std::unique_ptr<NormEstimator> norm_estimator(double tau, double epsilon, NormEstimatorMode mode) {
    if (!(tau > 0.0)) throw std::invalid_argument("norm_estimator: tau must be > 0");
    if (!(epsilon > 0.0)) throw std::invalid_argument("norm_estimator: epsilon must be > 0");
    switch (mode) {
        case NormEstimatorMode::mean_of_squares: return std::make_unique<MeanOfSquares>(tau, epsilon);
    }
    throw std::invalid_argument("unknown NormEstimatorMode");
}

}  // namespace adversketch
