#include <doctest.h>

#include <array>
#include <cmath>

#include "adversketch/estimators.hpp"

using namespace adversketch;

namespace {

struct Constant final : ReportingFunction {
    double p;
    explicit Constant(double p_) : p(p_) {}
    double report_probability(std::span<const double>) override { return p; }
};

const CorrectnessParams kDefaults{0.178, 0.2, 1.2, 9, 1.0};

}  // namespace

TEST_CASE("median conventions") {
    const std::array<double, 3> odd{3.0, 1.0, 2.0};
    CHECK(median_of(odd) == 2.0);
    const std::array<double, 4> even{4.0, 1.0, 2.0, 3.0};
    CHECK(median_of(even) == 2.5);
    const std::array<double, 1> one{5.0};
    CHECK(median_of(one) == 5.0);
    CHECK_THROWS_AS(median_of(std::span<const double>{}), std::invalid_argument);
}

TEST_CASE("params validation") {
    CorrectnessParams p = kDefaults;
    p.a = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = kDefaults;
    p.c = p.a;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = kDefaults;
    p.delta = 0.6;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    CHECK(kDefaults.theta() == doctest::Approx(0.7));
}

TEST_CASE("median threshold reports on the absolute median") {
    auto f = median_threshold_estimator(kDefaults);
    const std::array<double, 3> high{0.9, 0.8, 0.1};
    const std::array<double, 3> low{0.6, 0.5, 0.9};
    const std::array<double, 3> negative{-0.9, -0.8, -0.1};
    CorrectnessParams p3 = kDefaults;
    p3.ell = 3;
    auto f3 = make_estimator(EstimatorKind::median_threshold, p3, 0);
    CHECK(f3->report_probability(high) == 1.0);
    CHECK(f3->report_probability(low) == 0.0);
    CHECK(f3->report_probability(negative) == 1.0);
    (void)f;
}

TEST_CASE("kind string round trip") {
    for (auto kind : {EstimatorKind::median_threshold, EstimatorKind::trimmed_mean,
                      EstimatorKind::random_threshold, EstimatorKind::state_flipping}) {
        CHECK(estimator_kind_from_string(to_string(kind)) == kind);
    }
    CHECK_THROWS_AS(estimator_kind_from_string("mean"), std::invalid_argument);
}

TEST_CASE("verify_correctness rejects constant responders") {
    Constant one(1.0);
    Constant zero(0.0);
    CHECK(!verify_correctness(one, kDefaults, 2000).pass);
    CHECK(!verify_correctness(zero, kDefaults, 2000).pass);
    CHECK_THROWS_AS(verify_correctness(one, kDefaults, 999), std::invalid_argument);
}

TEST_CASE("median threshold rates match the analytic oracle") {
    // Exact values for l=9, theta=0.7: P(|median| >= theta) at v = 1.2 and
    // v = 0.2 is 0.89039 and 0.12336 (binomial over per-sample tail mass).
    auto f = make_estimator(EstimatorKind::median_threshold, kDefaults, 0);
    const CorrectnessReport rep = verify_correctness(*f, kDefaults, 200000, 31337);
    CHECK(rep.rate_at_c == doctest::Approx(0.89039).epsilon(0.012));
    CHECK(rep.rate_at_a == doctest::Approx(0.12336).epsilon(0.05));
    CHECK(rep.pass);
}

TEST_CASE("all estimator kinds pass the correctness gate at defaults") {
    for (auto kind : {EstimatorKind::median_threshold, EstimatorKind::trimmed_mean,
                      EstimatorKind::random_threshold, EstimatorKind::state_flipping}) {
        auto f = make_estimator(kind, kDefaults, 4242);
        const CorrectnessReport rep = verify_correctness(*f, kDefaults, 20000, 55);
        INFO(to_string(kind), " rate_at_c=", rep.rate_at_c, " rate_at_a=", rep.rate_at_a);
        CHECK(rep.pass);
    }
}

TEST_CASE("norm estimator thresholds the mean of squares") {
    auto f = norm_estimator(2.0, 0.5);
    // threshold = (1 + 0.25) * 4 = 5
    const std::array<double, 2> above{3.0, 1.0};  // mean sq = 5
    const std::array<double, 2> below{2.0, 1.0};  // mean sq = 2.5
    CHECK(f->decide(above) == 1);
    CHECK(f->decide(below) == -1);
    CHECK_THROWS_AS(norm_estimator(0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(norm_estimator(1.0, 0.0), std::invalid_argument);
}
