#include <doctest.h>

#include <cmath>

#include "adversketch/verification.hpp"

using namespace adversketch;

namespace {

struct Constant final : ReportingFunction {
    double p;
    explicit Constant(double p_) : p(p_) {}
    double report_probability(std::span<const double>) override { return p; }
};

}  // namespace

TEST_CASE("bias report matches a brute-force evaluation") {
    const SketchParams params{1 << 12, 4, 8};
    const SketchRandomness rho(params, 17);
    SparseVector z;
    Rng rng(3);
    for (int i = 0; i < 30; ++i) z.set(rng.below(params.n), rng.rademacher());
    const std::uint64_t key = 4000;
    REQUIRE(!z.contains(key));

    const BiasReport rep = bias_under(rho, z, key, 4.0);
    double expected = 0.0;
    for (int j = 0; j < params.ell; ++j) {
        double bucket_sum = 0.0;
        for (const auto& [k, v] : z) {
            if (rho.bucket(j, k) == rho.bucket(j, key)) bucket_sum += rho.sign(j, k) * v;
        }
        expected += bucket_sum * rho.sign(j, key);
    }
    expected /= params.ell;
    CHECK(rep.mean_adjusted == doctest::Approx(expected).epsilon(1e-12));
    CHECK(rep.norm == doctest::Approx(z.l2_norm()).epsilon(1e-12));
    CHECK(rep.threshold == doctest::Approx(std::sqrt(4.0 / 8.0) * z.l2_norm()).epsilon(1e-12));
    CHECK(rep.adversarial == (rep.mean_adjusted >= rep.threshold));

    SparseVector bad = z;
    bad.set(key, 1.0);
    CHECK_THROWS_AS(bias_under(rho, bad, key, 4.0), std::invalid_argument);
}

TEST_CASE("bias report carries predictions when the config is attached") {
    const SketchParams params{1 << 12, 4, 8};
    const SketchRandomness rho(params, 17);
    AttackConfig cfg{params, 64, 32, 0.2, 1.2, 0.2, 1e-3, 1};
    SparseVector z;
    z.set(1, 1.0);
    const BiasReport rep = bias_under(rho, z, 2, 4.0, &cfg);
    const double sigma = std::sqrt(32.0 / 8.0);
    CHECK(rep.predicted_mean == doctest::Approx(16.0 * 2.0 * sigma / 1.4).epsilon(1e-12));
    CHECK(rep.predicted_var == doctest::Approx(16.0 * sigma * sigma).epsilon(1e-12));
}

TEST_CASE("ams bias of a single-key vector has ratio one") {
    const SketchParams params{100, 8, 1};
    const SketchRandomness rho(params, 23);
    SparseVector z;
    z.set(5, 2.0);
    const AmsBiasReport rep = ams_bias_under(rho, z, 0.5);
    CHECK(rep.norm_sq == doctest::Approx(4.0));
    CHECK(rep.mean_sq == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(rep.ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(!rep.adversarial);

    const SketchParams wide{100, 8, 4};
    CHECK_THROWS_AS(ams_bias_under(SketchRandomness(wide, 1), z, 0.5), std::domain_error);
}

TEST_CASE("mean attack statistics") {
    MeanAttackConfig cfg{0.3, 1.3, 0.3, 1.0, 9, 500, 0};
    std::vector<MeanAttackOutput> runs(120);
    for (std::size_t i = 0; i < runs.size(); ++i) {
        // attack_mean alternates between 10 and 14: mean 12, variance 4
        runs[i].attack_vector.assign(9, i % 2 == 0 ? 10.0 : 14.0);
    }
    const MeanAttackStats st = mean_attack_stats(runs, cfg);
    CHECK(st.emp_mean == doctest::Approx(12.0));
    CHECK(st.emp_var == doctest::Approx(4.0));
    const double width = 1.3 - 0.3 + 0.6;
    CHECK(st.pred_mean == doctest::Approx(500.0 / 9.0 * 2.0 / width));
    CHECK(st.var_hi == doctest::Approx(500.0 / 9.0));
    CHECK(st.var_lo == doctest::Approx(500.0 / 9.0 * std::pow(1.0 - 0.6 / width, 2)));
    CHECK(st.sq_norm_lo ==
          doctest::Approx(500.0 * (1.0 - 2.0 * std::sqrt(2.0 / M_PI) / 3.0)));

    runs.resize(99);
    CHECK_THROWS_AS(mean_attack_stats(runs, cfg), std::invalid_argument);
}

TEST_CASE("log density difference is exact") {
    // u_j = v + beta for all j gives difference 2 * ell * alpha * beta / sigma
    const double v = 0.7, alpha = 0.25, sigma = 1.5, beta = 0.4;
    std::vector<double> u(6, v + beta);
    CHECK(log_density_difference(v, alpha, sigma, u) ==
          doctest::Approx(2.0 * 6.0 * alpha * beta / sigma).epsilon(1e-12));
}

TEST_CASE("symmetry check enforces the centering precondition") {
    Rng rng(8);
    const double v = 1.1, alpha = 0.2, sigma = 0.9;
    std::vector<double> u(9);
    double mean = 0.0;
    for (auto& x : u) {
        x = rng.normal(v, sigma);
        mean += x;
    }
    mean /= static_cast<double>(u.size());
    CHECK_THROWS_AS(symmetry_check(v, alpha, sigma, u), std::invalid_argument);
    for (auto& x : u) x += v - mean;
    CHECK(std::abs(symmetry_check(v, alpha, sigma, u)) <= 1e-9);
}

TEST_CASE("gap estimate input validation") {
    Constant half(0.5);
    CHECK_THROWS_AS(gap_estimate(half, 0.4, 0.3, 1.3, 0.3, 1.0, 9, 200000, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(gap_estimate(half, 0.2, 0.3, 1.3, 0.3, 1.0, 9, 999, 1),
                    std::invalid_argument);
    // a constant responder has zero gap
    CHECK(gap_estimate(half, 0.2, 0.3, 1.3, 0.3, 1.0, 9, 100000, 1) == 0.0);
}

TEST_CASE("gap estimate tracks the analytic prediction for the median rule") {
    const double a = 0.3, c = 1.3, g = 0.3, sigma = 1.0, alpha = 0.2;
    CorrectnessParams params{0.178, a, c, 9, sigma};
    auto f = median_threshold_estimator(params);
    const double gap = gap_estimate(*f, alpha, a, c, g, sigma, 9, 200000, 99);
    const double predicted = 2.0 * alpha / (c - a + 2.0 * g);
    CHECK(gap == doctest::Approx(predicted).epsilon(0.3));
}
