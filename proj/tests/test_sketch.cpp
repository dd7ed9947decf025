#include <doctest.h>

#include <cmath>

#include "adversketch/sketch.hpp"

using namespace adversketch;

namespace {

SparseVector random_vector(Rng& rng, std::uint64_t n, int support) {
    SparseVector v;
    while (static_cast<int>(v.support_size()) < support) {
        v.set(rng.below(n), rng.uniform(-2.0, 2.0));
    }
    return v;
}

}  // namespace

TEST_CASE("sparse vector drops explicit zeros") {
    SparseVector v;
    v.set(3, 1.5);
    v.set(3, 0.0);
    CHECK(!v.contains(3));
    v.add(7, 2.0);
    v.add(7, -2.0);
    CHECK(v.empty());
    v.set(1, 3.0);
    v.set(2, -4.0);
    CHECK(v.squared_norm() == doctest::Approx(25.0));
    CHECK(v.l2_norm() == doctest::Approx(5.0));
    CHECK(v.l1_norm() == doctest::Approx(7.0));
}

TEST_CASE("params validation") {
    CHECK_THROWS_AS((SketchParams{0, 3, 4}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((SketchParams{10, 0, 4}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((SketchParams{10, 3, 0}.validate()), std::invalid_argument);
    SketchParams p{100, 3, 4};
    CHECK(p.measurements() == 12);
}

TEST_CASE("sketch is linear") {
    const SketchParams params{1 << 20, 5, 16};
    const SketchRandomness rho = new_randomness(params, 11);
    Rng rng(42);
    const SparseVector x = random_vector(rng, params.n, 40);
    const SparseVector y = random_vector(rng, params.n, 25);

    SparseVector combined;
    for (const auto& [k, v] : x) combined.add(k, 3.0 * v);
    for (const auto& [k, v] : y) combined.add(k, -2.0 * v);

    SketchMatrix sk = sketch(rho, x);
    for (int j = 0; j < params.ell; ++j) {
        for (int k = 0; k < params.b; ++k) sk.at(j, k) *= 3.0;
    }
    add_scaled(sk, rho, y, -2.0);

    const SketchMatrix direct = sketch(rho, combined);
    for (int j = 0; j < params.ell; ++j) {
        for (int k = 0; k < params.b; ++k) {
            CHECK(sk.at(j, k) == doctest::Approx(direct.at(j, k)).epsilon(1e-12));
        }
    }
}

TEST_CASE("adjusted measurements of a unit vector are all ones") {
    const SketchParams params{1000, 7, 8};
    const SketchRandomness rho = new_randomness(params, 5);
    const SketchMatrix sk = sketch(rho, SparseVector::unit(123));
    for (double x : adjusted_measurements(rho, sk, 123)) CHECK(x == 1.0);
}

TEST_CASE("direct adjusted measurements match the matrix route") {
    const SketchParams params{1 << 16, 6, 32};
    const SketchRandomness rho = new_randomness(params, 77);
    Rng rng(7);
    const SparseVector v = random_vector(rng, params.n, 200);
    const SketchMatrix sk = sketch(rho, v);
    for (std::uint64_t key : {std::uint64_t{0}, std::uint64_t{999}, v.begin()->first}) {
        const auto a = adjusted_measurements(rho, sk, key);
        const auto b = adjusted_measurements_direct(rho, v, key);
        REQUIRE(a.size() == b.size());
        for (std::size_t j = 0; j < a.size(); ++j) CHECK(a[j] == doctest::Approx(b[j]).epsilon(1e-12));
    }
}

TEST_CASE("keys outside the universe are rejected") {
    const SketchParams params{100, 2, 4};
    const SketchRandomness rho = new_randomness(params, 1);
    SparseVector v;
    v.set(100, 1.0);
    CHECK_THROWS_AS(sketch(rho, v), std::out_of_range);
    const SketchMatrix sk = sketch(rho, SparseVector::unit(3));
    CHECK_THROWS_AS(adjusted_measurements(rho, sk, 200), std::out_of_range);
    CHECK_THROWS_AS(adjusted_measurements_direct(rho, SparseVector::unit(3), 200), std::out_of_range);
}

TEST_CASE("adjusted measurement is an unbiased estimate") {
    const SketchParams params{1 << 16, 1, 8};
    Rng rng(123);
    SparseVector v = random_vector(rng, params.n, 50);
    const std::uint64_t key = v.begin()->first;
    const double truth = v.value(key);
    double acc = 0.0;
    const int reps = 20000;
    for (int s = 0; s < reps; ++s) {
        const SketchRandomness rho = new_randomness(params, 1000 + static_cast<std::uint64_t>(s));
        acc += adjusted_measurements_direct(rho, v, key)[0];
    }
    // sd of the mean ~ ||v||/sqrt(b*reps) ~ 0.02; allow 5 sigma
    CHECK(std::abs(acc / reps - truth) < 0.1);
}

TEST_CASE("bucket and sign hashes are uniform and deterministic") {
    const SketchParams params{1 << 20, 2, 8};
    const SketchRandomness rho = new_randomness(params, 99);
    const SketchRandomness rho2 = new_randomness(params, 99);
    const int keys = 80000;
    std::vector<int> counts(8, 0);
    int plus = 0;
    for (std::uint64_t k = 0; k < keys; ++k) {
        const int bucket = rho.bucket(0, k);
        REQUIRE(bucket >= 0);
        REQUIRE(bucket < 8);
        CHECK(bucket == rho2.bucket(0, k));
        ++counts[static_cast<std::size_t>(bucket)];
        if (rho.sign(1, k) > 0) ++plus;
        CHECK(std::abs(rho.sign(1, k)) == 1.0);
    }
    // per-bucket sd ~ sqrt(keys * (1/8)(7/8)) ~ 93.5; allow 5 sigma
    for (int c : counts) CHECK(std::abs(c - keys / 8) < 470);
    CHECK(std::abs(plus - keys / 2) < 700);
    const SketchRandomness other = new_randomness(params, 100);
    int agree = 0;
    for (std::uint64_t k = 0; k < 1000; ++k) {
        if (other.bucket(0, k) == rho.bucket(0, k)) ++agree;
    }
    CHECK(agree < 250);
}

TEST_CASE("inner product estimates are per-row dot products") {
    const SketchParams params{1 << 12, 4, 16};
    const SketchRandomness rho = new_randomness(params, 3);
    Rng rng(9);
    const SparseVector x = random_vector(rng, params.n, 30);
    const SketchMatrix sx = sketch(rho, x);
    // <sketch(x), sketch(e_k)> row j equals the adjusted measurement of k.
    const std::uint64_t key = x.begin()->first;
    const SketchMatrix se = sketch(rho, SparseVector::unit(key));
    const auto ip = inner_product_estimates(sx, se);
    const auto adj = adjusted_measurements(rho, sx, key);
    for (std::size_t j = 0; j < ip.size(); ++j) CHECK(ip[j] == doctest::Approx(adj[j]).epsilon(1e-12));

    const SketchMatrix wrong{SketchParams{100, 4, 8}};
    CHECK_THROWS_AS(inner_product_estimates(sx, wrong), std::invalid_argument);
}

TEST_CASE("ams row norms require b = 1") {
    const SketchParams wide{100, 3, 4};
    CHECK_THROWS_AS(ams_row_norms(SketchMatrix{wide}), std::domain_error);

    const SketchParams params{1 << 12, 64, 1};
    const SketchRandomness rho = new_randomness(params, 21);
    SparseVector v;
    v.set(1, 3.0);
    v.set(2, 4.0);
    const auto norms = ams_row_norms(sketch(rho, v));
    double acc = 0.0;
    for (double x : norms) {
        // each row measurement is +-3 +- 4, so the square is 1 or 49
        CHECK((std::abs(x - 1.0) < 1e-12 || std::abs(x - 49.0) < 1e-12));
        acc += x;
    }
    // mean over rows estimates ||v||^2 = 25 with sd 24/8 = 3
    CHECK(std::abs(acc / params.ell - 25.0) < 15.0);
}
