#include "adversketch/sketch.hpp"

#include <cmath>

namespace adversketch {

double SparseVector::l2_norm() const { return std::sqrt(squared_norm()); }

SketchRandomness new_randomness(SketchParams params, std::uint64_t seed) {
    return SketchRandomness(params, seed);
}

namespace {
void check_key(const SketchParams& p, std::uint64_t key) {
    if (key >= p.n) throw std::out_of_range("key outside [n)");
}
}  // namespace

SketchMatrix sketch(const SketchRandomness& rho, const SparseVector& v) {
    const SketchParams& p = rho.params();
    SketchMatrix sk(p);
    for (const auto& [key, value] : v) {
        check_key(p, key);
        for (int j = 0; j < p.ell; ++j) {
            sk.at(j, rho.bucket(j, key)) += rho.sign(j, key) * value;
        }
    }
    return sk;
}

SketchMatrix& add_scaled(SketchMatrix& sk, const SketchRandomness& rho,
                         const SparseVector& v, double alpha) {
    const SketchParams& p = rho.params();
    if (!SketchMatrix(p).same_shape(sk)) throw std::invalid_argument("add_scaled: shape mismatch");
    for (const auto& [key, value] : v) {
        check_key(p, key);
        for (int j = 0; j < p.ell; ++j) {
            sk.at(j, rho.bucket(j, key)) += rho.sign(j, key) * alpha * value;
        }
    }
    return sk;
}

std::vector<double> adjusted_measurements(const SketchRandomness& rho,
                                          const SketchMatrix& sk, std::uint64_t key) {
    const SketchParams& p = rho.params();
    check_key(p, key);
    std::vector<double> out(static_cast<std::size_t>(p.ell));
    for (int j = 0; j < p.ell; ++j) {
        out[j] = sk.at(j, rho.bucket(j, key)) * rho.sign(j, key);
    }
    return out;
}

std::vector<double> adjusted_measurements_direct(const SketchRandomness& rho,
                                                 const SparseVector& v,
                                                 std::uint64_t key) {
    const SketchParams& p = rho.params();
    check_key(p, key);
    std::vector<double> out(static_cast<std::size_t>(p.ell), 0.0);
    for (int j = 0; j < p.ell; ++j) {
        const int kb = rho.bucket(j, key);
        double acc = 0.0;
        for (const auto& [i, value] : v) {
            if (rho.bucket(j, i) == kb) acc += rho.sign(j, i) * value;
        }
        out[j] = acc * rho.sign(j, key);
    }
    return out;
}

std::vector<double> inner_product_estimates(const SketchMatrix& sx, const SketchMatrix& sy) {
    if (!sx.same_shape(sy)) throw std::invalid_argument("inner_product_estimates: shape mismatch");
    const SketchParams& p = sx.params();
    std::vector<double> out(static_cast<std::size_t>(p.ell), 0.0);
    for (int j = 0; j < p.ell; ++j) {
        double acc = 0.0;
        for (int k = 0; k < p.b; ++k) acc += sx.at(j, k) * sy.at(j, k);
        out[j] = acc;
    }
    return out;
}

std::vector<double> ams_row_norms(const SketchMatrix& sk) {
    const SketchParams& p = sk.params();
    if (p.b != 1) throw std::domain_error("ams_row_norms requires b = 1");
    std::vector<double> out(static_cast<std::size_t>(p.ell));
    for (int j = 0; j < p.ell; ++j) out[j] = sk.at(j, 0) * sk.at(j, 0);
    return out;
}

}  // namespace adversketch
