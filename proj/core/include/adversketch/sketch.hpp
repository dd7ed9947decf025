#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "adversketch/rng.hpp"

namespace adversketch {

/// CountSketch geometry: ell rows of b buckets over a key space of size n.
/// b == 1 selects AMS mode (one signed measurement per row).
struct SketchParams {
    std::uint64_t n = 0;  ///< key-space size; logical bound, never materialized
    int ell = 0;          ///< number of rows
    int b = 0;            ///< buckets per row

    int measurements() const { return ell * b; }

    void validate() const {
        if (n < 1) throw std::invalid_argument("SketchParams: n must be >= 1");
        if (ell < 1) throw std::invalid_argument("SketchParams: ell must be >= 1");
        if (b < 1) throw std::invalid_argument("SketchParams: b must be >= 1");
    }
};

/// Seed-derived idealized hash family: bucket h_j(i) uniform on [b] and
/// sign s_j(i) uniform on {-1,+1}, evaluated on demand from (seed, row, key).
/// Immutable after construction; safe to share across threads.
class SketchRandomness {
public:
    SketchRandomness(SketchParams params, std::uint64_t seed)
        : params_(params), seed_(seed) {
        params_.validate();
        row_salt_.reserve(static_cast<std::size_t>(params_.ell) * 2);
        for (int j = 0; j < params_.ell; ++j) {
            row_salt_.push_back(mix64(seed, 2 * static_cast<std::uint64_t>(j) + 1));
            row_salt_.push_back(mix64(seed, 2 * static_cast<std::uint64_t>(j) + 2));
        }
    }

    const SketchParams& params() const { return params_; }
    std::uint64_t seed() const { return seed_; }

    int bucket(int row, std::uint64_t key) const {
        return static_cast<int>(mix64(key, row_salt_[2 * row]) %
                                static_cast<std::uint64_t>(params_.b));
    }

    // Sign hash is independent of b.
    double sign(int row, std::uint64_t key) const {
        return (mix64(key, row_salt_[2 * row + 1]) >> 63) ? 1.0 : -1.0;
    }

private:
    SketchParams params_;
    std::uint64_t seed_;
    std::vector<std::uint64_t> row_salt_;
};

/// Vector over the 64-bit key space, stored as key -> value. Explicit zeros
/// are never kept.
class SparseVector {
public:
    using Map = std::unordered_map<std::uint64_t, double>;

    SparseVector() = default;

    void set(std::uint64_t key, double value) {
        if (value == 0.0) {
            entries_.erase(key);
        } else {
            entries_[key] = value;
        }
    }

    void add(std::uint64_t key, double delta) {
        auto it = entries_.find(key);
        if (it == entries_.end()) {
            if (delta != 0.0) entries_.emplace(key, delta);
            return;
        }
        it->second += delta;
        if (it->second == 0.0) entries_.erase(it);
    }

    double value(std::uint64_t key) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? 0.0 : it->second;
    }

    bool contains(std::uint64_t key) const { return entries_.count(key) != 0; }
    std::size_t support_size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    double squared_norm() const {
        double s = 0.0;
        for (const auto& [k, v] : entries_) s += v * v;
        return s;
    }
    double l2_norm() const;
    double l1_norm() const {
        double s = 0.0;
        for (const auto& [k, v] : entries_) s += v < 0 ? -v : v;
        return s;
    }

    Map::const_iterator begin() const { return entries_.begin(); }
    Map::const_iterator end() const { return entries_.end(); }

    static SparseVector unit(std::uint64_t key) {
        SparseVector v;
        v.set(key, 1.0);
        return v;
    }

private:
    Map entries_;
};

/// Dense ell x b table of measurement values for one sketched vector.
class SketchMatrix {
public:
    explicit SketchMatrix(SketchParams params)
        : params_(params), values_(static_cast<std::size_t>(params.measurements()), 0.0) {}

    const SketchParams& params() const { return params_; }

    double& at(int row, int bucket) { return values_[static_cast<std::size_t>(row) * params_.b + bucket]; }
    double at(int row, int bucket) const { return values_[static_cast<std::size_t>(row) * params_.b + bucket]; }

    std::span<const double> row(int j) const {
        return {values_.data() + static_cast<std::size_t>(j) * params_.b,
                static_cast<std::size_t>(params_.b)};
    }

    bool same_shape(const SketchMatrix& other) const {
        return params_.ell == other.params_.ell && params_.b == other.params_.b;
    }

private:
    SketchParams params_;
    std::vector<double> values_;
};

SketchRandomness new_randomness(SketchParams params, std::uint64_t seed);

/// values[j][k] = sum over supp(v) with h_j(i)=k of s_j(i) * v_i.
SketchMatrix sketch(const SketchRandomness& rho, const SparseVector& v);

/// Streaming update: afterwards the matrix equals the sketch of
/// (prior input + alpha * v). Same rho must be used throughout.
SketchMatrix& add_scaled(SketchMatrix& sk, const SketchRandomness& rho,
                         const SparseVector& v, double alpha);

/// The ell adjusted measurements of `key`: row bucket value times the key's
/// sign, an unbiased estimate of v_key per row.
std::vector<double> adjusted_measurements(const SketchRandomness& rho,
                                          const SketchMatrix& sk, std::uint64_t key);

/// Same values computed straight from the sparse input, without forming the
/// full matrix. O(ell * support) with O(1) extra memory.
std::vector<double> adjusted_measurements_direct(const SketchRandomness& rho,
                                                 const SparseVector& v,
                                                 std::uint64_t key);

/// Per-row inner-product estimates: sum_k sx[j][k] * sy[j][k].
std::vector<double> inner_product_estimates(const SketchMatrix& sx, const SketchMatrix& sy);

/// AMS mode (b = 1): the squared measurement per row; the mean over rows is
/// the norm-squared estimate.
std::vector<double> ams_row_norms(const SketchMatrix& sk);

}  // namespace adversketch
