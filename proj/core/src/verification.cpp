#include "adversketch/verification.hpp"

#include <cmath>
#include <stdexcept>

namespace adversketch {

BiasReport bias_under(const SketchRandomness& rho, const SparseVector& z,
                      std::uint64_t heavy_key, double B, const AttackConfig* cfg) {
    if (z.contains(heavy_key)) throw std::invalid_argument("bias_under: heavy key in support of z");
    BiasReport rep;
    rep.norm = z.l2_norm();
    rep.threshold = std::sqrt(B / rho.params().b) * rep.norm;

    const std::vector<double> adj = adjusted_measurements_direct(rho, z, heavy_key);
    double acc = 0.0;
    for (double x : adj) acc += x;
    rep.mean_adjusted = acc / static_cast<double>(adj.size());
    rep.adversarial = rep.mean_adjusted >= rep.threshold;

    if (cfg != nullptr) {
        const double sigma = cfg->sigma();
        const double per_row = static_cast<double>(cfg->r) / cfg->params.ell;
        rep.predicted_mean = per_row * 2.0 * sigma / (cfg->c + cfg->a);
        rep.predicted_var = per_row * sigma * sigma;
    }
    return rep;
}

AmsBiasReport ams_bias_under(const SketchRandomness& rho, const SparseVector& z, double xi) {
    const SketchParams& p = rho.params();
    if (p.b != 1) throw std::domain_error("ams_bias_under requires b = 1");
    AmsBiasReport rep;
    rep.xi_target = xi;
    rep.norm_sq = z.squared_norm();
    double acc = 0.0;
    for (int j = 0; j < p.ell; ++j) {
        double meas = 0.0;
        for (const auto& [key, value] : z) meas += rho.sign(j, key) * value;
        acc += meas * meas;
    }
    rep.mean_sq = acc / static_cast<double>(p.ell);
    rep.ratio = rep.norm_sq > 0.0 ? rep.mean_sq / rep.norm_sq : 0.0;
    rep.adversarial = rep.mean_sq >= (1.0 + xi) * rep.norm_sq;
    return rep;
}

MeanAttackStats mean_attack_stats(std::span<const MeanAttackOutput> runs, const MeanAttackConfig& cfg) {
    if (runs.size() < 100) throw std::invalid_argument("mean_attack_stats: need >= 100 runs");
    cfg.validate();
    MeanAttackStats st;
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& run : runs) {
        const double mean = run.attack_mean();
        sum += mean;
        sum_sq += mean * mean;
    }
    const double n = static_cast<double>(runs.size());
    st.emp_mean = sum / n;
    st.emp_var = sum_sq / n - st.emp_mean * st.emp_mean;

    const double width = cfg.c - cfg.a + 2.0 * cfg.g;
    const double per_row = static_cast<double>(cfg.r) / cfg.ell;
    st.pred_mean = per_row * 2.0 * cfg.sigma / width;
    const double shrink = 1.0 - 2.0 * cfg.g / width;
    st.var_lo = per_row * cfg.sigma * cfg.sigma * shrink * shrink;
    st.var_hi = per_row * cfg.sigma * cfg.sigma;
    st.sq_norm_lo = cfg.r * cfg.sigma * cfg.sigma *
                    (1.0 - 2.0 * std::sqrt(2.0 / M_PI) / std::sqrt(static_cast<double>(cfg.ell)));
    return st;
}

double gap_estimate(ReportingFunction& p, double alpha, double a, double c, double g,
                    double sigma, int ell, long samples, std::uint64_t seed) {
    if (!(alpha > 0.0 && alpha <= g)) throw std::invalid_argument("gap_estimate: need 0 < alpha <= g");
    if (samples < 100000) throw std::invalid_argument("gap_estimate: need >= 1e5 samples");
    Rng rng(seed);
    std::vector<double> deviation(static_cast<std::size_t>(ell));
    std::vector<double> u(static_cast<std::size_t>(ell));
    double acc = 0.0;
    for (long s = 0; s < samples; ++s) {
        const double v = rng.uniform(a * sigma, (c + 2.0 * g) * sigma);
        double mean = 0.0;
        for (auto& d : deviation) {
            d = rng.normal(0.0, sigma);
            mean += d;
        }
        mean /= ell;
        for (auto& d : deviation) d -= mean;

        for (int j = 0; j < ell; ++j) u[j] = v + alpha * sigma + deviation[j];
        const double p_plus = p.report_probability(u);
        for (int j = 0; j < ell; ++j) u[j] = v - alpha * sigma + deviation[j];
        const double p_minus = p.report_probability(u);
        acc += p_plus - p_minus;
    }
    return acc / static_cast<double>(samples);
}

double log_density_difference(double v, double alpha, double sigma, std::span<const double> u) {
    double q_plus = 0.0, q_minus = 0.0;
    const double shift = alpha * sigma;
    for (double x : u) {
        const double dp = x - v - shift;
        const double dm = x - v + shift;
        q_plus += dp * dp;
        q_minus += dm * dm;
    }
    return -(q_plus - q_minus) / (2.0 * sigma * sigma);
}

double symmetry_check(double v, double alpha, double sigma, std::span<const double> u) {
    double mean = 0.0;
    for (double x : u) mean += x;
    mean /= static_cast<double>(u.size());
    if (std::abs(mean - v) > 1e-12) throw std::invalid_argument("symmetry_check: mean(u) != v");
    return log_density_difference(v, alpha, sigma, u);
}

}  // namespace adversketch
