#include "adversketch/attack.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace adversketch {

namespace {
constexpr std::uint64_t kTailStream = 0;
constexpr std::uint64_t kValueStream = 1;
constexpr std::uint64_t kReportStream = 2;
constexpr std::uint64_t kGateStream = 99;
}  // namespace

TailSet attack_tails(std::uint64_t n, std::uint64_t m, int r, std::uint64_t seed,
                     bool random_supports) {
    if (r < 0) throw std::invalid_argument("attack_tails: r must be >= 0");
    const std::uint64_t needed = static_cast<std::uint64_t>(r) * m + 1;
    if (n < needed + 1) throw std::invalid_argument("attack_tails: key space exhausted (need n > r*m + 1)");

    Rng rng(derive_seed(seed, kTailStream));
    TailSet out;
    out.support_size = m;
    out.heavy_key = rng.below(n);
    out.tails.resize(static_cast<std::size_t>(r));

    if (random_supports) {
        std::unordered_set<std::uint64_t> used{out.heavy_key};
        for (auto& tail : out.tails) {
            for (std::uint64_t i = 0; i < m; ++i) {
                std::uint64_t key;
                do {
                    key = rng.below(n);
                } while (!used.insert(key).second);
                tail.set(key, static_cast<double>(rng.rademacher()));
            }
        }
    } else {
        // Consecutive blocks after the heavy key, wrapping mod n. n > r*m + 1
        // guarantees no block reaches the heavy key again.
        std::uint64_t next = out.heavy_key;
        for (auto& tail : out.tails) {
            for (std::uint64_t i = 0; i < m; ++i) {
                next = next + 1 == n ? 0 : next + 1;
                tail.set(next, static_cast<double>(rng.rademacher()));
            }
        }
    }
    return out;
}

double AttackConfig::sigma() const {
    return std::sqrt(static_cast<double>(m) / static_cast<double>(params.b));
}

void AttackConfig::validate() const {
    params.validate();
    if (r < 0) throw std::invalid_argument("AttackConfig: r must be >= 0");
    if (m < 1) throw std::invalid_argument("AttackConfig: m must be >= 1");
    if (!(g > 0.0 && g <= a && a < c)) throw std::invalid_argument("AttackConfig: need 0 < g <= a < c");
}

namespace {

// Adjusted measurements of `key` for the query vector v_h * e_key + tail,
// computed without materializing the combined vector.
std::vector<double> query_adjusted(const SketchRandomness& rho, const SparseVector& tail,
                                   std::uint64_t key, double heavy_value) {
    std::vector<double> adj = adjusted_measurements_direct(rho, tail, key);
    for (double& x : adj) x += heavy_value;  // sign(key)^2 = 1
    return adj;
}

std::vector<double> query_adjusted_ip(const SketchRandomness& rho, const SparseVector& tail,
                                      std::uint64_t key, double heavy_value) {
    SparseVector query = tail;
    query.add(key, heavy_value);
    const SketchMatrix sk_basis = sketch(rho, SparseVector::unit(key));
    const SketchMatrix sk_query = sketch(rho, query);
    return inner_product_estimates(sk_basis, sk_query);
}

}  // namespace

AttackTrace universal_attack(const SketchRandomness& rho, const ResponderChooser& responder,
                             const AttackConfig& cfg, bool gate, QueryRoute route) {
    cfg.validate();
    const double sigma = cfg.sigma();

    if (gate) {
        CorrectnessParams gate_params{std::pow(cfg.delta2, 0.25), cfg.a, cfg.c,
                                      cfg.params.ell, sigma};
        const CorrectnessReport rep =
            verify_correctness(responder(0), gate_params, 2000, derive_seed(cfg.seed, kGateStream));
        if (!rep.pass) {
            throw std::runtime_error("universal_attack: responder failed the correctness gate (rate_at_c=" +
                                     std::to_string(rep.rate_at_c) +
                                     ", rate_at_a=" + std::to_string(rep.rate_at_a) + ")");
        }
    }

    const TailSet tails = attack_tails(cfg.params.n, cfg.m, cfg.r, cfg.seed, cfg.random_supports);

    // Query values are drawn up front: the whole query sequence is a function
    // of the attack seed alone, independent of responder outputs.
    Rng value_rng(derive_seed(cfg.seed, kValueStream));
    std::vector<double> heavy_values(static_cast<std::size_t>(cfg.r));
    for (auto& v : heavy_values) v = value_rng.uniform(cfg.a * sigma, (cfg.c + 2.0 * cfg.g) * sigma);

    Rng report_rng(derive_seed(cfg.seed, kReportStream));
    AttackTrace trace;
    trace.heavy_key = tails.heavy_key;
    trace.queries.reserve(static_cast<std::size_t>(cfg.r));

    for (int t = 0; t < cfg.r; ++t) {
        const SparseVector& tail = tails.tails[static_cast<std::size_t>(t)];
        const std::vector<double> adj =
            route == QueryRoute::heavy_hitter
                ? query_adjusted(rho, tail, tails.heavy_key, heavy_values[t])
                : query_adjusted_ip(rho, tail, tails.heavy_key, heavy_values[t]);
        const double p = responder(t).report_probability(adj);
        const int s = report_rng.bernoulli(p) ? 1 : -1;
        trace.queries.push_back({heavy_values[t], s});
        for (const auto& [key, value] : tail) trace.adversarial.add(key, s * value);
    }
    return trace;
}

void MeanAttackConfig::validate() const {
    if (ell < 1) throw std::invalid_argument("MeanAttackConfig: ell must be >= 1");
    if (r < 0) throw std::invalid_argument("MeanAttackConfig: r must be >= 0");
    if (!(sigma > 0.0)) throw std::invalid_argument("MeanAttackConfig: sigma must be > 0");
    if (!(g > 0.0 && g <= a && a < c)) throw std::invalid_argument("MeanAttackConfig: need 0 < g <= a < c");
}

double MeanAttackConfig::guard_condition_ratio() const {
    const double lhs = std::sqrt(ell / (2.0 * M_PI)) * std::exp(-0.5 * ell * g * g);
    return lhs * (c - a + 2.0 * g);
}

double MeanAttackOutput::attack_mean() const {
    double acc = 0.0;
    for (double x : attack_vector) acc += x;
    return attack_vector.empty() ? 0.0 : acc / static_cast<double>(attack_vector.size());
}

MeanAttackOutput mean_est_attack(const ResponderChooser& responder, const MeanAttackConfig& cfg) {
    cfg.validate();
    Rng value_rng(derive_seed(cfg.seed, kValueStream));
    Rng noise_rng(derive_seed(cfg.seed, kTailStream));
    Rng report_rng(derive_seed(cfg.seed, kReportStream));

    MeanAttackOutput out;
    out.attack_vector.assign(static_cast<std::size_t>(cfg.ell), 0.0);
    out.steps.reserve(static_cast<std::size_t>(cfg.r));

    std::vector<double> noise(static_cast<std::size_t>(cfg.ell));
    std::vector<double> u(static_cast<std::size_t>(cfg.ell));
    for (int t = 0; t < cfg.r; ++t) {
        const double v = value_rng.uniform(cfg.a * cfg.sigma, (cfg.c + 2.0 * cfg.g) * cfg.sigma);
        double noise_mean = 0.0;
        for (int j = 0; j < cfg.ell; ++j) {
            noise[j] = noise_rng.normal(0.0, cfg.sigma);
            u[j] = v + noise[j];
            noise_mean += noise[j];
        }
        noise_mean /= cfg.ell;
        const double p = responder(t).report_probability(u);
        const int s = report_rng.bernoulli(p) ? 1 : -1;
        for (int j = 0; j < cfg.ell; ++j) out.attack_vector[j] += s * noise[j];
        out.steps.push_back({v, s, noise_mean / cfg.sigma});
    }
    return out;
}

double AmsAttackConfig::sigma() const { return tau * std::sqrt(0.5); }
double AmsAttackConfig::c() const { return std::sqrt(1.0 + 2.0 * epsilon); }
double AmsAttackConfig::g() const {
    const double ell = static_cast<double>(params.ell);
    return std::min(a(), std::log(std::sqrt(ell / epsilon)) / std::sqrt(ell));
}

void AmsAttackConfig::validate() const {
    params.validate();
    if (params.b != 1) throw std::domain_error("AmsAttackConfig: AMS mode requires b = 1");
    if (r < 0) throw std::invalid_argument("AmsAttackConfig: r must be >= 0");
    if (m < 1) throw std::invalid_argument("AmsAttackConfig: m must be >= 1");
    if (!(tau > 0.0)) throw std::invalid_argument("AmsAttackConfig: tau must be > 0");
    if (!(epsilon >= 1.0 / std::sqrt(static_cast<double>(params.ell)))) {
        throw std::invalid_argument("AmsAttackConfig: epsilon below 1/sqrt(ell); correct estimators do not exist");
    }
}

AttackTrace ams_attack(const SketchRandomness& rho, const NormResponderChooser& responder,
                       const AmsAttackConfig& cfg) {
    cfg.validate();
    const double sigma = cfg.sigma();
    const double scale = sigma / std::sqrt(static_cast<double>(cfg.m));

    TailSet tails = attack_tails(cfg.params.n, cfg.m, cfg.r, cfg.seed, cfg.random_supports);
    // Rescale tails so every query tail has l2 norm exactly sigma.
    for (auto& tail : tails.tails) {
        SparseVector scaled;
        for (const auto& [key, value] : tail) scaled.set(key, value * scale);
        tail = std::move(scaled);
    }

    Rng value_rng(derive_seed(cfg.seed, kValueStream));
    std::vector<double> heavy_values(static_cast<std::size_t>(cfg.r));
    for (auto& v : heavy_values) v = value_rng.uniform(cfg.a() * sigma, (cfg.c() + 2.0 * cfg.g()) * sigma);

    AttackTrace trace;
    trace.heavy_key = tails.heavy_key;
    trace.queries.reserve(static_cast<std::size_t>(cfg.r));

    std::vector<double> rows(static_cast<std::size_t>(cfg.params.ell));
    for (int t = 0; t < cfg.r; ++t) {
        const SparseVector& tail = tails.tails[static_cast<std::size_t>(t)];
        // AMS measurements of v_h * e_h + z^(t), one per row.
        for (int j = 0; j < cfg.params.ell; ++j) {
            double acc = heavy_values[t] * rho.sign(j, tails.heavy_key);
            for (const auto& [key, value] : tail) acc += rho.sign(j, key) * value;
            rows[j] = acc;
        }
        const int s = responder(t).decide(rows);
        trace.queries.push_back({heavy_values[t], s});
        for (const auto& [key, value] : tail) trace.adversarial.add(key, s * value);
    }
    return trace;
}

}  // namespace adversketch
