#pragma once

// Bound-constrained Differential Evolution, DE/rand/1/bin: vector-difference
// mutation from three distinct peers, binomial crossover with one
// guaranteed-inherited coordinate, greedy synchronous selection. Trial
// coordinates leaving the box are reflected back inside. Fully
// deterministic for a given seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mgequiv/errors.hpp"

namespace mgequiv {

struct DeConfig {
    std::size_t population_size = 15;
    double f_s = 0.8;   // mutation scaling factor
    double c_r = 0.3;   // crossover probability
    std::size_t max_generations = 300;
    double target_eps = 1e-8;  // stop once the best objective reaches this
    std::uint64_t seed = 0;

    enum class Init { uniform_in_bounds, around_reference } init = Init::uniform_in_bounds;
    double init_fraction = 0.2;  // half-width of the around-reference box

    void validate() const {
        if (population_size < 4)
            throw ConfigError("DE needs a population of at least 4 (rand/1 mutation "
                              "draws 3 distinct non-target members)");
        if (!(f_s > 0.0) || f_s > 2.0) throw ConfigError("F_s must lie in (0, 2]");
        if (c_r < 0.0 || c_r > 1.0) throw ConfigError("C_r must lie in [0, 1]");
        if (!(target_eps >= 0.0)) throw ConfigError("target_eps must be non-negative");
    }
};

struct DeBounds {
    std::vector<double> lower;
    std::vector<double> upper;
    // optional narrower initialization box, clipped to the bounds
    std::vector<double> init_lower;
    std::vector<double> init_upper;
};

struct DeResult {
    std::vector<double> best;
    double best_eps = 0.0;
    std::vector<double> history;  // per-generation best, non-increasing
    std::size_t evaluations = 0;
};

namespace detail {

inline double reflect_into_box(double v, double lo, double hi) {
    if (lo == hi) return lo;
    for (int guard = 0; guard < 64 && (v < lo || v > hi); ++guard) {
        if (v < lo) v = 2.0 * lo - v;
        if (v > hi) v = 2.0 * hi - v;
    }
    return std::clamp(v, lo, hi);
}

}  // namespace detail

/// Minimizes `objective` over the box. The objective must return finite
/// values (simulation failures are expected to be mapped to a large finite
/// penalty upstream).
inline DeResult de_optimize(const std::function<double(const std::vector<double>&)>& objective,
                            const DeBounds& bounds, const DeConfig& cfg) {
    cfg.validate();
    const std::size_t dims = bounds.lower.size();
    if (dims == 0) throw ConfigError("DE needs at least one dimension");
    if (bounds.upper.size() != dims) throw ConfigError("DE bounds length mismatch");
    for (std::size_t j = 0; j < dims; ++j) {
        if (!std::isfinite(bounds.lower[j]) || !std::isfinite(bounds.upper[j]) ||
            !(bounds.lower[j] <= bounds.upper[j]))
            throw ConfigError("DE bounds must be finite and ordered");
    }
    std::vector<double> init_lo = bounds.init_lower.empty() ? bounds.lower : bounds.init_lower;
    std::vector<double> init_hi = bounds.init_upper.empty() ? bounds.upper : bounds.init_upper;
    if (init_lo.size() != dims || init_hi.size() != dims)
        throw ConfigError("DE init range length mismatch");
    for (std::size_t j = 0; j < dims; ++j) {
        init_lo[j] = std::clamp(init_lo[j], bounds.lower[j], bounds.upper[j]);
        init_hi[j] = std::clamp(init_hi[j], bounds.lower[j], bounds.upper[j]);
        if (init_lo[j] > init_hi[j]) std::swap(init_lo[j], init_hi[j]);
    }

    std::mt19937_64 rng(cfg.seed);
    auto unit = [&rng]() {
        return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    };
    auto pick_index = [&rng](std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    };

    const std::size_t np = cfg.population_size;
    std::vector<std::vector<double>> pop(np, std::vector<double>(dims));
    std::vector<double> cost(np);

    auto checked_eval = [&](const std::vector<double>& x) {
        const double c = objective(x);
        if (!std::isfinite(c))
            throw ConfigError("objective returned a non-finite value despite penalties");
        return c;
    };

    DeResult res;
    for (std::size_t i = 0; i < np; ++i) {
        for (std::size_t j = 0; j < dims; ++j)
            pop[i][j] = init_lo[j] + (init_hi[j] - init_lo[j]) * unit();
        cost[i] = checked_eval(pop[i]);
        ++res.evaluations;
    }

    auto best_of = [&]() {
        std::size_t bi = 0;
        for (std::size_t i = 1; i < np; ++i)
            if (cost[i] < cost[bi]) bi = i;
        return bi;
    };
    res.history.push_back(cost[best_of()]);

    std::vector<std::vector<double>> next = pop;
    std::vector<double> trial(dims);
    for (std::size_t gen = 0; gen < cfg.max_generations; ++gen) {
        if (res.history.back() <= cfg.target_eps) break;
        for (std::size_t i = 0; i < np; ++i) {
            std::size_t r1, r2, r3;
            do { r1 = pick_index(np); } while (r1 == i);
            do { r2 = pick_index(np); } while (r2 == i || r2 == r1);
            do { r3 = pick_index(np); } while (r3 == i || r3 == r1 || r3 == r2);
            const std::size_t j_rand = pick_index(dims);
            for (std::size_t j = 0; j < dims; ++j) {
                if (unit() < cfg.c_r || j == j_rand) {
                    const double v = pop[r1][j] + cfg.f_s * (pop[r2][j] - pop[r3][j]);
                    trial[j] = detail::reflect_into_box(v, bounds.lower[j], bounds.upper[j]);
                } else {
                    trial[j] = pop[i][j];
                }
            }
            const double c = checked_eval(trial);
            ++res.evaluations;
            if (c <= cost[i]) {
                next[i] = trial;
                cost[i] = c;
            } else {
                next[i] = pop[i];
            }
        }
        pop.swap(next);
        res.history.push_back(cost[best_of()]);
    }

    const std::size_t bi = best_of();
    res.best = pop[bi];
    res.best_eps = cost[bi];
    return res;
}

}  // namespace mgequiv
