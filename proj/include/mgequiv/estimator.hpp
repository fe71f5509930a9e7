#pragma once

// Output-mismatch objective over a sampling window and the two-stage DE
// estimation driver: pre-disturbance stage for power-balance parameters,
// disturbance stage for the remaining dynamics, the second seeded with the
// first's result.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "mgequiv/de.hpp"
#include "mgequiv/parameters.hpp"
#include "mgequiv/playin.hpp"
#include "mgequiv/sensitivity.hpp"
#include "mgequiv/validation.hpp"

namespace mgequiv {

constexpr double kSimFailurePenalty = 1e6;

struct EstimationResult {
    ParameterSet fitted;
    double best_eps = 0.0;
    std::vector<double> history;  // per-generation best objective
    std::size_t evaluations = 0;
    std::size_t penalties = 0;  // simulations that failed and were penalized
    std::string stage_label;
};

/// Free-parameter names resolved into canonical order with their bounds.
struct FreeLayout {
    std::vector<std::string> names;
    DeBounds bounds;
};

namespace detail {

inline FreeLayout make_layout(const ParameterSet& base, std::vector<std::string> free_names) {
    FreeLayout layout;
    for (const auto& p : base.all()) {
        auto it = std::find(free_names.begin(), free_names.end(), p.name);
        if (it == free_names.end()) continue;
        free_names.erase(it);
        if (!std::isfinite(p.lower) || !std::isfinite(p.upper))
            throw ConfigError("parameter '" + p.name + "' has no finite search bounds");
        layout.names.push_back(p.name);
        layout.bounds.lower.push_back(p.lower);
        layout.bounds.upper.push_back(p.upper);
    }
    if (!free_names.empty())
        throw ConfigError("unknown parameter '" + free_names.front() + "' in the free set");
    return layout;
}

inline ParameterSet apply_theta(const ParameterSet& base, const FreeLayout& layout,
                                const std::vector<double>& theta) {
    ParameterSet ps = base;
    for (std::size_t j = 0; j < layout.names.size(); ++j)
        ps.set(layout.names[j], theta[j]);
    return ps;
}

}  // namespace detail

/// Eq-style objective: mean squared P mismatch plus mean squared Q mismatch
/// over the window, both in per-unit. Simulation failures map to a large
/// finite penalty so the search can continue; `penalty_count` reports how
/// often that happened.
inline double objective(const std::vector<double>& theta, const ParameterSet& base,
                        const FreeLayout& layout, const PccTimeSeries& measured,
                        const Window& window, const SimConfig& cfg,
                        std::size_t* penalty_count = nullptr) {
    const ParameterSet candidate = detail::apply_theta(base, layout, theta);
    const double s_base = base.get("s_base");
    try {
        const OutputTrajectory traj =
            detail::simulate_for_window(candidate, measured, window, cfg);
        auto [first, last] = window_index_range(measured, window);
        std::vector<double> p_meas, p_hat, q_meas, q_hat;
        p_meas.reserve(last - first + 1);
        for (std::size_t k = first; k <= last; ++k) {
            p_meas.push_back(measured.p[k] / s_base);
            p_hat.push_back(traj.p_hat[k] / s_base);
            q_meas.push_back(measured.q[k] / s_base);
            q_hat.push_back(traj.q_hat[k] / s_base);
        }
        return mse(p_meas, p_hat) + mse(q_meas, q_hat);
    } catch (const ModelError&) {
        if (penalty_count) ++(*penalty_count);
        return kSimFailurePenalty;
    } catch (const SimError&) {
        if (penalty_count) ++(*penalty_count);
        return kSimFailurePenalty;
    }
}

/// One DE stage: mark exactly `free_names` free, search their box, write
/// the fitted values into a copy of `base`. `around_ref_names` initialize
/// inside +/- init_fraction of their current value; the rest start uniform
/// in their bounds.
inline EstimationResult estimate_stage(const ParameterSet& base,
                                       const std::vector<std::string>& free_names,
                                       const PccTimeSeries& measured, const Window& window,
                                       const DeConfig& de_cfg, const SimConfig& sim_cfg = {},
                                       const std::vector<std::string>& around_ref_names = {},
                                       const std::string& stage_label = "stage") {
    window.validate();
    EstimationResult result{base, 0.0, {}, 0, 0, stage_label};

    if (free_names.empty()) {
        FreeLayout empty;
        result.best_eps = objective({}, base, empty, measured, window, sim_cfg);
        result.history = {result.best_eps};
        result.evaluations = 1;
        return result;
    }

    FreeLayout layout = detail::make_layout(base, free_names);
    const std::size_t dims = layout.names.size();
    layout.bounds.init_lower.resize(dims);
    layout.bounds.init_upper.resize(dims);
    for (std::size_t j = 0; j < dims; ++j) {
        const bool around =
            de_cfg.init == DeConfig::Init::around_reference ||
            std::find(around_ref_names.begin(), around_ref_names.end(), layout.names[j]) !=
                around_ref_names.end();
        if (around) {
            const double ref = base.get(layout.names[j]);
            const double half = de_cfg.init_fraction * std::abs(ref);
            layout.bounds.init_lower[j] = ref - half;
            layout.bounds.init_upper[j] = ref + half;
        } else {
            layout.bounds.init_lower[j] = layout.bounds.lower[j];
            layout.bounds.init_upper[j] = layout.bounds.upper[j];
        }
    }

    std::size_t penalties = 0;
    auto obj = [&](const std::vector<double>& theta) {
        return objective(theta, base, layout, measured, window, sim_cfg, &penalties);
    };
    const DeResult de = de_optimize(obj, layout.bounds, de_cfg);

    result.fitted = detail::apply_theta(base, layout, de.best);
    result.fitted.select_free(free_names);
    result.best_eps = de.best_eps;
    result.history = de.history;
    result.evaluations = de.evaluations;
    result.penalties = penalties;
    return result;
}

/// Free set, DE settings and initialization policy for one stage.
struct StagePolicy {
    std::vector<std::string> free;
    DeConfig de;
    std::vector<std::string> around_ref;  // subset initialized near reference
};

struct TwoStageResult {
    EstimationResult stage1;
    EstimationResult stage2;
    ParameterSet fitted;
};

/// Default stage split: the power-balance group (loads, ratings, x_d, x_q,
/// T'_do) on the pre-disturbance window, the remaining estimable dynamics
/// on the disturbance window.
inline StagePolicy default_stage1_policy(std::uint64_t seed = 0) {
    StagePolicy p;
    p.free = {"P_p", "Q_p", "P_i", "Q_i", "P_z", "Q_z", "S_m", "S_vsc", "x_d", "x_q", "T_do_p"};
    p.around_ref = {"x_d", "x_q", "T_do_p"};
    p.de.population_size = 15;
    p.de.f_s = 0.8;
    p.de.c_r = 0.3;
    p.de.max_generations = 300;
    p.de.seed = seed;
    return p;
}

inline StagePolicy default_stage2_policy(std::uint64_t seed = 1) {
    StagePolicy p;
    p.free = {"x_dp", "x_qp", "T_q_p", "H", "K_a", "K_pvdc", "K_ivdc", "H_m", "X_m"};
    p.de.population_size = 30;
    p.de.f_s = 0.8;
    p.de.c_r = 0.7;
    p.de.max_generations = 600;
    p.de.seed = seed;
    p.de.init = DeConfig::Init::around_reference;
    p.de.init_fraction = 0.2;
    return p;
}

/// Runs the two stages in order, stage 2 starting from stage 1's fitted
/// values (which stay fixed there).
inline TwoStageResult two_stage_estimate(const ParameterSet& base,
                                         const PccTimeSeries& measured, const Window& stage1_w,
                                         const Window& stage2_w, const StagePolicy& stage1,
                                         const StagePolicy& stage2,
                                         const SimConfig& sim_cfg = {}) {
    stage1_w.validate();
    stage2_w.validate();
    if (!(stage1_w.t_end <= stage2_w.t_start))
        throw ConfigError("stage-1 window must precede the stage-2 window");

    TwoStageResult res;
    res.stage1 = estimate_stage(base, stage1.free, measured, stage1_w, stage1.de, sim_cfg,
                                stage1.around_ref, "stage1");
    res.stage2 = estimate_stage(res.stage1.fitted, stage2.free, measured, stage2_w, stage2.de,
                                sim_cfg, stage2.around_ref, "stage2");
    res.fitted = res.stage2.fitted;
    return res;
}

}  // namespace mgequiv
