#pragma once

// Trajectory sensitivity of the equivalent's outputs with respect to each
// parameter (central differences along the play-in trajectory), the
// quadratic per-window index and the ranked parameter selection.

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mgequiv/playin.hpp"
#include "mgequiv/timeseries.hpp"

namespace mgequiv {

/// Samples of d(output)/d(theta) over an analysis window. Outputs are in pu
/// on s_base so indices are base-independent; the parameter stays in its
/// natural unit.
struct SensitivityTrajectory {
    std::string param_name;
    std::string output_name;  // "P_hat" or "Q_hat"
    std::vector<double> values;
};

struct RankingEntry {
    std::string param;
    double e_p = 0.0;
    double e_q = 0.0;
    double combined = 0.0;
};

/// Entries sorted by descending combined score; ties broken by name.
struct SensitivityRanking {
    std::vector<RankingEntry> entries;
    Window window;
    double rel_step = 0.0;
};

namespace detail {

/// Simulates up to the window end only; the window indexing is shared with
/// the full series since t0 is preserved.
inline OutputTrajectory simulate_for_window(const ParameterSet& ps, const PccTimeSeries& input,
                                            const Window& w, const SimConfig& cfg) {
    if (w.t_end < input.t_end() - 1e-6 * input.dt) {
        PccTimeSeries truncated = extract_window(input, Window{input.t0, w.t_end});
        return simulate_playin(ps, truncated, cfg);
    }
    return simulate_playin(ps, input, cfg);
}

}  // namespace detail

/// Central-difference trajectory sensitivity of (P_hat, Q_hat) to one
/// parameter: simulate at theta*(1 +/- rel_step), divide the output deltas
/// by the full step. A parameter at exactly zero needs abs_step.
inline std::pair<SensitivityTrajectory, SensitivityTrajectory> trajectory_sensitivity(
    const ParameterSet& params, const PccTimeSeries& input, const Window& window,
    const std::string& param_name, double rel_step, const SimConfig& cfg = {},
    std::optional<double> abs_step = std::nullopt) {
    if (!(rel_step > 0.0) || rel_step > 0.1)
        throw ConfigError("rel_step must lie in (0, 0.1]");
    const double theta = params.get(param_name);
    double step;
    if (theta != 0.0) {
        step = rel_step * std::abs(theta);
    } else if (abs_step && *abs_step > 0.0) {
        step = *abs_step;
    } else {
        throw ConfigError("parameter '" + param_name +
                          "' is zero and no absolute fallback step was given");
    }

    auto run = [&](double value, const char* sign) {
        ParameterSet p = params;
        p.set(param_name, value);
        try {
            return detail::simulate_for_window(p, input, window, cfg);
        } catch (const std::exception& e) {
            throw ModelError("simulation failed perturbing '" + param_name + "' " + sign +
                             std::string(": ") + e.what());
        }
    };
    const OutputTrajectory up = run(theta + step, "+");
    const OutputTrajectory down = run(theta - step, "-");

    const double s_base = params.get("s_base");
    auto [first, last] = window_index_range(input, window);

    SensitivityTrajectory sp{param_name, "P_hat", {}};
    SensitivityTrajectory sq{param_name, "Q_hat", {}};
    sp.values.reserve(last - first + 1);
    sq.values.reserve(last - first + 1);
    for (std::size_t k = first; k <= last; ++k) {
        sp.values.push_back((up.p_hat[k] - down.p_hat[k]) / (2.0 * step * s_base));
        sq.values.push_back((up.q_hat[k] - down.q_hat[k]) / (2.0 * step * s_base));
    }
    return {std::move(sp), std::move(sq)};
}

/// Quadratic index: sum of squared sensitivity samples over the window.
inline double sensitivity_index(const SensitivityTrajectory& traj) {
    if (traj.values.empty()) throw ConfigError("sensitivity trajectory is empty");
    double e = 0.0;
    for (double v : traj.values) e += v * v;
    return e;
}

/// Ranks every free parameter by the max-normalized sum of its P and Q
/// indices.
inline SensitivityRanking rank_parameters(const ParameterSet& params,
                                          const PccTimeSeries& input, const Window& window,
                                          double rel_step, const SimConfig& cfg = {}) {
    SensitivityRanking ranking;
    ranking.window = window;
    ranking.rel_step = rel_step;

    for (const auto& p : params.all()) {
        if (!p.free) continue;
        auto [sp, sq] = trajectory_sensitivity(params, input, window, p.name, rel_step, cfg);
        RankingEntry e;
        e.param = p.name;
        e.e_p = sensitivity_index(sp);
        e.e_q = sensitivity_index(sq);
        ranking.entries.push_back(std::move(e));
    }
    if (ranking.entries.empty()) throw ConfigError("no free parameters to rank");

    double max_p = 0.0, max_q = 0.0;
    for (const auto& e : ranking.entries) {
        max_p = std::max(max_p, e.e_p);
        max_q = std::max(max_q, e.e_q);
    }
    if (max_p == 0.0 && max_q == 0.0)
        throw ModelError("all sensitivities are zero over this window");
    for (auto& e : ranking.entries)
        e.combined = (max_p > 0.0 ? e.e_p / max_p : 0.0) + (max_q > 0.0 ? e.e_q / max_q : 0.0);

    std::sort(ranking.entries.begin(), ranking.entries.end(),
              [](const RankingEntry& a, const RankingEntry& b) {
                  if (a.combined != b.combined) return a.combined > b.combined;
                  return a.param < b.param;
              });
    return ranking;
}

struct SelectPolicy {
    enum class Kind { top_k, threshold } kind = Kind::top_k;
    std::size_t k = 0;
    double fraction = 0.0;  // of the maximum combined score

    static SelectPolicy top_k(std::size_t k) { return {Kind::top_k, k, 0.0}; }
    static SelectPolicy threshold(double fraction) { return {Kind::threshold, 0, fraction}; }
};

/// Deterministic subset of the ranking per policy; the complement is meant
/// to stay fixed at its typical value.
inline std::vector<std::string> select_parameters(const SensitivityRanking& ranking,
                                                  const SelectPolicy& policy) {
    if (ranking.entries.empty()) throw ConfigError("cannot select from an empty ranking");
    std::vector<std::string> out;
    if (policy.kind == SelectPolicy::Kind::top_k) {
        std::size_t k = policy.k;
        if (k > ranking.entries.size()) {
            std::cerr << "select_parameters: clamping k=" << k << " to "
                      << ranking.entries.size() << " ranked parameters\n";
            k = ranking.entries.size();
        }
        for (std::size_t i = 0; i < k; ++i) out.push_back(ranking.entries[i].param);
    } else {
        const double cut = policy.fraction * ranking.entries.front().combined;
        for (const auto& e : ranking.entries)
            if (e.combined >= cut) out.push_back(e.param);
    }
    return out;
}

}  // namespace mgequiv
