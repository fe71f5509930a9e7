#pragma once

// Synthetic disturbance scenarios: a (V, f) profile shaped as a voltage sag
// with first-order recovery, optionally dressed with a small deterministic
// ambient ripple, completed into a full PCC record by playing it through
// the equivalent itself. Serves as twin-model "measured" data.

#include <cmath>
#include <string>

#include "mgequiv/playin.hpp"
#include "mgequiv/timeseries.hpp"

namespace mgequiv {

/// Fault template: pre-fault flat at v_pre (plus ambient, when enabled),
/// sag to v_sag during [t_fault, t_fault + duration], first-order recovery
/// afterwards. The frequency dips by f_dip over the fault and recovers the
/// same way.
struct FaultTemplate {
    double t_fault = 10.0;    // s
    double duration = 0.5;    // s
    double v_sag = 0.4;       // pu
    double f_dip = 0.3;       // Hz
    double v_pre = 1.0;       // pu
    double recovery_tau = 0.15;    // s, voltage recovery
    double f_recovery_tau = 0.3;   // s, frequency recovery
    // Deterministic slow multi-tone ripple superposed on the profile,
    // emulating the ambient variation a real feeder record carries. Zero
    // (the default) keeps the profile ideal.
    double ambient_v = 0.0;   // pu amplitude
    double ambient_f = 0.0;   // Hz amplitude

    void validate() const {
        if (!(duration > 0.0)) throw ConfigError("fault duration must be positive");
        if (!(v_sag >= 0.0) || !(v_pre > 0.0))
            throw ConfigError("fault voltages must be non-negative");
        if (!(recovery_tau > 0.0) || !(f_recovery_tau > 0.0))
            throw ConfigError("recovery time constants must be positive");
    }
};

struct ScenarioSpan {
    double t_begin = 9.0;
    double t_end = 14.0;
    double dt = 0.01;

    void validate() const {
        if (!(dt > 0.0) || !(t_begin < t_end)) throw ConfigError("invalid scenario span");
    }

    std::size_t sample_count() const {
        return static_cast<std::size_t>(std::floor((t_end - t_begin) / dt + 1e-9)) + 1;
    }
};

namespace detail {

inline double scenario_voltage(const FaultTemplate& ft, double t, double t_begin) {
    double v;
    if (t < ft.t_fault) {
        v = ft.v_pre;
    } else if (t <= ft.t_fault + ft.duration) {
        v = ft.v_sag;
    } else {
        const double dt_clear = t - (ft.t_fault + ft.duration);
        v = ft.v_pre - (ft.v_pre - ft.v_sag) * std::exp(-dt_clear / ft.recovery_tau);
    }
    if (ft.ambient_v != 0.0) {
        const double tau = t - t_begin;
        v += ft.ambient_v * (std::sin(2.0 * M_PI * 0.45 * tau) +
                             0.6 * std::sin(2.0 * M_PI * 0.11 * tau));
    }
    return v < 0.0 ? 0.0 : v;
}

inline double scenario_frequency(const FaultTemplate& ft, double t, double t_begin,
                                 double f_nom) {
    double f = f_nom;
    if (t >= ft.t_fault && t <= ft.t_fault + ft.duration) {
        f -= ft.f_dip * (t - ft.t_fault) / ft.duration;
    } else if (t > ft.t_fault + ft.duration) {
        const double dt_clear = t - (ft.t_fault + ft.duration);
        f -= ft.f_dip * std::exp(-dt_clear / ft.f_recovery_tau);
    }
    if (ft.ambient_f != 0.0) {
        const double tau = t - t_begin;
        f += ft.ambient_f * std::sin(2.0 * M_PI * 0.3 * tau);
    }
    return f;
}

}  // namespace detail

/// Builds the (V, f) profile and fills (P, Q) by replaying it through the
/// equivalent assembled from `params`.
inline PccTimeSeries synth_scenario(const ParameterSet& params, const FaultTemplate& ft,
                                    const ScenarioSpan& span, const SimConfig& cfg = {}) {
    ft.validate();
    span.validate();
    const BaseSystem base = params.base();

    PccTimeSeries s;
    s.t0 = span.t_begin;
    s.dt = span.dt;
    const std::size_t n = span.sample_count();
    s.v_mag.resize(n);
    s.freq.resize(n);
    s.p.assign(n, 0.0);
    s.q.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = s.time_at(k);
        s.v_mag[k] = detail::scenario_voltage(ft, t, span.t_begin);
        s.freq[k] = detail::scenario_frequency(ft, t, span.t_begin, base.f_nom);
    }

    const OutputTrajectory traj = simulate_playin(params, s, cfg);
    s.p = traj.p_hat;
    s.q = traj.q_hat;
    return s;
}

}  // namespace mgequiv
