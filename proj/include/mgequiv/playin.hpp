#pragma once

// Play-in (playback) simulation: drive the equivalent with recorded (V, f)
// at the PCC and collect the (P_hat, Q_hat) trajectory on the sample grid.

#include <cmath>
#include <string>
#include <vector>

#include "mgequiv/equivalent.hpp"
#include "mgequiv/errors.hpp"
#include "mgequiv/integrate.hpp"
#include "mgequiv/timeseries.hpp"

namespace mgequiv {

struct SimConfig {
    double dt_int = 1e-3;  // internal step, must divide the sample interval
    IntegrationMethod method = IntegrationMethod::rk4;
    // input interpolation between samples is linear

    void validate() const {
        if (!(dt_int > 0.0)) throw ConfigError("dt_int must be positive");
    }
};

/// Simulated PCC response on the input sample grid, MW / MVar.
struct OutputTrajectory {
    std::vector<double> t;      // s
    std::vector<double> p_hat;  // MW
    std::vector<double> q_hat;  // MVar
};

/// PCC phasor angle integrated from measured frequency: theta(0) = 0,
/// trapezoidal accumulation of 2*pi*(f - f_nom).
inline std::vector<double> reconstruct_angle(const std::vector<double>& freq, double f_nom,
                                             double dt) {
    std::vector<double> theta(freq.size(), 0.0);
    for (std::size_t k = 1; k < freq.size(); ++k) {
        if (!(freq[k] > 0.0)) throw ConfigError("frequency must stay positive");
        const double f_mid = 0.5 * (freq[k] + freq[k - 1]);
        theta[k] = theta[k - 1] + 2.0 * M_PI * (f_mid - f_nom) * dt;
    }
    return theta;
}

namespace detail {

inline std::size_t substeps_per_sample(double dt, double dt_int) {
    const double ratio = dt / dt_int;
    const double n = std::round(ratio);
    if (n < 1.0 || std::abs(dt - n * dt_int) > 1e-9)
        throw ConfigError("dt_int must divide the sample interval");
    return static_cast<std::size_t>(n);
}

}  // namespace detail

/// Replays the series through the equivalent assembled from `params`.
/// Deterministic: fixed-step integration, inputs linearly interpolated,
/// outputs recorded exactly on the input grid.
inline OutputTrajectory simulate_playin(const ParameterSet& params, const PccTimeSeries& input,
                                        const SimConfig& cfg) {
    input.validate();
    cfg.validate();
    const std::size_t n_sub = detail::substeps_per_sample(input.dt, cfg.dt_int);
    const double h = input.dt / static_cast<double>(n_sub);

    EquivalentModel model(params);
    EquivalentState state = model.init_steady_state(input.v_mag[0], input.freq[0]);

    OutputTrajectory out;
    const std::size_t n = input.size();
    out.t.reserve(n);
    out.p_hat.reserve(n);
    out.q_hat.reserve(n);

    auto record = [&](std::size_t k) {
        const PccOutput o = model.pcc_output(state, input.v_mag[k], input.freq[k]);
        out.t.push_back(input.time_at(k));
        out.p_hat.push_back(o.p_hat);
        out.q_hat.push_back(o.q_hat);
    };

    auto x = state.pack();
    for (std::size_t k = 0; k + 1 < n; ++k) {
        record(k);
        const double v0 = input.v_mag[k], v1 = input.v_mag[k + 1];
        const double f0 = input.freq[k], f1 = input.freq[k + 1];
        const double dt = input.dt;
        auto rhs = [&](double tau, const std::array<double, EquivalentState::kSize>& xs,
                       std::array<double, EquivalentState::kSize>& dx) {
            const double w = tau / dt;
            const double v = v0 + (v1 - v0) * w;
            const double f = f0 + (f1 - f0) * w;
            dx = model.derivatives(EquivalentState::unpack(xs), v, f).pack();
        };
        for (std::size_t i = 0; i < n_sub; ++i)
            integration_step<EquivalentState::kSize>(cfg.method, rhs,
                                                     static_cast<double>(i) * h, h, x);
        state = EquivalentState::unpack(x);

        double norm = 0.0;
        for (double xi : x) norm = std::max(norm, std::abs(xi));
        if (!(norm < 1e6))
            throw SimError("simulation diverged at t = " + format_double(input.time_at(k + 1)),
                           input.time_at(k + 1));
    }
    record(n - 1);
    return out;
}

}  // namespace mgequiv
