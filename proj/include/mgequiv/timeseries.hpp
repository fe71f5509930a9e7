#pragma once

// Uniformly sampled PCC records (V, f, P, Q): validation, windowing and the
// optional low-pass / decimation preprocessing stage.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mgequiv/errors.hpp"

namespace mgequiv {

/// Uniformly sampled record of PCC measurements. Voltage in pu, frequency
/// in Hz, powers in MW / MVar with the positive direction grid -> microgrid.
struct PccTimeSeries {
    double t0 = 0.0;  // s
    double dt = 0.0;  // s
    std::vector<double> v_mag;  // pu
    std::vector<double> freq;   // Hz
    std::vector<double> p;      // MW
    std::vector<double> q;      // MVar

    std::size_t size() const { return v_mag.size(); }
    double time_at(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
    double t_end() const { return time_at(size() - 1); }

    void validate() const {
        const std::size_t n = v_mag.size();
        if (n < 2) throw ParseError("time series needs at least 2 samples");
        if (freq.size() != n || p.size() != n || q.size() != n)
            throw ParseError("time series channels have mismatched lengths");
        if (!(dt > 0.0)) throw ParseError("time series dt must be positive");
        for (std::size_t k = 0; k < n; ++k) {
            if (!(v_mag[k] >= 0.0))
                throw ParseError("v must be >= 0 at sample " + std::to_string(k));
            if (!(freq[k] > 0.0))
                throw ParseError("f must be > 0 at sample " + std::to_string(k));
        }
    }
};

/// Closed time interval [t_start, t_end] within a series span.
struct Window {
    double t_start = 0.0;
    double t_end = 0.0;

    void validate() const {
        if (!(t_start < t_end))
            throw ConfigError("window start must precede its end");
    }
};

struct PreprocessConfig {
    std::optional<double> cutoff_hz;     // first-order low-pass
    std::optional<double> resample_dt;   // decimation target, s
};

/// Number of samples a window holds at spacing dt: floor(span/dt) + 1.
inline std::size_t window_sample_count(const Window& w, double dt) {
    return static_cast<std::size_t>(std::floor((w.t_end - w.t_start) / dt + 1e-9)) + 1;
}

/// Index range [first, last] of samples inside the window. Sample-time
/// comparisons carry a 1e-6*dt slack against accumulated rounding.
inline std::pair<std::size_t, std::size_t> window_index_range(const PccTimeSeries& s,
                                                              const Window& w) {
    w.validate();
    const double eps = 1e-6 * s.dt;
    if (w.t_start < s.t0 - eps || w.t_end > s.t_end() + eps)
        throw ConfigError("window lies outside the series span");
    double first_f = std::ceil((w.t_start - s.t0 - eps) / s.dt);
    double last_f = std::floor((w.t_end - s.t0 + eps) / s.dt);
    if (first_f < 0) first_f = 0;
    if (last_f > static_cast<double>(s.size() - 1))
        last_f = static_cast<double>(s.size() - 1);
    if (last_f < first_f) throw ConfigError("window contains no samples");
    return {static_cast<std::size_t>(first_f), static_cast<std::size_t>(last_f)};
}

/// Contiguous sub-series whose sample times lie in [t_start, t_end].
inline PccTimeSeries extract_window(const PccTimeSeries& s, const Window& w) {
    auto [first, last] = window_index_range(s, w);
    PccTimeSeries out;
    out.t0 = s.time_at(first);
    out.dt = s.dt;
    const auto b = static_cast<std::ptrdiff_t>(first);
    const auto e = static_cast<std::ptrdiff_t>(last) + 1;
    out.v_mag.assign(s.v_mag.begin() + b, s.v_mag.begin() + e);
    out.freq.assign(s.freq.begin() + b, s.freq.begin() + e);
    out.p.assign(s.p.begin() + b, s.p.begin() + e);
    out.q.assign(s.q.begin() + b, s.q.begin() + e);
    if (out.size() < 2) throw ConfigError("window shorter than 2 samples");
    return out;
}

namespace detail {

/// First-order low-pass, bilinear (Tustin) discretization, unit DC gain.
inline std::vector<double> lowpass_channel(const std::vector<double>& x, double cutoff_hz,
                                           double dt) {
    const double k = std::tan(M_PI * cutoff_hz * dt);
    const double a = k / (1.0 + k);
    const double b = (1.0 - k) / (1.0 + k);
    std::vector<double> y(x.size());
    y[0] = x[0];
    for (std::size_t i = 1; i < x.size(); ++i)
        y[i] = a * (x[i] + x[i - 1]) + b * y[i - 1];
    return y;
}

}  // namespace detail

/// Low-pass per channel, then decimation to resample_dt. Identity config is
/// a bitwise no-op.
inline PccTimeSeries preprocess(const PccTimeSeries& s, const PreprocessConfig& cfg) {
    s.validate();
    PccTimeSeries out = s;
    if (cfg.cutoff_hz) {
        if (!(*cfg.cutoff_hz > 0.0)) throw ConfigError("cutoff_hz must be positive");
        out.v_mag = detail::lowpass_channel(out.v_mag, *cfg.cutoff_hz, out.dt);
        out.freq = detail::lowpass_channel(out.freq, *cfg.cutoff_hz, out.dt);
        out.p = detail::lowpass_channel(out.p, *cfg.cutoff_hz, out.dt);
        out.q = detail::lowpass_channel(out.q, *cfg.cutoff_hz, out.dt);
    }
    if (cfg.resample_dt) {
        const double target = *cfg.resample_dt;
        if (!(target >= s.dt)) throw ConfigError("resample_dt must be >= the original dt");
        const double ratio = target / s.dt;
        const double factor_f = std::round(ratio);
        if (std::abs(target - factor_f * s.dt) > 1e-9)
            throw ConfigError("resample_dt is not an integer multiple of dt");
        const auto factor = static_cast<std::size_t>(factor_f);
        if (factor > 1) {
            PccTimeSeries dec;
            dec.t0 = out.t0;
            dec.dt = out.dt * static_cast<double>(factor);
            for (std::size_t i = 0; i < out.size(); i += factor) {
                dec.v_mag.push_back(out.v_mag[i]);
                dec.freq.push_back(out.freq[i]);
                dec.p.push_back(out.p[i]);
                dec.q.push_back(out.q[i]);
            }
            if (dec.size() < 2) throw ConfigError("decimation leaves fewer than 2 samples");
            out = std::move(dec);
        }
    }
    return out;
}

}  // namespace mgequiv
