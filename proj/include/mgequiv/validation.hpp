#pragma once

// Fit-quality report: per-event mean-squared errors in per-unit over stated
// windows, an accept/retune verdict against a threshold, and plot-ready
// comparison curves.

#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "mgequiv/playin.hpp"
#include "mgequiv/timeseries.hpp"
#include "mgequiv/units.hpp"

namespace mgequiv {

/// (1/N) sum of squared differences.
inline double mse(const std::vector<double>& y, const std::vector<double>& y_hat) {
    if (y.empty() || y.size() != y_hat.size())
        throw ConfigError("mse needs two equal-length non-empty sequences");
    double acc = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double d = y[k] - y_hat[k];
        acc += d * d;
    }
    return acc / static_cast<double>(y.size());
}

struct ValidationEvent {
    std::string label;
    PccTimeSeries series;
    Window window;
};

struct EventResult {
    std::string label;
    Window window;
    double mse_p = 0.0;  // pu^2
    double mse_q = 0.0;
    double mse_total = 0.0;
    bool simulated = false;
    std::string error;  // set when the event could not be simulated
};

struct ValidationReport {
    std::vector<EventResult> events;
    double threshold = 0.0;
    enum class Verdict { validated, retune_required } verdict = Verdict::retune_required;
    std::string worst_event;
};

constexpr double kDefaultValidationThreshold = 0.05;  // pu^2 on mse_total

/// Replays the fitted equivalent on each event and scores Eq-style MSE in
/// per-unit over the event window. A failing event is recorded without
/// aborting the others and forces a retune verdict.
inline ValidationReport validate(const ParameterSet& fitted,
                                 const std::vector<ValidationEvent>& events, double threshold,
                                 const SimConfig& cfg = {}) {
    if (events.empty()) throw ConfigError("validation needs at least one event");
    ValidationReport report;
    report.threshold = threshold;

    const double s_base = fitted.get("s_base");
    bool all_ok = true;
    double worst = -1.0;
    for (const auto& ev : events) {
        EventResult r;
        r.label = ev.label;
        r.window = ev.window;
        try {
            const OutputTrajectory traj = simulate_playin(fitted, ev.series, cfg);
            auto [first, last] = window_index_range(ev.series, ev.window);
            std::vector<double> p_meas, p_hat, q_meas, q_hat;
            for (std::size_t k = first; k <= last; ++k) {
                p_meas.push_back(ev.series.p[k] / s_base);
                p_hat.push_back(traj.p_hat[k] / s_base);
                q_meas.push_back(ev.series.q[k] / s_base);
                q_hat.push_back(traj.q_hat[k] / s_base);
            }
            r.mse_p = mse(p_meas, p_hat);
            r.mse_q = mse(q_meas, q_hat);
            r.mse_total = r.mse_p + r.mse_q;
            r.simulated = true;
            if (r.mse_total > threshold) all_ok = false;
            if (r.mse_total > worst) {
                worst = r.mse_total;
                report.worst_event = r.label;
            }
        } catch (const std::exception& e) {
            r.error = e.what();
            all_ok = false;
            report.worst_event = r.label;
        }
        report.events.push_back(std::move(r));
    }
    report.verdict = all_ok ? ValidationReport::Verdict::validated
                            : ValidationReport::Verdict::retune_required;
    return report;
}

/// CSV with one row per event, mirroring the report table layout.
inline void save_validation_report(const ValidationReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    out << "# threshold = " << format_double(report.threshold) << "\n";
    out << "# verdict = "
        << (report.verdict == ValidationReport::Verdict::validated ? "validated"
                                                                   : "retune_required")
        << "\n";
    out << "event,t_start,t_end,mse_p,mse_q,mse_total,status\n";
    for (const auto& e : report.events) {
        out << e.label << ',' << format_double(e.window.t_start) << ','
            << format_double(e.window.t_end) << ',' << format_double(e.mse_p) << ','
            << format_double(e.mse_q) << ',' << format_double(e.mse_total) << ','
            << (e.simulated ? "ok" : "failed") << '\n';
    }
    if (!out) throw ParseError("write failed for '" + path + "'");
}

/// Measured-vs-simulated curves for one event: t,p_meas,p_hat,q_meas,q_hat.
inline void emit_comparison(const ParameterSet& fitted, const PccTimeSeries& event,
                            const std::string& path, const SimConfig& cfg = {}) {
    const OutputTrajectory traj = simulate_playin(fitted, event, cfg);
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    out << "t,p_meas,p_hat,q_meas,q_hat\n";
    for (std::size_t k = 0; k < event.size(); ++k) {
        out << format_double(event.time_at(k)) << ',' << format_double(event.p[k]) << ','
            << format_double(traj.p_hat[k]) << ',' << format_double(event.q[k]) << ','
            << format_double(traj.q_hat[k]) << '\n';
    }
    if (!out) throw ParseError("write failed for '" + path + "'");
}

}  // namespace mgequiv
