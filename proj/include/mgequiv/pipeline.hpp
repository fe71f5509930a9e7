#pragma once

// End-to-end batch pipeline: rank -> select -> two-stage estimate ->
// validate, driven by one declarative scenario file. All artifact files are
// written with stable formatting so identical runs are byte-identical.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mgequiv/csv_io.hpp"
#include "mgequiv/estimator.hpp"
#include "mgequiv/scenario.hpp"
#include "mgequiv/sensitivity.hpp"
#include "mgequiv/validation.hpp"

namespace mgequiv {

struct ScenarioConfig {
    std::string params_path;
    std::string input_path;  // measured CSV; empty when synthesizing
    std::optional<FaultTemplate> synth_fault;  // used when input_path is empty
    ScenarioSpan synth_span;

    Window stage1_window{9.0, 9.99};
    Window stage2_window{10.0, 14.0};
    StagePolicy stage1 = default_stage1_policy();
    StagePolicy stage2 = default_stage2_policy();

    double rel_step = 0.01;
    SelectPolicy select = SelectPolicy::top_k(20);

    struct EventSpec {
        std::string label;
        std::string path;  // measured CSV; empty when synthesizing
        std::optional<FaultTemplate> synth_fault;
        ScenarioSpan synth_span;
        Window window;
    };
    std::vector<EventSpec> events;  // validation disturbances

    double threshold = kDefaultValidationThreshold;
    std::uint64_t seed = 0;
    SimConfig sim;
};

struct PipelineResult {
    SensitivityRanking ranking;
    std::vector<std::string> selected;
    TwoStageResult estimation;
    ValidationReport report;
    std::vector<std::string> artifacts;  // paths written
    int exit_code = 1;  // 0 validated, 2 retune_required, 1 error
};

namespace detail {

inline Window parse_window(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw ConfigError("expected a window as t0:t1, got '" + text + "'");
    Window w;
    w.t_start = std::stod(text.substr(0, colon));
    w.t_end = std::stod(text.substr(colon + 1));
    w.validate();
    return w;
}

/// "t=10,dur=0.5,vsag=0.4[,fdip=...][,vpre=...][,tau=...][,ambv=...][,ambf=...]"
inline FaultTemplate parse_fault_template(const std::string& text) {
    FaultTemplate ft;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ConfigError("fault template items must be key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        const double value = std::stod(item.substr(eq + 1));
        if (key == "t") ft.t_fault = value;
        else if (key == "dur") ft.duration = value;
        else if (key == "vsag") ft.v_sag = value;
        else if (key == "fdip") ft.f_dip = value;
        else if (key == "vpre") ft.v_pre = value;
        else if (key == "tau") ft.recovery_tau = value;
        else if (key == "ftau") ft.f_recovery_tau = value;
        else if (key == "ambv") ft.ambient_v = value;
        else if (key == "ambf") ft.ambient_f = value;
        else throw ConfigError("unknown fault template key '" + key + "'");
    }
    ft.validate();
    return ft;
}

inline ScenarioSpan parse_span(const std::string& span_text, double dt) {
    const Window w = parse_window(span_text);
    ScenarioSpan span;
    span.t_begin = w.t_start;
    span.t_end = w.t_end;
    span.dt = dt;
    span.validate();
    return span;
}

inline std::vector<std::string> split_names(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto a = item.find_first_not_of(" \t");
        const auto b = item.find_last_not_of(" \t");
        if (a != std::string::npos) out.push_back(item.substr(a, b - a + 1));
    }
    return out;
}

}  // namespace detail

/// Parses the flat key = value scenario format. Paths are resolved relative
/// to the scenario file. Repeatable key: `event = label | csv-or-fault | t0:t1`.
inline ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario '" + path + "'");
    const std::filesystem::path dir = std::filesystem::path(path).parent_path();
    auto resolve = [&dir](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp.string() : (dir / fp).string();
    };

    ScenarioConfig sc;
    double synth_dt = 0.01;
    std::string synth_span_text = "9:14";
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected key = value");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "params") sc.params_path = resolve(value);
            else if (key == "input") sc.input_path = resolve(value);
            else if (key == "synth_fault") sc.synth_fault = detail::parse_fault_template(value);
            else if (key == "synth_span") synth_span_text = value;
            else if (key == "synth_dt") synth_dt = std::stod(value);
            else if (key == "stage1_window") sc.stage1_window = detail::parse_window(value);
            else if (key == "stage2_window") sc.stage2_window = detail::parse_window(value);
            else if (key == "stage1_params") sc.stage1.free = detail::split_names(value);
            else if (key == "stage2_params") sc.stage2.free = detail::split_names(value);
            else if (key == "stage1_pop") sc.stage1.de.population_size = std::stoul(value);
            else if (key == "stage2_pop") sc.stage2.de.population_size = std::stoul(value);
            else if (key == "stage1_fs") sc.stage1.de.f_s = std::stod(value);
            else if (key == "stage2_fs") sc.stage2.de.f_s = std::stod(value);
            else if (key == "stage1_cr") sc.stage1.de.c_r = std::stod(value);
            else if (key == "stage2_cr") sc.stage2.de.c_r = std::stod(value);
            else if (key == "stage1_generations") sc.stage1.de.max_generations = std::stoul(value);
            else if (key == "stage2_generations") sc.stage2.de.max_generations = std::stoul(value);
            else if (key == "stage1_target_eps") sc.stage1.de.target_eps = std::stod(value);
            else if (key == "stage2_target_eps") sc.stage2.de.target_eps = std::stod(value);
            else if (key == "rel_step") sc.rel_step = std::stod(value);
            else if (key == "select_top_k") sc.select = SelectPolicy::top_k(std::stoul(value));
            else if (key == "select_threshold") sc.select = SelectPolicy::threshold(std::stod(value));
            else if (key == "threshold") sc.threshold = std::stod(value);
            else if (key == "seed") sc.seed = std::stoull(value);
            else if (key == "dt_int") sc.sim.dt_int = std::stod(value);
            else if (key == "method")
                sc.sim.method = (value == "trapezoidal") ? IntegrationMethod::trapezoidal
                                                         : IntegrationMethod::rk4;
            else if (key == "event") {
                // label | csv path or fault template | window
                std::vector<std::string> parts;
                std::istringstream ev(value);
                std::string part;
                while (std::getline(ev, part, '|')) parts.push_back(trim(part));
                if (parts.size() != 3)
                    throw ConfigError("event needs 'label | source | t0:t1'");
                ScenarioConfig::EventSpec spec;
                spec.label = parts[0];
                if (parts[1].find('=') != std::string::npos)
                    spec.synth_fault = detail::parse_fault_template(parts[1]);
                else
                    spec.path = resolve(parts[1]);
                spec.window = detail::parse_window(parts[2]);
                sc.events.push_back(std::move(spec));
            } else {
                throw ConfigError("unknown scenario key '" + key + "'");
            }
        } catch (const std::invalid_argument&) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": bad value for '" + key + "'");
        }
    }
    sc.synth_span = detail::parse_span(synth_span_text, synth_dt);
    for (auto& ev : sc.events) ev.synth_span = sc.synth_span;
    if (sc.params_path.empty()) throw ConfigError("scenario is missing 'params'");
    if (sc.input_path.empty() && !sc.synth_fault)
        throw ConfigError("scenario needs either 'input' or 'synth_fault'");
    return sc;
}

inline void save_ranking_csv(const SensitivityRanking& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    out << "param,e_p,e_q,combined\n";
    for (const auto& e : r.entries)
        out << e.param << ',' << format_double(e.e_p) << ',' << format_double(e.e_q) << ','
            << format_double(e.combined) << '\n';
    if (!out) throw ParseError("write failed for '" + path + "'");
}

inline void save_history_csv(const TwoStageResult& est, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    out << "stage,generation,best_eps\n";
    for (std::size_t g = 0; g < est.stage1.history.size(); ++g)
        out << "1," << g << ',' << format_double(est.stage1.history[g]) << '\n';
    for (std::size_t g = 0; g < est.stage2.history.size(); ++g)
        out << "2," << g << ',' << format_double(est.stage2.history[g]) << '\n';
    if (!out) throw ParseError("write failed for '" + path + "'");
}

/// Executes the full identification flow and writes ranking.csv,
/// fitted.params, history.csv, report.csv and per-event comparison curves
/// into out_dir. Stage seeds derive from the scenario seed (seed, seed+1).
inline PipelineResult run_pipeline(const ScenarioConfig& sc_in, const std::string& out_dir) {
    ScenarioConfig sc = sc_in;
    std::filesystem::create_directories(out_dir);
    auto artifact = [&out_dir](const std::string& name) {
        return (std::filesystem::path(out_dir) / name).string();
    };

    PipelineResult result;
    const ParameterSet params = load_parameter_set(sc.params_path);
    const BaseSystem base = params.base();

    PccTimeSeries input;
    if (!sc.input_path.empty()) {
        input = load_pcc_csv(sc.input_path, base);
    } else {
        input = synth_scenario(params, *sc.synth_fault, sc.synth_span, sc.sim);
        save_pcc_csv(input, artifact("input.csv"));
        result.artifacts.push_back(artifact("input.csv"));
    }

    sc.stage1.de.seed = sc.seed;
    sc.stage2.de.seed = sc.seed + 1;

    // sensitivity ranking over the disturbance window guides the selection
    result.ranking = rank_parameters(params, input, sc.stage2_window, sc.rel_step, sc.sim);
    save_ranking_csv(result.ranking, artifact("ranking.csv"));
    result.artifacts.push_back(artifact("ranking.csv"));
    result.selected = select_parameters(result.ranking, sc.select);

    // estimation stages cover only selected parameters
    auto keep_selected = [&](std::vector<std::string>& names) {
        std::vector<std::string> kept;
        for (const auto& n : names)
            if (std::find(result.selected.begin(), result.selected.end(), n) !=
                result.selected.end())
                kept.push_back(n);
        names = kept;
    };
    keep_selected(sc.stage1.free);
    keep_selected(sc.stage2.free);

    result.estimation = two_stage_estimate(params, input, sc.stage1_window, sc.stage2_window,
                                           sc.stage1, sc.stage2, sc.sim);
    save_parameter_set(result.estimation.fitted, artifact("fitted.params"));
    result.artifacts.push_back(artifact("fitted.params"));
    save_history_csv(result.estimation, artifact("history.csv"));
    result.artifacts.push_back(artifact("history.csv"));

    // validation events: explicit list, else the fitting record itself
    std::vector<ValidationEvent> events;
    if (sc.events.empty()) {
        events.push_back({"fit", input, Window{input.t0, input.t_end()}});
    } else {
        for (const auto& spec : sc.events) {
            ValidationEvent ev;
            ev.label = spec.label;
            ev.window = spec.window;
            ev.series = spec.path.empty()
                            ? synth_scenario(params, *spec.synth_fault, spec.synth_span, sc.sim)
                            : load_pcc_csv(spec.path, base);
            events.push_back(std::move(ev));
        }
    }
    result.report = validate(result.estimation.fitted, events, sc.threshold, sc.sim);
    save_validation_report(result.report, artifact("report.csv"));
    result.artifacts.push_back(artifact("report.csv"));
    for (const auto& ev : events) {
        const std::string curve = artifact("comparison_" + ev.label + ".csv");
        emit_comparison(result.estimation.fitted, ev.series, curve, sc.sim);
        result.artifacts.push_back(curve);
    }

    result.exit_code =
        result.report.verdict == ValidationReport::Verdict::validated ? 0 : 2;
    return result;
}

}  // namespace mgequiv
