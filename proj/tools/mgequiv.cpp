// Command-line front end: synthesize scenarios, replay the equivalent,
// rank parameter sensitivities, run the two-stage estimation and validate
// fitted models. Exit codes: 0 success/validated, 2 retune required,
// 1 error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mgequiv/csv_io.hpp"
#include "mgequiv/estimator.hpp"
#include "mgequiv/pipeline.hpp"
#include "mgequiv/scenario.hpp"
#include "mgequiv/sensitivity.hpp"
#include "mgequiv/validation.hpp"

namespace {

using namespace mgequiv;

int cmd_synth(const std::string& params_path, const std::string& fault, const std::string& span,
              double dt, const std::string& out) {
    const ParameterSet ps = load_parameter_set(params_path);
    const FaultTemplate ft = detail::parse_fault_template(fault);
    const ScenarioSpan sp = detail::parse_span(span, dt);
    const PccTimeSeries series = synth_scenario(ps, ft, sp);
    save_pcc_csv(series, out);
    std::cout << "wrote " << series.size() << " samples to " << out << "\n";
    return 0;
}

int cmd_simulate(const std::string& params_path, const std::string& input_path,
                 const std::string& out, double dt_int, const std::string& method) {
    const ParameterSet ps = load_parameter_set(params_path);
    const PccTimeSeries input = load_pcc_csv(input_path, ps.base());
    SimConfig cfg;
    cfg.dt_int = dt_int;
    cfg.method = method == "trapezoidal" ? IntegrationMethod::trapezoidal
                                         : IntegrationMethod::rk4;
    const OutputTrajectory traj = simulate_playin(ps, input, cfg);
    std::ofstream os(out);
    if (!os) throw ParseError("cannot open '" + out + "' for writing");
    os << "t,p_hat,q_hat\n";
    for (std::size_t k = 0; k < traj.t.size(); ++k)
        os << format_double(traj.t[k]) << ',' << format_double(traj.p_hat[k]) << ','
           << format_double(traj.q_hat[k]) << '\n';
    std::cout << "wrote " << traj.t.size() << " samples to " << out << "\n";
    return 0;
}

int cmd_rank(const std::string& params_path, const std::string& input_path,
             const std::string& window, double rel_step, const std::string& out) {
    const ParameterSet ps = load_parameter_set(params_path);
    const PccTimeSeries input = load_pcc_csv(input_path, ps.base());
    const Window w = detail::parse_window(window);
    const SensitivityRanking ranking = rank_parameters(ps, input, w, rel_step);
    save_ranking_csv(ranking, out);
    std::cout << "ranked " << ranking.entries.size() << " parameters into " << out << "\n";
    return 0;
}

int cmd_estimate(const std::string& params_path, const std::string& input_path,
                 const std::string& stage1_w, const std::string& stage2_w, std::uint64_t seed,
                 const std::string& out, const std::string& trace,
                 const std::string& stage1_names, const std::string& stage2_names) {
    const ParameterSet ps = load_parameter_set(params_path);
    const PccTimeSeries input = load_pcc_csv(input_path, ps.base());
    StagePolicy s1 = default_stage1_policy(seed);
    StagePolicy s2 = default_stage2_policy(seed + 1);
    if (!stage1_names.empty()) s1.free = detail::split_names(stage1_names);
    if (!stage2_names.empty()) s2.free = detail::split_names(stage2_names);
    const TwoStageResult res = two_stage_estimate(ps, input, detail::parse_window(stage1_w),
                                                  detail::parse_window(stage2_w), s1, s2);
    save_parameter_set(res.fitted, out);
    if (!trace.empty()) save_history_csv(res, trace);
    std::cout << "stage1 eps = " << format_double(res.stage1.best_eps)
              << ", stage2 eps = " << format_double(res.stage2.best_eps) << "\n"
              << "fitted parameters written to " << out << "\n";
    return 0;
}

int cmd_validate(const std::string& params_path, const std::vector<std::string>& event_paths,
                 const std::vector<std::string>& windows, double threshold,
                 const std::string& out, const std::string& curves_dir) {
    if (event_paths.size() != windows.size())
        throw ConfigError("each --event needs a matching --window");
    const ParameterSet ps = load_parameter_set(params_path);
    std::vector<ValidationEvent> events;
    for (std::size_t i = 0; i < event_paths.size(); ++i) {
        ValidationEvent ev;
        ev.label = std::filesystem::path(event_paths[i]).stem().string();
        ev.series = load_pcc_csv(event_paths[i], ps.base());
        ev.window = detail::parse_window(windows[i]);
        events.push_back(std::move(ev));
    }
    const ValidationReport report = validate(ps, events, threshold);
    save_validation_report(report, out);
    if (!curves_dir.empty()) {
        std::filesystem::create_directories(curves_dir);
        for (const auto& ev : events)
            emit_comparison(ps, ev.series,
                            (std::filesystem::path(curves_dir) /
                             ("comparison_" + ev.label + ".csv"))
                                .string());
    }
    const bool ok = report.verdict == ValidationReport::Verdict::validated;
    std::cout << "verdict: " << (ok ? "validated" : "retune_required") << " (worst event: "
              << report.worst_event << ")\n";
    return ok ? 0 : 2;
}

int cmd_pipeline(const std::string& scenario_path, const std::string& out_dir) {
    const ScenarioConfig sc = load_scenario(scenario_path);
    const std::string dir = out_dir.empty()
                                ? std::filesystem::path(scenario_path).parent_path().string()
                                : out_dir;
    const PipelineResult res = run_pipeline(sc, dir.empty() ? "." : dir);
    std::cout << "stage1 eps = " << format_double(res.estimation.stage1.best_eps)
              << ", stage2 eps = " << format_double(res.estimation.stage2.best_eps) << "\n";
    for (const auto& a : res.artifacts) std::cout << "artifact: " << a << "\n";
    std::cout << "verdict: "
              << (res.exit_code == 0 ? "validated" : "retune_required") << "\n";
    return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gray-box dynamic equivalents of grid-connected microgrids"};
    app.require_subcommand(1);

    std::string params_path, input_path, out, trace, fault, span = "9:14", window;
    std::string stage1_w, stage2_w, stage1_names, stage2_names, method = "rk4";
    std::string scenario_path, out_dir, curves_dir;
    std::vector<std::string> event_paths, windows;
    double dt = 0.01, dt_int = 1e-3, rel_step = 0.01;
    double threshold = mgequiv::kDefaultValidationThreshold;
    std::uint64_t seed = 0;

    auto* synth = app.add_subcommand("synth", "Synthesize a fault scenario CSV");
    synth->add_option("--params", params_path, "parameter file")->required();
    synth->add_option("--fault", fault, "t=..,dur=..,vsag=..[,fdip=..,ambv=..]")->required();
    synth->add_option("--span", span, "time span t0:t1");
    synth->add_option("--dt", dt, "sample interval, s");
    synth->add_option("--out", out, "output CSV")->required();

    auto* simulate = app.add_subcommand("simulate", "Replay recorded (V,f) through the model");
    simulate->add_option("--params", params_path)->required();
    simulate->add_option("--input", input_path, "PCC CSV")->required();
    simulate->add_option("--out", out, "output CSV (t,p_hat,q_hat)")->required();
    simulate->add_option("--dt-int", dt_int, "internal step, s");
    simulate->add_option("--method", method, "rk4 | trapezoidal");

    auto* rank = app.add_subcommand("rank", "Rank parameter sensitivities over a window");
    rank->add_option("--params", params_path)->required();
    rank->add_option("--input", input_path)->required();
    rank->add_option("--window", window, "t0:t1")->required();
    rank->add_option("--rel-step", rel_step, "relative perturbation");
    rank->add_option("--out", out, "ranking CSV")->required();

    auto* estimate = app.add_subcommand("estimate", "Two-stage DE parameter estimation");
    estimate->add_option("--params", params_path)->required();
    estimate->add_option("--input", input_path)->required();
    estimate->add_option("--stage1", stage1_w, "pre-disturbance window t0:t1")->required();
    estimate->add_option("--stage2", stage2_w, "disturbance window t0:t1")->required();
    estimate->add_option("--seed", seed, "RNG seed");
    estimate->add_option("--out", out, "fitted parameter file")->required();
    estimate->add_option("--trace", trace, "objective history CSV");
    estimate->add_option("--stage1-params", stage1_names, "comma-separated free set");
    estimate->add_option("--stage2-params", stage2_names, "comma-separated free set");

    auto* validate = app.add_subcommand("validate", "Score a fitted model on held-out events");
    validate->add_option("--params", params_path)->required();
    validate->add_option("--event", event_paths, "event CSV (repeatable)")->required();
    validate->add_option("--window", windows, "t0:t1 per event (repeatable)")->required();
    validate->add_option("--threshold", threshold, "mse_total acceptance bound, pu^2");
    validate->add_option("--out", out, "report CSV")->required();
    validate->add_option("--emit-curves", curves_dir, "directory for comparison curves");

    auto* pipeline = app.add_subcommand("pipeline", "Run a declarative scenario end to end");
    pipeline->add_option("scenario", scenario_path, "scenario file")->required();
    pipeline->add_option("--out-dir", out_dir, "artifact directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) return cmd_synth(params_path, fault, span, dt, out);
        if (simulate->parsed()) return cmd_simulate(params_path, input_path, out, dt_int, method);
        if (rank->parsed()) return cmd_rank(params_path, input_path, window, rel_step, out);
        if (estimate->parsed())
            return cmd_estimate(params_path, input_path, stage1_w, stage2_w, seed, out, trace,
                                stage1_names, stage2_names);
        if (validate->parsed())
            return cmd_validate(params_path, event_paths, windows, threshold, out, curves_dir);
        if (pipeline->parsed()) return cmd_pipeline(scenario_path, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
