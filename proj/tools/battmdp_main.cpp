// battmdp command-line tool: the full pipeline from load history to an
// executable charging policy and its efficiency report.
//
//   synth     generate a synthetic load history and write train/test CSVs
//   fit       fit the nine quantile curves on the training year
//   train     build and solve the dispatch MDP, extract the policy
//   simulate  run the policy hour by hour over the test year
//   ideal     perfect-foresight optimum over the test year
//   report    efficiency report (and the threshold sweep)
//
// Exit codes: 0 success, 2 config/input validation, 3 solver failure,
// 4 constraint-violation threshold exceeded.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "battmdp/ideal_oracle.hpp"
#include "battmdp/pipeline.hpp"
#include "battmdp/run_config.hpp"
#include "battmdp/simulator.hpp"

namespace fs = std::filesystem;
using namespace battmdp;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation = 2;
constexpr int exit_solver = 3;
constexpr int exit_violation = 4;

struct CliOverrides {
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<int> case_id;
    std::optional<std::string> pricing_kind;
    std::optional<int> relaxation_id;
    std::optional<int> n_waves;
    std::optional<std::uint64_t> seed;
    std::optional<int> horizon;
    bool export_mps = false;
    bool sweep = false;
};

RunConfig load_config(const CliOverrides& o) {
    RunConfig cfg = RunConfig::from_json_file(o.config_path);
    if (o.out_dir) cfg.out_dir = *o.out_dir;
    if (o.case_id) {
        cfg.case_id = *o.case_id;
        CostCase::from_id(cfg.case_id);
    }
    if (o.pricing_kind) {
        // flag override keeps default tariff parameters for the chosen kind
        nlohmann::json j = {{"kind", *o.pricing_kind}};
        RunConfig tmp = RunConfig::from_json_text(nlohmann::json{{"pricing", j}}.dump());
        cfg.pricing = tmp.pricing;
    }
    if (o.relaxation_id) cfg.relaxation_id = *o.relaxation_id;
    if (o.n_waves) cfg.n_waves = *o.n_waves;
    if (o.seed) cfg.seed = *o.seed;
    if (o.horizon) cfg.ideal_horizon_hours = *o.horizon;
    if (o.export_mps) cfg.export_mps = true;
    fs::create_directories(cfg.out_dir);
    return cfg;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
}

StateSpace policy_space(const RunConfig& cfg) {
    return cfg.peak_formulation() ? StateSpace::with_peaks(cfg.thresholds().count())
                                  : StateSpace::basic();
}

int cmd_synth(const RunConfig& cfg) {
    if (cfg.train_csv.empty() || cfg.test_csv.empty()) {
        throw std::invalid_argument("synth needs paths.train_csv and paths.test_csv");
    }
    const LoadSeries all = generate_synthetic(cfg.synthetic);
    const std::int64_t half_days = static_cast<std::int64_t>(all.n_days()) / 2;
    auto [train, test] = split_train_test(all, half_days * 24);
    write_csv(train, cfg.train_csv);
    write_csv(test, cfg.test_csv);
    std::fprintf(stderr, "synth: wrote %zu train hours to %s, %zu test hours to %s\n",
                 train.size(), cfg.train_csv.c_str(), test.size(), cfg.test_csv.c_str());
    return exit_ok;
}

int cmd_fit(const RunConfig& cfg) {
    const LoadSeries train = load_csv(cfg.train_csv);
    const QuantileSet qset = fit_quantile_set(train, cfg.n_waves, cfg.betas);
    save_quantile_set_json(qset, out_path(cfg, "quantiles.json"));
    for (const auto& m : qset.models) {
        std::fprintf(stderr, "fit: beta %.2f  n_waves %d  pinball loss %.6f\n", m.beta,
                     m.n_waves(), m.fit_loss);
    }
    return exit_ok;
}

TrainInputs make_train_inputs(const RunConfig& cfg, const QuantileSet& qset,
                              const LoadSeries& train) {
    TrainInputs in;
    in.qset = &qset;
    in.train = &train;
    in.battery = cfg.battery;
    in.pricing = cfg.pricing;
    in.cost_case = cfg.cost_case();
    in.relaxation_id = cfg.relaxation_id;
    in.peak_formulation = cfg.peak_formulation();
    in.thresholds = cfg.thresholds();
    in.solver = cfg.solver_options();
    return in;
}

int cmd_train(const RunConfig& cfg) {
    const LoadSeries train = load_csv(cfg.train_csv);
    const QuantileSet qset = load_quantile_set_json(out_path(cfg, "quantiles.json"));
    const TrainInputs in = make_train_inputs(cfg, qset, train);

    TrainResult result = train_policy(in);
    std::fprintf(stderr,
                 "train: %lld occupancy variables, %lld LP rows "
                 "(%lld constraints counting bounds), %lld simplex iterations\n",
                 static_cast<long long>(result.lp_vars),
                 static_cast<long long>(result.lp_rows),
                 static_cast<long long>(result.space.constraint_count()),
                 static_cast<long long>(result.solution.iterations));
    std::fprintf(stderr, "train: objective %.6f, policy support %lld of %lld states\n",
                 result.solution.objective,
                 static_cast<long long>(result.policy.supported_states()),
                 static_cast<long long>(result.space.n_states()));

    save_policy_csv(result.policy, out_path(cfg, "policy.csv"));
    save_violation_report_json(result.violations, out_path(cfg, "violations.json"));
    if (!result.violations.passed) {
        std::fprintf(stderr,
                     "train: solution violates the original equality constraints "
                     "(norm %.3e, balance %.3e)\n",
                     result.violations.max_normalization_violation,
                     result.violations.max_balance_violation);
        return exit_violation;
    }
    return exit_ok;
}

LoadSeries maybe_trim(const LoadSeries& series, int horizon) {
    if (horizon < 0) return series;
    if (horizon <= 0 || horizon % 24 != 0 ||
        horizon > static_cast<int>(series.size())) {
        throw std::invalid_argument("horizon must cover whole days within the series");
    }
    return LoadSeries{series.start,
                      {series.values_kwh.begin(), series.values_kwh.begin() + horizon}};
}

int cmd_simulate(const RunConfig& cfg) {
    const LoadSeries test = maybe_trim(load_csv(cfg.test_csv), cfg.ideal_horizon_hours);
    const QuantileSet qset = load_quantile_set_json(out_path(cfg, "quantiles.json"));
    const Policy policy = load_policy_csv(out_path(cfg, "policy.csv"), policy_space(cfg));
    const PeakThresholds thresholds = cfg.thresholds();
    const PeakThresholds* thr = policy.space().has_peak() ? &thresholds : nullptr;

    const SimulationResult sim = simulate_year(policy, test, qset, cfg.battery, cfg.pricing,
                                               cfg.cost_case(), cfg.seed, thr);
    save_simulation_json(sim, out_path(cfg, "sim.json"));
    save_trace_csv(sim, out_path(cfg, "trace.csv"));
    save_daily_peaks_csv(sim, out_path(cfg, "daily_peaks.csv"));
    std::fprintf(stderr,
                 "simulate: bill %.2f (baseline %.2f, saving %.2f), %lld corrections\n",
                 sim.bill_total, sim.bill_without_battery, sim.saving,
                 static_cast<long long>(sim.corrections_applied));
    return exit_ok;
}

int cmd_ideal(const RunConfig& cfg) {
    IdealProblemSpec spec;
    spec.load = load_csv(cfg.test_csv);
    spec.battery = cfg.battery;
    spec.pricing = cfg.pricing;
    spec.cost_case = cfg.cost_case();
    spec.horizon_hours = cfg.ideal_horizon_hours;

    if (cfg.export_mps) {
        lp::LpProblem program;
        switch (cfg.pricing.kind) {
            case PricingKind::TouA:
            case PricingKind::RealtimeB: program = build_policy_ab_lp(spec); break;
            case PricingKind::EnergyLimitC: program = build_policy_c_milp(spec); break;
            case PricingKind::PeakD: program = build_policy_d_program(spec); break;
        }
        lp::export_mps(program, out_path(cfg, "ideal.mps"));
        std::fprintf(stderr, "ideal: exported %d vars / %d rows (%d binaries) to %s\n",
                     program.num_vars(), program.num_rows(), program.num_binary(),
                     out_path(cfg, "ideal.mps").c_str());
        return exit_ok;
    }

    const IdealResult ideal = ideal_schedule(spec, cfg.solver_options());
    save_simulation_json(ideal.sim, out_path(cfg, "ideal.json"));
    save_trace_csv(ideal.sim, out_path(cfg, "ideal_trace.csv"));
    std::fprintf(stderr,
                 "ideal: bill %.2f (baseline %.2f, saving %.2f), replay gap %.2e, "
                 "%lld iterations, %lld nodes\n",
                 ideal.sim.bill_total, ideal.sim.bill_without_battery, ideal.sim.saving,
                 ideal.replay_gap, static_cast<long long>(ideal.solution.iterations),
                 static_cast<long long>(ideal.solution.nodes_explored));
    return exit_ok;
}

int write_profiles_csv(const RunConfig& cfg) {
    // plot-ready per-hour profile data joining the two traces when available
    std::ifstream sim_trace(out_path(cfg, "trace.csv"));
    std::ifstream ideal_trace(out_path(cfg, "ideal_trace.csv"));
    if (!sim_trace || !ideal_trace) return 0;
    std::ofstream out(out_path(cfg, "profiles.csv"));
    out << "hour,load,grid_energy_mdp,stored_mdp,grid_energy_ideal,stored_ideal\n";
    std::string a, b;
    std::getline(sim_trace, a);
    std::getline(ideal_trace, b);
    while (std::getline(sim_trace, a) && std::getline(ideal_trace, b)) {
        long h;
        double load, u, eb, eg, es, cost;
        if (std::sscanf(a.c_str(), "%ld,%lf,%lf,%lf,%lf,%lf,%lf", &h, &load, &u, &eb, &eg,
                        &es, &cost) != 7) break;
        double loadi, ui, ebi, egi, esi, costi;
        long hi;
        if (std::sscanf(b.c_str(), "%ld,%lf,%lf,%lf,%lf,%lf,%lf", &hi, &loadi, &ui, &ebi,
                        &egi, &esi, &costi) != 7) break;
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%ld,%.10g,%.10g,%.10g,%.10g,%.10g\n", h, load, eg,
                      es, egi, esi);
        out << buf;
    }
    return 0;
}

int cmd_report(const RunConfig& cfg, bool sweep) {
    if (sweep) {
        // policy-D efficiency across peak-threshold counts, Table-style CSV
        const LoadSeries train = load_csv(cfg.train_csv);
        const LoadSeries test = maybe_trim(load_csv(cfg.test_csv), cfg.ideal_horizon_hours);
        const QuantileSet qset = load_quantile_set_json(out_path(cfg, "quantiles.json"));

        IdealProblemSpec spec;
        spec.load = test;
        spec.battery = cfg.battery;
        spec.pricing = cfg.pricing;
        spec.cost_case = cfg.cost_case();
        const IdealResult ideal = ideal_schedule(spec, cfg.solver_options());

        std::ofstream out(out_path(cfg, "sweep.csv"));
        out << "thresholds,peak_increment_kw,efficiency_pct,variables,constraints,"
               "wall_time_s\n";
        for (int count : cfg.sweep_threshold_counts) {
            const auto start = std::chrono::steady_clock::now();
            TrainInputs in = make_train_inputs(cfg, qset, train);
            in.peak_formulation = true;
            in.thresholds = PeakThresholds::uniform(count);
            TrainResult tres = train_policy(in);
            const SimulationResult sim =
                simulate_year(tres.policy, test, qset, cfg.battery, cfg.pricing,
                              cfg.cost_case(), cfg.seed, &in.thresholds);
            const EfficiencyReport rep = efficiency(sim, ideal.sim);
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
            char buf[256];
            std::snprintf(buf, sizeof(buf), "%d,%.10g,%.4f,%lld,%lld,%.2f\n", count,
                          count > 1 ? 500.0 / (count - 1) : 0.0,
                          rep.applicable ? rep.efficiency_pct : 0.0,
                          static_cast<long long>(tres.space.variable_count()),
                          static_cast<long long>(tres.space.constraint_count()), secs);
            out << buf;
            std::fprintf(stderr, "sweep: %s", buf);
        }
        return exit_ok;
    }

    SimulationResult sim, ideal;
    try {
        sim = load_simulation_json(out_path(cfg, "sim.json"));
    } catch (const std::exception&) {
        throw std::invalid_argument("report needs sim.json; run `simulate` first");
    }
    try {
        ideal = load_simulation_json(out_path(cfg, "ideal.json"));
    } catch (const std::exception&) {
        throw std::invalid_argument("report needs ideal.json; run `ideal` first");
    }
    if (std::abs(sim.bill_without_battery - ideal.bill_without_battery) >
        1e-6 * (1.0 + std::abs(sim.bill_without_battery))) {
        throw std::invalid_argument(
            "sim.json and ideal.json disagree on the no-battery baseline; "
            "they were produced from different runs");
    }
    const EfficiencyReport rep = efficiency(sim, ideal);
    save_efficiency_json(rep, out_path(cfg, "efficiency.json"));
    write_profiles_csv(cfg);
    if (rep.applicable) {
        std::fprintf(stderr, "report: MDP saving %.2f / ideal saving %.2f -> %.2f%%\n",
                     rep.mdp_saving, rep.ideal_saving, rep.efficiency_pct);
    } else {
        std::fprintf(stderr, "report: ideal saving %.2f <= 0, efficiency not applicable\n",
                     rep.ideal_saving);
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"battery-dispatch MDP toolkit"};
    app.require_subcommand(1);

    CliOverrides o;
    app.add_option("--config", o.config_path, "JSON run configuration")->required();
    app.add_option("--out", o.out_dir, "output directory (overrides config)");
    app.add_option("--case", o.case_id, "cost case 1..3 (overrides config)");
    app.add_option("--pricing", o.pricing_kind, "pricing kind A|B|C|D (overrides config)");
    app.add_option("--relaxation", o.relaxation_id, "relaxation option 1..6");
    app.add_option("--n-waves", o.n_waves, "Fourier wave count for fitting");
    app.add_option("--seed", o.seed, "simulation seed");
    app.add_option("--horizon", o.horizon, "trim test data to the first H hours");

    auto* synth = app.add_subcommand("synth", "generate synthetic train/test CSVs");
    auto* fit = app.add_subcommand("fit", "fit quantile curves");
    auto* train = app.add_subcommand("train", "train the MDP policy");
    auto* simulate = app.add_subcommand("simulate", "simulate the policy on the test year");
    auto* ideal = app.add_subcommand("ideal", "perfect-foresight schedule on the test year");
    ideal->add_flag("--export-mps", o.export_mps, "write the program instead of solving");
    auto* report = app.add_subcommand("report", "efficiency report");
    report->add_flag("--sweep", o.sweep, "run the peak-threshold sweep");

    CLI11_PARSE(app, argc, argv);

    try {
        const RunConfig cfg = load_config(o);
        if (synth->parsed()) return cmd_synth(cfg);
        if (fit->parsed()) return cmd_fit(cfg);
        if (train->parsed()) return cmd_train(cfg);
        if (simulate->parsed()) return cmd_simulate(cfg);
        if (ideal->parsed()) return cmd_ideal(cfg);
        if (report->parsed()) return cmd_report(cfg, o.sweep);
    } catch (const SolverFailure& e) {
        std::fprintf(stderr, "error: %s (gap %.3e)\n", e.what(), e.gap);
        return exit_solver;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_validation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_solver;
    }
    return exit_ok;
}
