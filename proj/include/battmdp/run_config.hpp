#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "battmdp/battery_pricing.hpp"
#include "battmdp/load_series.hpp"
#include "battmdp/lp_core.hpp"

namespace battmdp {

// Run parameters for the pipeline commands, loaded from a JSON config file.
// Validation is strict: unknown keys anywhere are rejected (see
// docs/config.schema.json for the published schema).
struct RunConfig {
    // paths
    std::string train_csv;
    std::string test_csv;
    std::string out_dir = "out";

    BatteryParams battery;
    PricingPolicy pricing;
    int case_id = 2;

    // quantile fitting
    int n_waves = 100;
    std::vector<double> betas = default_betas();

    // peak-shaving formulation
    int peak_threshold_count = 6;
    std::optional<std::vector<double>> peak_boundaries;  // overrides the uniform grid
    std::optional<bool> use_peak_formulation;            // default: pricing D only

    int relaxation_id = 3;
    std::uint64_t seed = 12345;

    // solver limits
    std::int64_t iteration_limit = 2'000'000;
    std::int64_t node_limit = 1'000'000;

    // ideal-oracle options
    int ideal_horizon_hours = -1;
    bool export_mps = false;

    SyntheticLoadSpec synthetic;

    // report --sweep
    std::vector<int> sweep_threshold_counts = {6, 11, 21};

    CostCase cost_case() const { return CostCase::from_id(case_id); }
    PeakThresholds thresholds() const;
    bool peak_formulation() const {
        return use_peak_formulation.value_or(pricing.uses_peak_axis());
    }
    lp::SolverOptions solver_options() const;

    static RunConfig from_json_file(const std::string& path);
    static RunConfig from_json_text(const std::string& text);
};

}  // namespace battmdp
