#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "battmdp/battery_pricing.hpp"
#include "battmdp/load_series.hpp"
#include "battmdp/policy_engine.hpp"
#include "battmdp/quantile_fourier.hpp"

namespace battmdp {

struct HourRecord {
    double load = 0.0;
    double u = 0.0;              // executed (corrected) charge rate
    double battery_energy = 0.0; // grid-side
    double grid_energy = 0.0;
    double stored = 0.0;         // after the step
    double cost = 0.0;           // energy cost of the hour
};

struct SimulationResult {
    double bill_total = 0.0;
    double bill_without_battery = 0.0;
    double saving = 0.0;
    double energy_cost = 0.0;
    double peak_charge = 0.0;  // peak-demand component (policy D), else 0
    std::vector<HourRecord> hourly_trace;
    std::vector<double> daily_peaks;  // raw max of grid energy per day
    std::int64_t corrections_applied = 0;
};

struct EfficiencyReport {
    double mdp_saving = 0.0;
    double ideal_saving = 0.0;
    double efficiency_pct = 0.0;
    bool applicable = true;  // false when the ideal saving is <= 0
};

// Hour-by-hour policy run over the test series: observe the load, assign its
// quantile, snap the state, sample the action, correct it, account the cost.
// Daily peaks reset at midnight; the policy-D bill adds the peak price times
// each day's (nonnegative) peak.
SimulationResult simulate_year(const Policy& policy, const LoadSeries& test,
                               const QuantileSet& qset, const BatteryParams& battery,
                               const PricingPolicy& pricing, const CostCase& cost_case,
                               std::uint64_t seed, const PeakThresholds* thresholds = nullptr);

// Same accounting for a fixed schedule of requested charge rates (one per
// hour); corrections still apply. Shared by the policy run, the no-battery
// baseline and the perfect-foresight replay.
SimulationResult run_schedule(const LoadSeries& test, std::span<const double> u_requested,
                              const BatteryParams& battery, const PricingPolicy& pricing,
                              const CostCase& cost_case);

double daily_peak(std::span<const double> day_grid_energy);

double bill_without_battery(const LoadSeries& test, const PricingPolicy& pricing,
                            const CostCase& cost_case);

EfficiencyReport efficiency(const SimulationResult& mdp, const SimulationResult& ideal);

void save_simulation_json(const SimulationResult& result, const std::string& path);
SimulationResult load_simulation_json(const std::string& path);
void save_trace_csv(const SimulationResult& result, const std::string& path);
void save_daily_peaks_csv(const SimulationResult& result, const std::string& path);
void save_efficiency_json(const EfficiencyReport& report, const std::string& path);

}  // namespace battmdp
