#include "battmdp/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace battmdp {

namespace {

// One pass over the test year. `next_u` yields the requested charge rate for
// the hour given the execution state; the correction of Eq-26 style clamping
// is applied before accounting.
template <typename NextU>
SimulationResult run_hours(const LoadSeries& test, const BatteryParams& battery,
                           const PricingPolicy& pricing, const CostCase& cost_case,
                           NextU&& next_u) {
    test.validate();
    battery.validate();
    pricing.validate();

    SimulationResult result;
    result.hourly_trace.reserve(test.size());
    result.daily_peaks.reserve(test.n_days());

    ExecutionState state;
    state.stored_kwh = battery.initial_soc * battery.capacity_kwh;
    double running_peak = 0.0;

    for (std::size_t p = 0; p < test.size(); ++p) {
        state.hour = test.hour_of_day(p) + 1;
        state.day_index = static_cast<int>(p / 24);
        state.peak_so_far = running_peak;
        const double load = test.values_kwh[p];

        const double u_requested = next_u(state, p, load);
        const auto [stored_next, u] = correct_step(state.stored_kwh, u_requested, battery);
        if (u != u_requested) ++result.corrections_applied;

        const double e_b = battery_energy(u, battery, cost_case);
        const double e_g = grid_energy(load, e_b);
        const double cost = hourly_cost(e_g, state.hour, pricing, cost_case);

        result.hourly_trace.push_back({load, u, e_b, e_g, stored_next, cost});
        result.energy_cost += cost;
        state.stored_kwh = stored_next;

        running_peak = std::max(running_peak, e_g);
        if ((p + 1) % 24 == 0) {
            result.daily_peaks.push_back(running_peak);
            running_peak = 0.0;
        }
    }

    result.bill_total = result.energy_cost;
    if (pricing.kind == PricingKind::PeakD) {
        for (double peak : result.daily_peaks) {
            result.peak_charge += pricing.peak_price * std::max(0.0, peak);
        }
        result.bill_total += result.peak_charge;
    }
    return result;
}

}  // namespace

SimulationResult simulate_year(const Policy& policy, const LoadSeries& test,
                               const QuantileSet& qset, const BatteryParams& battery,
                               const PricingPolicy& pricing, const CostCase& cost_case,
                               std::uint64_t seed, const PeakThresholds* thresholds) {
    if (policy.space().has_peak() != (thresholds != nullptr)) {
        throw std::invalid_argument("policy peak axis does not match the supplied thresholds");
    }
    if (pricing.uses_peak_axis() && !policy.space().has_peak()) {
        throw std::invalid_argument("peak pricing needs a peak-aware policy");
    }
    std::mt19937_64 rng(seed);
    SimulationResult result = run_hours(
        test, battery, pricing, cost_case,
        [&](ExecutionState& state, std::size_t p, double load) {
            const double t = test.start.hour + static_cast<double>(p);
            state.quantile = assign_quantile(qset, load, t);
            return sample_action(policy, state, battery, thresholds, rng);
        });
    result.bill_without_battery = bill_without_battery(test, pricing, cost_case);
    result.saving = result.bill_without_battery - result.bill_total;
    return result;
}

SimulationResult run_schedule(const LoadSeries& test, std::span<const double> u_requested,
                              const BatteryParams& battery, const PricingPolicy& pricing,
                              const CostCase& cost_case) {
    if (u_requested.size() != test.size()) {
        throw std::invalid_argument("schedule length does not match the series");
    }
    SimulationResult result =
        run_hours(test, battery, pricing, cost_case,
                  [&](const ExecutionState&, std::size_t p, double) { return u_requested[p]; });
    result.bill_without_battery = bill_without_battery(test, pricing, cost_case);
    result.saving = result.bill_without_battery - result.bill_total;
    return result;
}

double daily_peak(std::span<const double> day_grid_energy) {
    if (day_grid_energy.size() != 24) {
        throw std::invalid_argument("daily peak needs exactly 24 hourly values");
    }
    return *std::max_element(day_grid_energy.begin(), day_grid_energy.end());
}

double bill_without_battery(const LoadSeries& test, const PricingPolicy& pricing,
                            const CostCase& cost_case) {
    // u == 0 throughout, so the battery parameters are irrelevant
    SimulationResult inert =
        run_hours(test, BatteryParams{}, pricing, cost_case,
                  [](const ExecutionState&, std::size_t, double) { return 0.0; });
    return inert.bill_total;
}

EfficiencyReport efficiency(const SimulationResult& mdp, const SimulationResult& ideal) {
    EfficiencyReport report;
    report.mdp_saving = mdp.saving;
    report.ideal_saving = ideal.saving;
    if (ideal.saving <= 0.0) {
        report.applicable = false;
        report.efficiency_pct = 0.0;
    } else {
        report.efficiency_pct = 100.0 * mdp.saving / ideal.saving;
    }
    return report;
}

void save_simulation_json(const SimulationResult& result, const std::string& path) {
    nlohmann::json j = {{"bill_without_battery", result.bill_without_battery},
                        {"bill_total", result.bill_total},
                        {"saving", result.saving},
                        {"energy_cost", result.energy_cost},
                        {"peak_charge", result.peak_charge},
                        {"corrections_applied", result.corrections_applied},
                        {"hours", result.hourly_trace.size()},
                        {"daily_peaks", result.daily_peaks}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

SimulationResult load_simulation_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    SimulationResult r;
    r.bill_without_battery = j.at("bill_without_battery").get<double>();
    r.bill_total = j.at("bill_total").get<double>();
    r.saving = j.at("saving").get<double>();
    r.energy_cost = j.value("energy_cost", 0.0);
    r.peak_charge = j.value("peak_charge", 0.0);
    r.corrections_applied = j.value("corrections_applied", std::int64_t{0});
    r.daily_peaks = j.value("daily_peaks", std::vector<double>{});
    return r;
}

void save_trace_csv(const SimulationResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "hour,load,u,battery_energy,grid_energy,stored,cost\n";
    char buf[256];
    for (std::size_t p = 0; p < result.hourly_trace.size(); ++p) {
        const HourRecord& h = result.hourly_trace[p];
        std::snprintf(buf, sizeof(buf), "%zu,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", p + 1,
                      h.load, h.u, h.battery_energy, h.grid_energy, h.stored, h.cost);
        out << buf;
    }
}

void save_daily_peaks_csv(const SimulationResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "day,peak_kwh\n";
    char buf[64];
    for (std::size_t d = 0; d < result.daily_peaks.size(); ++d) {
        std::snprintf(buf, sizeof(buf), "%zu,%.10g\n", d + 1, result.daily_peaks[d]);
        out << buf;
    }
}

void save_efficiency_json(const EfficiencyReport& report, const std::string& path) {
    nlohmann::json j = {{"mdp_saving", report.mdp_saving},
                        {"ideal_saving", report.ideal_saving},
                        {"applicable", report.applicable}};
    if (report.applicable) {
        j["efficiency_pct"] = report.efficiency_pct;
    } else {
        j["efficiency_pct"] = nullptr;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

}  // namespace battmdp
