#pragma once

#include <array>
#include <string>
#include <vector>

#include "battmdp/markov_chain.hpp"
#include "battmdp/quantile_fourier.hpp"
#include "battmdp/state_space.hpp"

namespace battmdp {

struct BatteryParams {
    double capacity_kwh = 500.0;
    double efficiency = 0.92;   // charge/discharge efficiency, equal both ways
    double initial_soc = 1.0;

    void validate() const;
};

enum class PricingKind { TouA, RealtimeB, EnergyLimitC, PeakD };

const char* to_string(PricingKind k);
PricingKind pricing_kind_from_string(const std::string& name);

// Tariff parameters for the four policies. Hourly schedules are indexed by
// hour state (i-1), i.e. entry 0 prices the hour starting at 00:00.
struct PricingPolicy {
    PricingKind kind = PricingKind::TouA;
    std::array<double, 24> tou_schedule{};
    std::array<double, 24> realtime_prices{};
    double limit_kwh = 200.0;
    double low_price = 0.05;
    double high_price = 0.12;
    double energy_price = 0.05;
    double peak_price = 7.0;  // $/kW of daily peak

    void validate() const;
    bool uses_peak_axis() const { return kind == PricingKind::PeakD; }

    // Off-peak 07:00-14:00, peak 14:00-20:00, shoulder otherwise.
    static PricingPolicy tou_a(double off_peak = 0.05, double peak = 0.20,
                               double shoulder = 0.10);
    static PricingPolicy realtime_b(const std::array<double, 24>& prices);
    static PricingPolicy realtime_b_default();
    static PricingPolicy energy_limit_c(double limit_kwh = 200.0, double low = 0.05,
                                        double high = 0.12);
    static PricingPolicy peak_d(double energy_price = 0.05, double peak_price = 7.0);
};

// Loss/refund treatment. Case 1 ignores conversion losses and refunds
// exports, case 2 applies losses and refunds exports, case 3 applies losses
// and pays nothing for exports.
struct CostCase {
    int case_id = 2;
    bool apply_losses = true;
    bool refund_exports = true;

    static CostCase from_id(int id);
};

// Grid-side battery energy C_B * max(eta*u, u/eta) (just C_B*u when losses
// are ignored). Charging draws more than is stored; discharging delivers
// less than is drawn from the cells.
double battery_energy(double u, const BatteryParams& battery, const CostCase& cost_case);

inline double grid_energy(double load_kwh, double battery_kwh) { return load_kwh + battery_kwh; }

// Raw storage update prev + C_B*u; bound violations are the caller's to fix.
double step_energy(double prev_stored_kwh, double u, const BatteryParams& battery);

// Energy cost of one hour. Policy D prices energy only; its peak charge
// accrues separately. Without export refunds, negative grid energy costs 0.
double hourly_cost(double grid_kwh, int hour_state, const PricingPolicy& policy,
                   const CostCase& cost_case);

// Per-(state, action) cost including the flat infeasibility penalty and, on
// the peak axis, the incremental peak charge of the threshold move.
struct CostTensor {
    StateSpace space;
    std::vector<double> values;  // indexed by space.var_index
    double penalty = 1000.0;

    double at(std::int64_t state, int k) const { return values[space.var_index(state, k)]; }
};

CostTensor build_cost_tensor(const QuantileSet& qset, const BatteryParams& battery,
                             const PricingPolicy& policy, const CostCase& cost_case,
                             const PeakThresholds* thresholds = nullptr,
                             double penalty = 1000.0);

// Grid-side energies of all 21 actions under the case's loss rule.
std::array<double, 21> action_energy_table(const BatteryParams& battery,
                                           const CostCase& cost_case);

void write_cost_tensor_csv(const CostTensor& tensor, const std::string& path);

}  // namespace battmdp
