#include "battmdp/battery_pricing.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace battmdp {

void BatteryParams::validate() const {
    if (!(capacity_kwh > 0)) throw std::invalid_argument("battery capacity must be positive");
    if (!(efficiency > 0 && efficiency <= 1)) {
        throw std::invalid_argument("efficiency must lie in (0, 1]");
    }
    if (!(initial_soc >= 0 && initial_soc <= 1)) {
        throw std::invalid_argument("initial SoC must lie in [0, 1]");
    }
}

const char* to_string(PricingKind k) {
    switch (k) {
        case PricingKind::TouA: return "tou_a";
        case PricingKind::RealtimeB: return "realtime_b";
        case PricingKind::EnergyLimitC: return "energy_limit_c";
        case PricingKind::PeakD: return "peak_d";
    }
    return "unknown";
}

PricingKind pricing_kind_from_string(const std::string& name) {
    if (name == "tou_a" || name == "A" || name == "a") return PricingKind::TouA;
    if (name == "realtime_b" || name == "B" || name == "b") return PricingKind::RealtimeB;
    if (name == "energy_limit_c" || name == "C" || name == "c") return PricingKind::EnergyLimitC;
    if (name == "peak_d" || name == "D" || name == "d") return PricingKind::PeakD;
    throw std::invalid_argument("unknown pricing kind '" + name + "'");
}

void PricingPolicy::validate() const {
    auto check = [](double v, const char* what) {
        if (!(v >= 0) || !std::isfinite(v)) {
            throw std::invalid_argument(std::string(what) + " must be a finite nonnegative value");
        }
    };
    for (double v : tou_schedule) check(v, "TOU price");
    for (double v : realtime_prices) check(v, "realtime price");
    check(low_price, "low price");
    check(high_price, "high price");
    check(energy_price, "energy price");
    check(peak_price, "peak price");
    if (!(limit_kwh > 0)) throw std::invalid_argument("energy limit must be positive");
}

PricingPolicy PricingPolicy::tou_a(double off_peak, double peak, double shoulder) {
    PricingPolicy p;
    p.kind = PricingKind::TouA;
    for (int h = 0; h < 24; ++h) {
        p.tou_schedule[h] = (h >= 7 && h < 14) ? off_peak : (h >= 14 && h < 20) ? peak : shoulder;
    }
    return p;
}

PricingPolicy PricingPolicy::realtime_b(const std::array<double, 24>& prices) {
    PricingPolicy p;
    p.kind = PricingKind::RealtimeB;
    p.realtime_prices = prices;
    return p;
}

// Synthetic hourly curve for tests and demos: cheap overnight, a morning
// ramp, and an expensive early-evening spike.
PricingPolicy PricingPolicy::realtime_b_default() {
    return realtime_b({0.04, 0.04, 0.03, 0.03, 0.03, 0.04, 0.06, 0.09,
                       0.11, 0.10, 0.09, 0.08, 0.08, 0.09, 0.11, 0.14,
                       0.18, 0.22, 0.25, 0.21, 0.15, 0.10, 0.07, 0.05});
}

PricingPolicy PricingPolicy::energy_limit_c(double limit_kwh, double low, double high) {
    PricingPolicy p;
    p.kind = PricingKind::EnergyLimitC;
    p.limit_kwh = limit_kwh;
    p.low_price = low;
    p.high_price = high;
    return p;
}

PricingPolicy PricingPolicy::peak_d(double energy_price, double peak_price) {
    PricingPolicy p;
    p.kind = PricingKind::PeakD;
    p.energy_price = energy_price;
    p.peak_price = peak_price;
    return p;
}

CostCase CostCase::from_id(int id) {
    switch (id) {
        case 1: return {1, false, true};
        case 2: return {2, true, true};
        case 3: return {3, true, false};
    }
    throw std::invalid_argument("case id must be 1, 2 or 3");
}

double battery_energy(double u, const BatteryParams& battery, const CostCase& cost_case) {
    if (std::abs(u) > 1.0 + 1e-12) throw std::invalid_argument("|u| must be <= 1");
    if (!cost_case.apply_losses) return battery.capacity_kwh * u;
    const double eta = battery.efficiency;
    return battery.capacity_kwh * std::max(eta * u, u / eta);
}

double step_energy(double prev_stored_kwh, double u, const BatteryParams& battery) {
    return prev_stored_kwh + battery.capacity_kwh * u;
}

double hourly_cost(double grid_kwh, int hour_state, const PricingPolicy& policy,
                   const CostCase& cost_case) {
    if (hour_state < 1 || hour_state > 24) throw std::invalid_argument("hour outside 1..24");
    if (!cost_case.refund_exports && grid_kwh < 0) return 0.0;
    switch (policy.kind) {
        case PricingKind::TouA: return policy.tou_schedule[hour_state - 1] * grid_kwh;
        case PricingKind::RealtimeB: return policy.realtime_prices[hour_state - 1] * grid_kwh;
        case PricingKind::EnergyLimitC:
            return (grid_kwh > policy.limit_kwh ? policy.high_price : policy.low_price) * grid_kwh;
        case PricingKind::PeakD: return policy.energy_price * grid_kwh;
    }
    throw std::logic_error("bad pricing kind");
}

std::array<double, 21> action_energy_table(const BatteryParams& battery,
                                           const CostCase& cost_case) {
    std::array<double, 21> e{};
    for (int k = 1; k <= 21; ++k) {
        e[k - 1] = battery_energy((k - 11) / 10.0, battery, cost_case);
    }
    return e;
}

CostTensor build_cost_tensor(const QuantileSet& qset, const BatteryParams& battery,
                             const PricingPolicy& policy, const CostCase& cost_case,
                             const PeakThresholds* thresholds, double penalty) {
    battery.validate();
    policy.validate();
    if (policy.uses_peak_axis() && !thresholds) {
        throw std::invalid_argument("peak pricing needs peak thresholds");
    }

    CostTensor tensor;
    tensor.space = thresholds ? StateSpace::with_peaks(thresholds->count()) : StateSpace::basic();
    tensor.penalty = penalty;
    tensor.values.assign(tensor.space.variable_count(), 0.0);

    const DemandTable demand = build_demand_table(qset);
    const auto energy = action_energy_table(battery, cost_case);

    std::array<std::vector<std::uint8_t>, 21> flags;
    for (int k = 1; k <= 21; ++k) flags[k - 1] = soc_transition(k).infeasible;

    const StateSpace& space = tensor.space;
    for (int i = 1; i <= 24; ++i) {
        for (int q = 1; q <= 9; ++q) {
            const double load = demand.at(i, q);
            for (int k = 1; k <= 21; ++k) {
                const double e_g = grid_energy(load, energy[k - 1]);
                const double base = hourly_cost(e_g, i, policy, cost_case);
                for (int j = 0; j < space.n_soc; ++j) {
                    const double with_penalty = base + (flags[k - 1][j] ? penalty : 0.0);
                    if (!thresholds) {
                        tensor.values[space.var_index(space.state_index(i, j, q), k)] =
                            with_penalty;
                        continue;
                    }
                    for (int r = 1; r <= space.n_peaks; ++r) {
                        // incremental peak charge of the (pre-reset) move
                        double accrual = 0.0;
                        if (policy.kind == PricingKind::PeakD) {
                            const int dest_r = peak_destination(r, e_g, *thresholds);
                            accrual = policy.peak_price * (thresholds->representative(dest_r) -
                                                           thresholds->representative(r));
                        }
                        tensor.values[space.var_index(space.state_index(i, j, q, r), k)] =
                            with_penalty + accrual;
                    }
                }
            }
        }
    }
    return tensor;
}

void write_cost_tensor_csv(const CostTensor& tensor, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << (tensor.space.has_peak() ? "hour,soc,quantile,peak,action,cost\n"
                                    : "hour,soc,quantile,action,cost\n");
    char buf[40];
    for (std::int64_t s = 0; s < tensor.space.n_states(); ++s) {
        int i, j, q, r;
        tensor.space.decode_state(s, i, j, q, r);
        for (int k = 1; k <= tensor.space.n_actions; ++k) {
            std::snprintf(buf, sizeof(buf), "%.15g", tensor.at(s, k));
            out << i << ',' << j << ',' << q << ',';
            if (tensor.space.has_peak()) out << r << ',';
            out << k << ',' << buf << '\n';
        }
    }
}

}  // namespace battmdp
