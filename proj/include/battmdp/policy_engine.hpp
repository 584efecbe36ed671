#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "battmdp/battery_pricing.hpp"
#include "battmdp/lp_core.hpp"
#include "battmdp/markov_chain.hpp"
#include "battmdp/state_space.hpp"

namespace battmdp {

// Per-state action distribution extracted from the occupancy solution.
// States whose occupancy mass is below the zero-mass threshold carry no
// entries and fall back to the no-op default action.
class Policy {
public:
    struct Entry {
        std::int16_t action_k;
        double prob;
    };

    Policy() = default;
    Policy(StateSpace space, std::vector<std::int32_t> start, std::vector<Entry> entries)
        : space_(space), start_(std::move(start)), entries_(std::move(entries)) {}

    const StateSpace& space() const { return space_; }
    int default_action() const { return space_.no_op_action(); }
    bool zero_mass(std::int64_t s) const { return start_[s] == start_[s + 1]; }
    std::span<const Entry> distribution(std::int64_t s) const {
        return {entries_.data() + start_[s], static_cast<std::size_t>(start_[s + 1] - start_[s])};
    }
    std::int64_t supported_states() const;

private:
    StateSpace space_;
    std::vector<std::int32_t> start_;  // n_states + 1 offsets
    std::vector<Entry> entries_;
};

// Continuous execution-time state. Stored energy is tracked in kWh and only
// snapped to the SoC grid for the policy lookup.
struct ExecutionState {
    int hour = 1;             // 1..24
    double stored_kwh = 0.0;  // within [0, capacity] after correction
    int quantile = 1;         // 1..9
    double peak_so_far = 0.0; // running daily max of grid energy (peak runs)
    int day_index = 0;
};

constexpr double zero_mass_threshold = 1e-12;

// Normalizes each state's occupancy slice into a distribution; entries below
// the threshold are dropped first and states with (almost) no mass stay
// empty.
Policy extract_policy(const lp::LpSolution& y, const StateSpace& space);

// Snap a continuous stored-energy level to the nearest SoC grid index.
int soc_grid_index(double stored_kwh, const BatteryParams& battery, int n_soc = 11);

// Charge rate for the state. Deterministic states consume no randomness;
// probabilistic states sample by inverse CDF.
double sample_action(const Policy& policy, const ExecutionState& state,
                     const BatteryParams& battery, const PeakThresholds* thresholds,
                     std::mt19937_64& rng);

// Feasibility correction of one storage step: clamps the raw update into
// [0, C_B] and shrinks u accordingly, so stored' = prev + C_B*u' always
// holds with stored' in bounds.
std::pair<double, double> correct_step(double prev_stored_kwh, double u,
                                       const BatteryParams& battery);

// CSV columns: hour,soc_index,quantile,peak_index,action_k,probability.
// peak_index is 0 for policies without a peak axis. Loading validates the
// file against the expected state space.
void save_policy_csv(const Policy& policy, const std::string& path);
Policy load_policy_csv(const std::string& path, const StateSpace& space);

}  // namespace battmdp
