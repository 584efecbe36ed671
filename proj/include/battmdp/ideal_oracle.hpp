#pragma once

#include <string>
#include <vector>

#include "battmdp/battery_pricing.hpp"
#include "battmdp/load_series.hpp"
#include "battmdp/lp_core.hpp"
#include "battmdp/simulator.hpp"

namespace battmdp {

// Perfect-foresight scheduling problem: the whole load series is known in
// advance and the charge-rate sequence is optimized directly. Its bill is
// the denominator of the policy-efficiency metric.
struct IdealProblemSpec {
    LoadSeries load;
    BatteryParams battery;
    PricingPolicy pricing;
    CostCase cost_case;
    int horizon_hours = -1;  // -1: the whole series (multiple of 24 for peak pricing)
    double big_m = -1.0;     // -1: max load + C_B/eta + 1

    int horizon() const;
    double effective_big_m() const;
    LoadSeries trimmed_load() const;
};

// Pure LP for the hourly-priced policies. The max() in the battery-energy
// model enters as two >= rows, which bind at any optimum because each hour's
// price is nonnegative; negative prices are rejected at build time. Without
// export refunds an auxiliary import variable g >= max(E_G, 0) carries the
// price instead of E_G.
lp::LpProblem build_policy_ab_lp(const IdealProblemSpec& spec);

// Tiered tariff: per hour a binary marks the high tier, switched by a big-M
// pair on the grid energy; the binary-times-energy product is linearized
// through an auxiliary variable with four bounding rows.
lp::LpProblem build_policy_c_milp(const IdealProblemSpec& spec);

// Energy price plus a per-day peak variable bounded below by every hour's
// grid energy; positive objective weight pins it to the daily maximum.
lp::LpProblem build_policy_d_program(const IdealProblemSpec& spec);

struct IdealResult {
    SimulationResult sim;          // replayed schedule with full accounting
    std::vector<double> schedule;  // optimized charge rates
    lp::LpSolution solution;
    double replay_gap = 0.0;       // |replayed bill - solver objective|
};

// Builds the per-policy program, solves it through lp_core, decodes u(t) and
// replays it through the simulator accounting. Non-optimal solver statuses
// propagate as exceptions carrying the gap.
IdealResult ideal_schedule(const IdealProblemSpec& spec, const lp::SolverOptions& options = {});

struct SolverFailure : std::runtime_error {
    lp::SolveStatus status;
    double gap;
    SolverFailure(const std::string& what, lp::SolveStatus st, double g)
        : std::runtime_error(what), status(st), gap(g) {}
};

}  // namespace battmdp
