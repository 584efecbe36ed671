#pragma once

#include <optional>

#include "battmdp/battery_pricing.hpp"
#include "battmdp/load_series.hpp"
#include "battmdp/lp_core.hpp"
#include "battmdp/markov_chain.hpp"
#include "battmdp/mdp_program.hpp"
#include "battmdp/policy_engine.hpp"
#include "battmdp/quantile_fourier.hpp"

namespace battmdp {

// End-to-end training step: demand chain from the training year, cost tensor,
// composed chain, stationary LP, policy extraction and the equality-check
// report. Shared by the CLI, the threshold sweep and the test suites.
struct TrainInputs {
    const QuantileSet* qset = nullptr;
    const LoadSeries* train = nullptr;
    BatteryParams battery;
    PricingPolicy pricing;
    CostCase cost_case;
    int relaxation_id = 3;
    bool peak_formulation = false;
    PeakThresholds thresholds;  // used when peak_formulation
    lp::SolverOptions solver;
    double check_tolerance = 1e-9;
};

struct TrainResult {
    Policy policy;
    ViolationReport violations;
    lp::LpSolution solution;
    ComposedChain chain;
    StateSpace space;
    std::int64_t lp_rows = 0;
    std::int64_t lp_vars = 0;
};

TrainResult train_policy(const TrainInputs& in);

}  // namespace battmdp
