#pragma once

#include <string>

#include "battmdp/battery_pricing.hpp"
#include "battmdp/lp_core.hpp"
#include "battmdp/markov_chain.hpp"
#include "battmdp/state_space.hpp"

namespace battmdp {

// One of the six sense combinations for the normalization and balance rows.
// Option 3 ("= 1, <= 0") is the working default; options 1-6 are selectable
// to reproduce the qualitative behavior of the full menu.
struct RelaxationOption {
    int id = 3;
    lp::RowSense normalization_sense = lp::RowSense::Equal;
    // balance rows: [band_lower, band_upper] activity interval
    double band_lower = -lp::inf;
    double band_upper = 0.0;

    static RelaxationOption from_id(int id);
};

struct ViolationReport {
    double max_normalization_violation = 0.0;  // |sum y - 1|
    double max_balance_violation = 0.0;        // worst |balance residual|
    bool passed = false;
    double tolerance = 1e-9;
};

// Stationary-distribution LP over occupancy variables y >= 0: minimize
// sum y*C subject to the normalization row and one probability-flow balance
// row per destination state, with senses taken from the relaxation option.
// Balance rows follow the normalization row in state-index order.
lp::LpProblem assemble_mdp(const CostTensor& costs, const ComposedChain& chain,
                           const RelaxationOption& relax);

inline lp::LpProblem assemble_basic(const CostTensor& costs, const ComposedChain& chain,
                                    const RelaxationOption& relax) {
    if (costs.space.has_peak()) throw std::invalid_argument("basic assembly got a peak tensor");
    return assemble_mdp(costs, chain, relax);
}

inline lp::LpProblem assemble_peak(const CostTensor& costs, const ComposedChain& chain,
                                   const RelaxationOption& relax) {
    if (!costs.space.has_peak()) throw std::invalid_argument("peak assembly needs a peak tensor");
    return assemble_mdp(costs, chain, relax);
}

// Evaluates the original equality constraints (normalization = 1, balance
// = 0) regardless of the relaxation the solve used.
ViolationReport check_solution(std::span<const double> y, const StateSpace& space,
                               const ComposedChain& chain, double tolerance = 1e-9);

void save_violation_report_json(const ViolationReport& report, const std::string& path);

}  // namespace battmdp
