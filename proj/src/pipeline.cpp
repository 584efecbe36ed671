#include "battmdp/pipeline.hpp"

namespace battmdp {

TrainResult train_policy(const TrainInputs& in) {
    if (!in.qset || !in.train) throw std::invalid_argument("train_policy needs models and data");

    const std::vector<int> q_seq = assign_quantile_sequence(*in.qset, *in.train);
    const TransitionMatrix demand_chain = estimate_demand_transitions(q_seq);

    TrainResult out;
    if (in.peak_formulation) {
        const DemandTable demand = build_demand_table(*in.qset);
        const auto energy = action_energy_table(in.battery, in.cost_case);
        out.chain = build_peak_chain(demand_chain, in.thresholds, demand, energy);
    } else {
        out.chain = build_basic_chain(demand_chain);
    }

    const CostTensor costs =
        build_cost_tensor(*in.qset, in.battery, in.pricing, in.cost_case,
                          in.peak_formulation ? &in.thresholds : nullptr);
    out.space = costs.space;

    const lp::LpProblem program =
        assemble_mdp(costs, out.chain, RelaxationOption::from_id(in.relaxation_id));
    out.lp_rows = program.num_rows();
    out.lp_vars = program.num_vars();

    out.solution = lp::solve_lp(program, in.solver);
    if (out.solution.status != lp::SolveStatus::Optimal) {
        throw std::runtime_error(std::string("MDP LP solve ended with status ") +
                                 lp::to_string(out.solution.status));
    }

    out.violations = check_solution(out.solution.values, out.space, out.chain,
                                    in.check_tolerance);
    out.policy = extract_policy(out.solution, out.space);
    return out;
}

}  // namespace battmdp
