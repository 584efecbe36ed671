#include "battmdp/mdp_program.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace battmdp {

RelaxationOption RelaxationOption::from_id(int id) {
    RelaxationOption r;
    r.id = id;
    switch (id) {
        case 1: r.normalization_sense = lp::RowSense::Equal; r.band_lower = 0.0; r.band_upper = 0.0; break;
        case 2: r.normalization_sense = lp::RowSense::Equal; r.band_lower = 0.0; r.band_upper = lp::inf; break;
        case 3: r.normalization_sense = lp::RowSense::Equal; r.band_lower = -lp::inf; r.band_upper = 0.0; break;
        case 4: r.normalization_sense = lp::RowSense::LessEqual; r.band_lower = -lp::inf; r.band_upper = 0.0; break;
        case 5: r.normalization_sense = lp::RowSense::GreaterEqual; r.band_lower = -lp::inf; r.band_upper = 0.0; break;
        case 6: r.normalization_sense = lp::RowSense::Equal; r.band_lower = -0.0001; r.band_upper = 0.0; break;
        default: throw std::invalid_argument("relaxation id must be 1..6");
    }
    return r;
}

lp::LpProblem assemble_mdp(const CostTensor& costs, const ComposedChain& chain,
                           const RelaxationOption& relax) {
    const StateSpace& space = costs.space;
    if (chain.space.n_states() != space.n_states() ||
        chain.space.n_actions != space.n_actions) {
        throw std::invalid_argument("cost tensor and chain axes mismatch");
    }
    const std::int64_t n_states = space.n_states();
    const std::int64_t n_vars = space.variable_count();

    lp::LpProblem p;
    p.reserve(static_cast<int>(n_vars), static_cast<int>(1 + n_states),
              n_vars + n_vars * (2 + space.n_quantiles));
    for (std::int64_t v = 0; v < n_vars; ++v) {
        p.add_variable(0.0, lp::inf, costs.values[v]);
    }

    // normalization row over every variable
    {
        std::vector<int> cols(n_vars);
        std::vector<double> vals(n_vars, 1.0);
        for (std::int64_t v = 0; v < n_vars; ++v) cols[v] = static_cast<int>(v);
        p.add_row(relax.normalization_sense, 1.0, cols, vals);
    }

    // balance rows: outflow of the destination state minus its inflow mass
    std::vector<std::vector<std::pair<int, double>>> rows(n_states);
    for (std::int64_t s = 0; s < n_states; ++s) {
        rows[s].reserve(space.n_actions * (1 + space.n_quantiles) / 2);
    }
    for (std::int64_t s = 0; s < n_states; ++s) {
        for (int k = 1; k <= space.n_actions; ++k) {
            const int var = static_cast<int>(space.var_index(s, k));
            double self_coeff = 1.0;  // outflow term of y_{s,k} in row s
            const auto dests = chain.dests(s, k);
            const auto probs = chain.probs(s, k);
            for (std::size_t d = 0; d < dests.size(); ++d) {
                if (dests[d] == s) {
                    self_coeff -= probs[d];
                } else {
                    rows[dests[d]].emplace_back(var, -probs[d]);
                }
            }
            rows[s].emplace_back(var, self_coeff);
        }
    }
    std::vector<int> cols;
    std::vector<double> vals;
    for (std::int64_t s = 0; s < n_states; ++s) {
        cols.clear();
        vals.clear();
        for (const auto& [c, v] : rows[s]) {
            cols.push_back(c);
            vals.push_back(v);
        }
        p.add_row(relax.band_lower, relax.band_upper, cols, vals);
    }
    return p;
}

ViolationReport check_solution(std::span<const double> y, const StateSpace& space,
                               const ComposedChain& chain, double tolerance) {
    if (static_cast<std::int64_t>(y.size()) != space.variable_count()) {
        throw std::invalid_argument("solution length does not match the state space");
    }
    const std::int64_t n_states = space.n_states();
    std::vector<double> balance(n_states, 0.0);
    double total = 0.0;
    for (std::int64_t s = 0; s < n_states; ++s) {
        for (int k = 1; k <= space.n_actions; ++k) {
            const double v = y[space.var_index(s, k)];
            total += v;
            if (v == 0.0) continue;
            balance[s] += v;
            const auto dests = chain.dests(s, k);
            const auto probs = chain.probs(s, k);
            for (std::size_t d = 0; d < dests.size(); ++d) {
                balance[dests[d]] -= v * probs[d];
            }
        }
    }
    ViolationReport report;
    report.tolerance = tolerance;
    report.max_normalization_violation = std::abs(total - 1.0);
    for (std::int64_t s = 0; s < n_states; ++s) {
        report.max_balance_violation = std::max(report.max_balance_violation, std::abs(balance[s]));
    }
    report.passed = report.max_normalization_violation <= tolerance &&
                    report.max_balance_violation <= tolerance;
    return report;
}

void save_violation_report_json(const ViolationReport& report, const std::string& path) {
    nlohmann::json j = {{"max_normalization_violation", report.max_normalization_violation},
                        {"max_balance_violation", report.max_balance_violation},
                        {"passed", report.passed},
                        {"tolerance", report.tolerance}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

}  // namespace battmdp
