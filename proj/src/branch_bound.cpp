// Branch and bound for LPs with binary variables. Nodes re-solve the LP
// relaxation from scratch under tightened bounds (no warm starts); search is
// best-bound with node-id tie break, branching on the most fractional binary
// (lowest index on ties). A rounding pass at the root and at incumbent-less
// milestones fixes all binaries to their rounded relaxation values to get an
// early upper bound.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <vector>

#include "battmdp/lp_core.hpp"

namespace battmdp::lp {

namespace {

struct Node {
    double bound;
    std::int64_t id;
    std::vector<std::pair<int, int>> fixes;  // (var, 0/1)

    bool operator>(const Node& o) const {
        if (bound != o.bound) return bound > o.bound;
        return id > o.id;
    }
};

int most_fractional_binary(const LpProblem& p, const std::vector<double>& x, double tol) {
    int pick = -1;
    double best = tol;
    for (int j = 0; j < p.num_vars(); ++j) {
        if (!p.is_binary(j)) continue;
        const double f = std::min(x[j] - std::floor(x[j]), std::ceil(x[j]) - x[j]);
        if (f > best + 1e-15) {
            best = f;
            pick = j;
        }
    }
    return pick;
}

}  // namespace

LpSolution solve_mip(const LpProblem& problem, const SolverOptions& options) {
    problem.validate();
    for (int j = 0; j < problem.num_vars(); ++j) {
        if (problem.is_binary(j) &&
            (problem.lower_bound(j) < 0.0 || problem.upper_bound(j) > 1.0)) {
            throw std::invalid_argument("binary variable with bounds outside [0, 1]");
        }
    }

    LpProblem work = problem;  // bounds mutate per node
    const int n = work.num_vars();

    auto solve_node = [&](const std::vector<std::pair<int, int>>& fixes) {
        for (const auto& [var, val] : fixes) work.set_bounds(var, val, val);
        LpSolution s = detail::solve_relaxation(work, options);
        for (const auto& [var, val] : fixes) {
            work.set_bounds(var, problem.lower_bound(var), problem.upper_bound(var));
        }
        return s;
    };

    LpSolution result;
    result.status = SolveStatus::IterationLimit;

    LpSolution root = solve_node({});  // relaxation
    result.iterations = root.iterations;
    if (root.status != SolveStatus::Optimal) {
        result.status = root.status;
        result.values = root.values;
        result.objective = root.objective;
        result.max_primal_infeasibility = root.max_primal_infeasibility;
        return result;
    }

    double incumbent_obj = std::numeric_limits<double>::infinity();
    std::vector<double> incumbent;
    const double int_tol = options.integrality_tol;

    auto try_incumbent = [&](const LpSolution& s) {
        if (s.status != SolveStatus::Optimal) return false;
        for (int j = 0; j < n; ++j) {
            if (work.is_binary(j) &&
                std::min(s.values[j], 1.0 - s.values[j]) > int_tol &&
                std::abs(s.values[j] - std::round(s.values[j])) > int_tol) {
                return false;
            }
        }
        if (s.objective < incumbent_obj - 1e-12) {
            incumbent_obj = s.objective;
            incumbent = s.values;
            return true;
        }
        return false;
    };

    // rounding heuristic on a relaxation point
    auto round_heuristic = [&](const std::vector<double>& x) {
        std::vector<std::pair<int, int>> fixes;
        for (int j = 0; j < n; ++j) {
            if (work.is_binary(j)) fixes.emplace_back(j, x[j] >= 0.5 ? 1 : 0);
        }
        LpSolution s = solve_node(fixes);
        result.iterations += s.iterations;
        try_incumbent(s);
    };

    if (!try_incumbent(root)) round_heuristic(root.values);

    std::priority_queue<Node, std::vector<Node>, std::greater<Node>> open;
    std::int64_t next_id = 0;
    const int root_branch = most_fractional_binary(work, root.values, int_tol);
    if (root_branch < 0) {
        // the relaxation was already integral
        result.status = SolveStatus::Optimal;
        result.values = root.values;
        result.objective = root.objective;
        result.max_primal_infeasibility = root.max_primal_infeasibility;
        result.has_incumbent = true;
        return result;
    }
    for (int v01 = 0; v01 <= 1; ++v01) {
        open.push(Node{root.objective, next_id++, {{root_branch, v01}}});
    }

    std::int64_t nodes = 1;
    double best_open_bound = root.objective;
    while (!open.empty()) {
        if (nodes >= options.node_limit) break;
        Node node = open.top();
        open.pop();
        best_open_bound = node.bound;
        if (node.bound >= incumbent_obj - options.mip_abs_gap) {
            // best-bound order: every remaining node is at least as bad
            best_open_bound = incumbent_obj;
            break;
        }

        LpSolution s = solve_node(node.fixes);
        ++nodes;
        result.iterations += s.iterations;
        if (s.status == SolveStatus::Infeasible) continue;
        if (s.status != SolveStatus::Optimal) continue;  // stalled node: drop conservatively
        if (s.objective >= incumbent_obj - options.mip_abs_gap) continue;

        const int branch = most_fractional_binary(work, s.values, int_tol);
        if (branch < 0) {
            try_incumbent(s);
            continue;
        }
        for (int v01 = 0; v01 <= 1; ++v01) {
            Node child{s.objective, next_id++, node.fixes};
            child.fixes.emplace_back(branch, v01);
            open.push(std::move(child));
        }
        if (options.log && nodes % 50 == 0) {
            std::fprintf(stderr, "bnb: %lld nodes, bound %.6f, incumbent %.6f\n",
                         static_cast<long long>(nodes), node.bound, incumbent_obj);
        }
    }

    result.nodes_explored = nodes;
    if (incumbent.empty()) {
        result.status = open.empty() ? SolveStatus::Infeasible : SolveStatus::IterationLimit;
        result.mip_gap = std::numeric_limits<double>::infinity();
        return result;
    }
    result.values = std::move(incumbent);
    result.objective = incumbent_obj;
    result.has_incumbent = true;
    double remaining = open.empty() ? incumbent_obj : std::min(best_open_bound, incumbent_obj);
    if (!open.empty()) remaining = std::min(remaining, open.top().bound);
    result.mip_gap = std::max(0.0, incumbent_obj - remaining);
    result.status = (open.empty() || result.mip_gap <= options.mip_abs_gap + 1e-12)
                        ? SolveStatus::Optimal
                        : SolveStatus::IterationLimit;

    double worst = 0.0;
    for (int r = 0; r < work.num_rows(); ++r) {
        const double a = work.row_activity(r, result.values);
        worst = std::max(worst, work.row_lower(r) - a);
        worst = std::max(worst, a - work.row_upper(r));
    }
    result.max_primal_infeasibility = worst;
    return result;
}

}  // namespace battmdp::lp
