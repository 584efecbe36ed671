#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "battmdp/mdp_program.hpp"

using namespace battmdp;

namespace {

// Hand-built chain container for toy state spaces.
ComposedChain make_chain(const StateSpace& space,
                         const std::vector<std::vector<std::pair<int, double>>>& per_pair) {
    ComposedChain c;
    c.space = space;
    const auto n_pairs = space.variable_count();
    REQUIRE(static_cast<std::int64_t>(per_pair.size()) == n_pairs);
    c.dest.assign(n_pairs * space.n_quantiles, 0);
    c.prob.assign(n_pairs * space.n_quantiles, 0.0);
    c.n_dest.assign(n_pairs, 0);
    for (std::int64_t pair = 0; pair < n_pairs; ++pair) {
        REQUIRE(per_pair[pair].size() <= static_cast<std::size_t>(space.n_quantiles));
        c.n_dest[pair] = static_cast<std::uint8_t>(per_pair[pair].size());
        for (std::size_t d = 0; d < per_pair[pair].size(); ++d) {
            c.dest[pair * space.n_quantiles + d] = per_pair[pair][d].first;
            c.prob[pair * space.n_quantiles + d] = per_pair[pair][d].second;
        }
    }
    return c;
}

// Two SoC levels, two actions (stay / toggle), one hour, one quantile.
// Hand-computable: the cheapest recurrent behavior is staying at level 1.
struct ToyMdp {
    StateSpace space;
    ComposedChain chain;
    CostTensor costs;

    ToyMdp() {
        space = StateSpace{1, 2, 1, 0, 2};
        // pair order: (s0,k1) (s0,k2) (s1,k1) (s1,k2)
        chain = make_chain(space, {{{0, 1.0}}, {{1, 1.0}}, {{1, 1.0}}, {{0, 1.0}}});
        costs.space = space;
        costs.values = {2.0, 5.0, 1.0, 0.0};
    }
};

// Random small MDP over an arbitrary state space; every action's transition
// rows are random distributions with at most n_quantiles entries.
struct RandomToy {
    StateSpace space;
    ComposedChain chain;
    CostTensor costs;
};

RandomToy random_toy(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    RandomToy toy;
    toy.space = StateSpace{2, 3, 2, 0, 3};
    const auto n_states = toy.space.n_states();
    std::uniform_int_distribution<int> pick_state(0, static_cast<int>(n_states) - 1);
    std::uniform_real_distribution<double> weight(0.05, 1.0);

    std::vector<std::vector<std::pair<int, double>>> per_pair;
    for (std::int64_t s = 0; s < n_states; ++s) {
        for (int k = 1; k <= toy.space.n_actions; ++k) {
            const int fanout = 1 + static_cast<int>(rng() % toy.space.n_quantiles);
            std::map<int, double> dests;
            for (int d = 0; d < fanout; ++d) dests[pick_state(rng)] += weight(rng);
            double total = 0.0;
            for (auto& [_, w] : dests) total += w;
            std::vector<std::pair<int, double>> row;
            for (auto& [dest, w] : dests) row.emplace_back(dest, w / total);
            per_pair.push_back(std::move(row));
        }
    }
    toy.chain = make_chain(toy.space, per_pair);
    toy.costs.space = toy.space;
    std::uniform_real_distribution<double> cost(0.0, 10.0);
    toy.costs.values.resize(toy.space.variable_count());
    for (auto& c : toy.costs.values) c = cost(rng);
    return toy;
}

std::map<int, double> row_as_map(const lp::LpProblem& p, int row) {
    std::map<int, double> m;
    const auto idx = p.row_indices(row);
    const auto val = p.row_values(row);
    for (std::size_t t = 0; t < idx.size(); ++t) {
        if (val[t] != 0.0) m[idx[t]] = val[t];
    }
    return m;
}

}  // namespace

TEST_SUITE("mdp_program") {

TEST_CASE("relaxation menu") {
    const RelaxationOption r3 = RelaxationOption::from_id(3);
    CHECK(r3.normalization_sense == lp::RowSense::Equal);
    CHECK(r3.band_lower == -lp::inf);
    CHECK(r3.band_upper == 0.0);
    const RelaxationOption r6 = RelaxationOption::from_id(6);
    CHECK(r6.band_lower == doctest::Approx(-0.0001));
    CHECK_THROWS(RelaxationOption::from_id(7));
}

TEST_CASE("toy assembly matches the hand-written system") {
    ToyMdp toy;
    const lp::LpProblem p =
        assemble_mdp(toy.costs, toy.chain, RelaxationOption::from_id(3));
    REQUIRE(p.num_vars() == 4);
    REQUIRE(p.num_rows() == 3);

    // normalization: every variable with coefficient 1, activity = 1
    CHECK(row_as_map(p, 0) == std::map<int, double>{{0, 1.0}, {1, 1.0}, {2, 1.0}, {3, 1.0}});
    CHECK(p.row_lower(0) == 1.0);
    CHECK(p.row_upper(0) == 1.0);

    // balance of s0: the toggle out of s0 leaves, the toggle out of s1 arrives;
    // the stay terms cancel exactly
    CHECK(row_as_map(p, 1) == std::map<int, double>{{1, 1.0}, {3, -1.0}});
    // balance of s1 is the mirror image
    CHECK(row_as_map(p, 2) == std::map<int, double>{{1, -1.0}, {3, 1.0}});
    CHECK(p.row_upper(1) == 0.0);
    CHECK(p.row_lower(1) == -lp::inf);

    // objective mirrors the cost tensor
    for (int v = 0; v < 4; ++v) CHECK(p.objective_coeff(v) == toy.costs.values[v]);
}

TEST_CASE("toy optimum equals exhaustive policy enumeration") {
    ToyMdp toy;
    const lp::LpProblem p =
        assemble_mdp(toy.costs, toy.chain, RelaxationOption::from_id(3));
    const lp::LpSolution sol = lp::solve_lp(p);
    REQUIRE(sol.status == lp::SolveStatus::Optimal);

    // enumerate the four deterministic policies; each induces cycles whose
    // average costs are candidate long-run values
    double best = 1e300;
    for (int a0 = 1; a0 <= 2; ++a0) {
        for (int a1 = 1; a1 <= 2; ++a1) {
            const int action_of[2] = {a0, a1};
            for (int start = 0; start < 2; ++start) {
                // follow the deterministic chain until a state repeats
                std::vector<int> path{start};
                std::vector<double> costs;
                int state = start;
                for (int step = 0; step < 8; ++step) {
                    const int k = action_of[state];
                    costs.push_back(toy.costs.values[toy.space.var_index(state, k)]);
                    state = toy.chain.dests(state, k)[0];
                    auto it = std::find(path.begin(), path.end(), state);
                    if (it != path.end()) {
                        // average cost over the closed cycle
                        const std::size_t cycle_start = it - path.begin();
                        double sum = 0.0;
                        for (std::size_t t = cycle_start; t < costs.size(); ++t) sum += costs[t];
                        best = std::min(best, sum / (costs.size() - cycle_start));
                        break;
                    }
                    path.push_back(state);
                }
            }
        }
    }
    CHECK(best == doctest::Approx(1.0));
    CHECK(sol.objective == doctest::Approx(best).epsilon(1e-8));

    // occupancy concentrates on (level 1, stay)
    CHECK(sol.values[2] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("full-size assembly reproduces the published dimensions") {
    StateSpace space;
    CHECK(space.variable_count() == 49896);
    CHECK(space.constraint_count() == 52273);
    const StateSpace peak = StateSpace::with_peaks(6);
    CHECK(peak.variable_count() == 299376);
    CHECK(peak.constraint_count() == 313633);
    CHECK(StateSpace::with_peaks(11).variable_count() == 548856);
}

TEST_CASE("normalization row covers every column once") {
    const RandomToy toy = random_toy(17);
    const lp::LpProblem p =
        assemble_mdp(toy.costs, toy.chain, RelaxationOption::from_id(3));
    const auto norm = row_as_map(p, 0);
    REQUIRE(static_cast<int>(norm.size()) == p.num_vars());
    for (const auto& [col, val] : norm) CHECK(val == 1.0);
}

TEST_CASE("balance columns conserve flow") {
    const RandomToy toy = random_toy(23);
    const lp::LpProblem p =
        assemble_mdp(toy.costs, toy.chain, RelaxationOption::from_id(3));
    std::vector<double> column_sum(p.num_vars(), 0.0);
    for (int r = 1; r < p.num_rows(); ++r) {
        const auto idx = p.row_indices(r);
        const auto val = p.row_values(r);
        for (std::size_t t = 0; t < idx.size(); ++t) column_sum[idx[t]] += val[t];
    }
    for (double s : column_sum) CHECK(s == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("option 3 matches the pure equality form on random toys") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
        const RandomToy toy = random_toy(seed);
        const lp::LpSolution relaxed = lp::solve_lp(
            assemble_mdp(toy.costs, toy.chain, RelaxationOption::from_id(3)));
        const lp::LpSolution equality = lp::solve_lp(
            assemble_mdp(toy.costs, toy.chain, RelaxationOption::from_id(1)));
        REQUIRE(relaxed.status == lp::SolveStatus::Optimal);
        REQUIRE(equality.status == lp::SolveStatus::Optimal);
        CHECK(relaxed.objective == doctest::Approx(equality.objective).epsilon(1e-6));
    }
}

TEST_CASE("fixed-policy stationary points are feasible and never beat the optimum") {
    const RandomToy toy = random_toy(31);
    const lp::LpProblem p =
        assemble_mdp(toy.costs, toy.chain, RelaxationOption::from_id(3));
    const lp::LpSolution sol = lp::solve_lp(p);
    REQUIRE(sol.status == lp::SolveStatus::Optimal);

    std::mt19937_64 rng(77);
    const auto n_states = toy.space.n_states();
    for (int trial = 0; trial < 20; ++trial) {
        // random deterministic policy
        std::vector<int> action(n_states);
        for (auto& a : action) a = 1 + static_cast<int>(rng() % toy.space.n_actions);

        // stationary distribution of the lazy chain by power iteration
        std::vector<double> pi(n_states, 1.0 / static_cast<double>(n_states));
        std::vector<double> next(n_states);
        for (int it = 0; it < 4000; ++it) {
            std::fill(next.begin(), next.end(), 0.0);
            for (std::int64_t s = 0; s < n_states; ++s) {
                next[s] += 0.5 * pi[s];
                const auto dests = toy.chain.dests(s, action[s]);
                const auto probs = toy.chain.probs(s, action[s]);
                for (std::size_t d = 0; d < dests.size(); ++d) {
                    next[dests[d]] += 0.5 * pi[s] * probs[d];
                }
            }
            pi.swap(next);
        }

        std::vector<double> y(toy.space.variable_count(), 0.0);
        double objective = 0.0;
        for (std::int64_t s = 0; s < n_states; ++s) {
            y[toy.space.var_index(s, action[s])] = pi[s];
            objective += pi[s] * toy.costs.values[toy.space.var_index(s, action[s])];
        }
        const ViolationReport rep = check_solution(y, toy.space, toy.chain, 1e-8);
        CHECK(rep.passed);
        CHECK(objective >= sol.objective - 1e-7);
    }
}

TEST_CASE("check_solution on degenerate inputs") {
    ToyMdp toy;
    const std::vector<double> zero(4, 0.0);
    const ViolationReport rep = check_solution(zero, toy.space, toy.chain);
    CHECK(rep.max_normalization_violation == doctest::Approx(1.0));
    CHECK(!rep.passed);

    const lp::LpSolution sol = lp::solve_lp(
        assemble_mdp(toy.costs, toy.chain, RelaxationOption::from_id(3)));
    const ViolationReport good = check_solution(sol.values, toy.space, toy.chain);
    CHECK(good.passed);
    CHECK(good.max_normalization_violation <= 1e-9);
    CHECK(good.max_balance_violation <= 1e-9);
}

}  // TEST_SUITE
