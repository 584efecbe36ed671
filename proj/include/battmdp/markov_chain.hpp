#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "battmdp/quantile_fourier.hpp"
#include "battmdp/state_space.hpp"

namespace battmdp {

// Row-stochastic transition matrix over one discrete state axis.
struct TransitionMatrix {
    int dim = 0;
    std::vector<double> p;  // row-major, dim*dim

    double at(int row, int col) const { return p[static_cast<std::size_t>(row) * dim + col]; }
    double& at(int row, int col) { return p[static_cast<std::size_t>(row) * dim + col]; }

    static TransitionMatrix zero(int dim) {
        return {dim, std::vector<double>(static_cast<std::size_t>(dim) * dim, 0.0)};
    }
    static TransitionMatrix identity(int dim);

    // Throws unless every entry lies in [0,1] and every row sums to 1
    // within tol.
    void validate_stochastic(double tol = 1e-12) const;
};

// Deterministic state-of-charge chain for one action; `infeasible[j]` marks
// source levels where the requested move had to be clamped at 0% or 100%.
struct SocTransition {
    TransitionMatrix matrix;
    std::vector<std::uint8_t> infeasible;
};

// Discretization of the running daily peak. `boundaries` are the interior
// cut points (ascending); level r covers [boundaries[r-2], boundaries[r-1])
// with r = 1 below the first cut. The representative value used when
// propagating the running maximum is the interval lower bound (0 for r = 1).
struct PeakThresholds {
    std::vector<double> boundaries;

    int count() const { return static_cast<int>(boundaries.size()) + 1; }
    double representative(int r) const { return r <= 1 ? 0.0 : boundaries[r - 2]; }
    int threshold_index(double value) const;
    void validate() const;

    // count-1 equal steps up to `top`: uniform(6) gives {100,...,500}.
    static PeakThresholds uniform(int count, double top = 500.0);
};

// Fitted demand per (hour state i, quantile q).
struct DemandTable {
    std::vector<double> values;  // 24*9 row-major by hour

    double at(int i, int q) const { return values[static_cast<std::size_t>(i - 1) * 9 + (q - 1)]; }
};

DemandTable build_demand_table(const QuantileSet& qset);

// Empirical transition frequencies of a quantile-index sequence (entries in
// 1..9). Rows never visited as a source become self-loops.
TransitionMatrix estimate_demand_transitions(std::span<const int> q_sequence);

// Deterministic cyclic hour chain: i -> i+1, 24 -> 1.
TransitionMatrix time_transition();

// u = (k-11)/10; the target level is clamp(j + (k-11), 0, 10).
SocTransition soc_transition(int k);

// Destination threshold from level r when the hour's grid energy is e_g:
// bucket(max(representative(r), e_g)). No end-of-day reset applied.
int peak_destination(int r, double e_g, const PeakThresholds& thresholds);

// Full R x R peak chain for (hour i, quantile q, action k). At i = 24 every
// destination is the reset level r = 1. `action_energy` holds the grid-side
// battery energy of each action (21 values).
TransitionMatrix peak_transition(int i, int q, int k, const PeakThresholds& thresholds,
                                 const DemandTable& demand, std::span<const double> action_energy);

// Sparse joint transition for one action: at most one destination per
// (time, SoC[, peak]) combination times the stochastic quantile axis.
struct JointTransition {
    StateSpace space;
    // per source state: up to n_quantiles (destination, probability) pairs
    std::vector<std::int32_t> dest;
    std::vector<double> prob;
    std::vector<std::uint8_t> n_dest;

    std::span<const std::int32_t> dests(std::int64_t s) const {
        return {dest.data() + s * space.n_quantiles, static_cast<std::size_t>(n_dest[s])};
    }
    std::span<const double> probs(std::int64_t s) const {
        return {prob.data() + s * space.n_quantiles, static_cast<std::size_t>(n_dest[s])};
    }
};

JointTransition compose_basic(const TransitionMatrix& time_chain, const SocTransition& soc_chain,
                              const TransitionMatrix& demand_chain);

JointTransition compose_peak(const TransitionMatrix& time_chain, const SocTransition& soc_chain,
                             const TransitionMatrix& demand_chain, int k,
                             const PeakThresholds& thresholds, const DemandTable& demand,
                             std::span<const double> action_energy);

// All actions of the factored chain, laid out by (state, action) pair index.
struct ComposedChain {
    StateSpace space;
    std::vector<std::int32_t> dest;
    std::vector<double> prob;
    std::vector<std::uint8_t> n_dest;

    std::int64_t pair_index(std::int64_t s, int k) const { return s * space.n_actions + (k - 1); }
    std::span<const std::int32_t> dests(std::int64_t s, int k) const {
        const auto off = pair_index(s, k) * space.n_quantiles;
        return {dest.data() + off, static_cast<std::size_t>(n_dest[pair_index(s, k)])};
    }
    std::span<const double> probs(std::int64_t s, int k) const {
        const auto off = pair_index(s, k) * space.n_quantiles;
        return {prob.data() + off, static_cast<std::size_t>(n_dest[pair_index(s, k)])};
    }

    static ComposedChain from_joints(const StateSpace& space,
                                     const std::vector<JointTransition>& per_action);
};

ComposedChain build_basic_chain(const TransitionMatrix& demand_chain);
ComposedChain build_peak_chain(const TransitionMatrix& demand_chain,
                               const PeakThresholds& thresholds, const DemandTable& demand,
                               std::span<const double> action_energy);

// Row-major CSV at 15 significant digits, one matrix row per line.
void write_matrix_csv(const TransitionMatrix& m, const std::string& path);

}  // namespace battmdp
