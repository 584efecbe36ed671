#include "battmdp/markov_chain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace battmdp {

TransitionMatrix TransitionMatrix::identity(int dim) {
    TransitionMatrix m = zero(dim);
    for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
    return m;
}

void TransitionMatrix::validate_stochastic(double tol) const {
    for (int r = 0; r < dim; ++r) {
        double sum = 0.0;
        for (int c = 0; c < dim; ++c) {
            const double v = at(r, c);
            if (!(v >= 0.0 && v <= 1.0)) {
                throw std::invalid_argument("transition entry outside [0, 1]");
            }
            sum += v;
        }
        if (std::abs(sum - 1.0) > tol) {
            throw std::invalid_argument("transition row " + std::to_string(r) +
                                        " sums to " + std::to_string(sum));
        }
    }
}

int PeakThresholds::threshold_index(double value) const {
    int r = 1;
    for (double b : boundaries) {
        if (value >= b) ++r;
        else break;
    }
    return r;
}

void PeakThresholds::validate() const {
    for (std::size_t i = 0; i < boundaries.size(); ++i) {
        if (boundaries[i] <= 0 || (i > 0 && boundaries[i] <= boundaries[i - 1])) {
            throw std::invalid_argument("peak boundaries must be positive and strictly increasing");
        }
    }
}

PeakThresholds PeakThresholds::uniform(int count, double top) {
    if (count < 1) throw std::invalid_argument("threshold count must be >= 1");
    PeakThresholds t;
    for (int r = 1; r < count; ++r) t.boundaries.push_back(top * r / (count - 1));
    t.validate();
    return t;
}

DemandTable build_demand_table(const QuantileSet& qset) {
    if (qset.size() != 9) throw std::invalid_argument("demand table expects nine quantiles");
    DemandTable d;
    d.values.resize(24 * 9);
    for (int i = 1; i <= 24; ++i) {
        for (int q = 1; q <= 9; ++q) {
            d.values[static_cast<std::size_t>(i - 1) * 9 + (q - 1)] =
                evaluate(qset.models[q - 1], i - 1.0);
        }
    }
    return d;
}

TransitionMatrix estimate_demand_transitions(std::span<const int> q_sequence) {
    if (q_sequence.size() < 2) throw std::invalid_argument("need at least two observations");
    constexpr int dim = 9;
    std::vector<std::int64_t> counts(dim * dim, 0);
    std::vector<std::int64_t> visits(dim, 0);
    for (std::size_t t = 0; t + 1 < q_sequence.size(); ++t) {
        const int a = q_sequence[t], b = q_sequence[t + 1];
        if (a < 1 || a > dim || b < 1 || b > dim) {
            throw std::invalid_argument("quantile index outside 1..9 at step " + std::to_string(t));
        }
        ++counts[static_cast<std::size_t>(a - 1) * dim + (b - 1)];
        ++visits[a - 1];
    }
    TransitionMatrix m = TransitionMatrix::zero(dim);
    for (int r = 0; r < dim; ++r) {
        if (visits[r] == 0) {
            m.at(r, r) = 1.0;  // unvisited source: self-loop
            continue;
        }
        for (int c = 0; c < dim; ++c) {
            m.at(r, c) = static_cast<double>(counts[static_cast<std::size_t>(r) * dim + c]) /
                         static_cast<double>(visits[r]);
        }
    }
    return m;
}

TransitionMatrix time_transition() {
    TransitionMatrix m = TransitionMatrix::zero(24);
    for (int i = 0; i < 24; ++i) m.at(i, (i + 1) % 24) = 1.0;
    return m;
}

SocTransition soc_transition(int k) {
    if (k < 1 || k > 21) throw std::invalid_argument("action index outside 1..21");
    const int step = k - 11;  // 10 * u, exact
    SocTransition t;
    t.matrix = TransitionMatrix::zero(11);
    t.infeasible.assign(11, 0);
    for (int j = 0; j <= 10; ++j) {
        const int raw = j + step;
        const int target = std::clamp(raw, 0, 10);
        t.matrix.at(j, target) = 1.0;
        t.infeasible[j] = raw != target ? 1 : 0;
    }
    return t;
}

int peak_destination(int r, double e_g, const PeakThresholds& thresholds) {
    return thresholds.threshold_index(std::max(thresholds.representative(r), e_g));
}

TransitionMatrix peak_transition(int i, int q, int k, const PeakThresholds& thresholds,
                                 const DemandTable& demand,
                                 std::span<const double> action_energy) {
    const int R = thresholds.count();
    TransitionMatrix m = TransitionMatrix::zero(R);
    const double e_g = demand.at(i, q) + action_energy[k - 1];
    for (int r = 1; r <= R; ++r) {
        const int dest = i == 24 ? 1 : peak_destination(r, e_g, thresholds);
        m.at(r - 1, dest - 1) = 1.0;
    }
    return m;
}

namespace {

// shared assembly: destination hour/soc are deterministic, quantiles fan out
void fill_state(JointTransition& jt, const StateSpace& space, std::int64_t s, int dest_i,
                int dest_j, int dest_r, int q, const TransitionMatrix& demand_chain) {
    const auto base = s * space.n_quantiles;
    int nd = 0;
    for (int Q = 1; Q <= space.n_quantiles; ++Q) {
        const double pq = demand_chain.at(q - 1, Q - 1);
        if (pq == 0.0) continue;
        jt.dest[base + nd] = static_cast<std::int32_t>(space.state_index(dest_i, dest_j, Q, dest_r));
        jt.prob[base + nd] = pq;
        ++nd;
    }
    jt.n_dest[s] = static_cast<std::uint8_t>(nd);
}

}  // namespace

JointTransition compose_basic(const TransitionMatrix& time_chain, const SocTransition& soc_chain,
                              const TransitionMatrix& demand_chain) {
    StateSpace space;
    space.n_hours = time_chain.dim;
    space.n_soc = soc_chain.matrix.dim;
    space.n_quantiles = demand_chain.dim;
    JointTransition jt;
    jt.space = space;
    const auto n = space.n_states();
    jt.dest.assign(n * space.n_quantiles, 0);
    jt.prob.assign(n * space.n_quantiles, 0.0);
    jt.n_dest.assign(n, 0);

    for (int i = 1; i <= space.n_hours; ++i) {
        int dest_i = 0;
        for (int I = 1; I <= space.n_hours; ++I) {
            if (time_chain.at(i - 1, I - 1) == 1.0) { dest_i = I; break; }
        }
        for (int j = 0; j < space.n_soc; ++j) {
            int dest_j = 0;
            for (int J = 0; J < space.n_soc; ++J) {
                if (soc_chain.matrix.at(j, J) == 1.0) { dest_j = J; break; }
            }
            for (int q = 1; q <= space.n_quantiles; ++q) {
                const auto s = space.state_index(i, j, q);
                fill_state(jt, space, s, dest_i, dest_j, 1, q, demand_chain);
            }
        }
    }
    return jt;
}

JointTransition compose_peak(const TransitionMatrix& time_chain, const SocTransition& soc_chain,
                             const TransitionMatrix& demand_chain, int k,
                             const PeakThresholds& thresholds, const DemandTable& demand,
                             std::span<const double> action_energy) {
    StateSpace space;
    space.n_hours = time_chain.dim;
    space.n_soc = soc_chain.matrix.dim;
    space.n_quantiles = demand_chain.dim;
    space.n_peaks = thresholds.count();
    JointTransition jt;
    jt.space = space;
    const auto n = space.n_states();
    jt.dest.assign(n * space.n_quantiles, 0);
    jt.prob.assign(n * space.n_quantiles, 0.0);
    jt.n_dest.assign(n, 0);

    for (int i = 1; i <= space.n_hours; ++i) {
        int dest_i = 0;
        for (int I = 1; I <= space.n_hours; ++I) {
            if (time_chain.at(i - 1, I - 1) == 1.0) { dest_i = I; break; }
        }
        for (int q = 1; q <= space.n_quantiles; ++q) {
            const double e_g = demand.at(i, q) + action_energy[k - 1];
            for (int j = 0; j < space.n_soc; ++j) {
                int dest_j = 0;
                for (int J = 0; J < space.n_soc; ++J) {
                    if (soc_chain.matrix.at(j, J) == 1.0) { dest_j = J; break; }
                }
                for (int r = 1; r <= space.n_peaks; ++r) {
                    const int dest_r =
                        i == space.n_hours ? 1 : peak_destination(r, e_g, thresholds);
                    const auto s = space.state_index(i, j, q, r);
                    fill_state(jt, space, s, dest_i, dest_j, dest_r, q, demand_chain);
                }
            }
        }
    }
    return jt;
}

ComposedChain ComposedChain::from_joints(const StateSpace& space,
                                         const std::vector<JointTransition>& per_action) {
    if (static_cast<int>(per_action.size()) != space.n_actions) {
        throw std::invalid_argument("need one joint transition per action");
    }
    ComposedChain chain;
    chain.space = space;
    const auto n_pairs = space.variable_count();
    chain.dest.assign(n_pairs * space.n_quantiles, 0);
    chain.prob.assign(n_pairs * space.n_quantiles, 0.0);
    chain.n_dest.assign(n_pairs, 0);
    for (int k = 1; k <= space.n_actions; ++k) {
        const JointTransition& jt = per_action[k - 1];
        for (std::int64_t s = 0; s < space.n_states(); ++s) {
            const auto pair = chain.pair_index(s, k);
            const auto src = s * space.n_quantiles;
            const auto dst = pair * space.n_quantiles;
            chain.n_dest[pair] = jt.n_dest[s];
            for (int d = 0; d < jt.n_dest[s]; ++d) {
                chain.dest[dst + d] = jt.dest[src + d];
                chain.prob[dst + d] = jt.prob[src + d];
            }
        }
    }
    return chain;
}

ComposedChain build_basic_chain(const TransitionMatrix& demand_chain) {
    const TransitionMatrix time_chain = time_transition();
    std::vector<JointTransition> joints;
    joints.reserve(21);
    for (int k = 1; k <= 21; ++k) {
        joints.push_back(compose_basic(time_chain, soc_transition(k), demand_chain));
    }
    return ComposedChain::from_joints(joints.front().space, joints);
}

ComposedChain build_peak_chain(const TransitionMatrix& demand_chain,
                               const PeakThresholds& thresholds, const DemandTable& demand,
                               std::span<const double> action_energy) {
    const TransitionMatrix time_chain = time_transition();
    std::vector<JointTransition> joints;
    joints.reserve(21);
    for (int k = 1; k <= 21; ++k) {
        joints.push_back(compose_peak(time_chain, soc_transition(k), demand_chain, k, thresholds,
                                      demand, action_energy));
    }
    return ComposedChain::from_joints(joints.front().space, joints);
}

void write_matrix_csv(const TransitionMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    char buf[40];
    for (int r = 0; r < m.dim; ++r) {
        for (int c = 0; c < m.dim; ++c) {
            std::snprintf(buf, sizeof(buf), "%.15g", m.at(r, c));
            out << buf << (c + 1 < m.dim ? "," : "\n");
        }
    }
}

}  // namespace battmdp
