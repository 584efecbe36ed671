#include "battmdp/policy_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace battmdp {

std::int64_t Policy::supported_states() const {
    std::int64_t n = 0;
    for (std::int64_t s = 0; s < space_.n_states(); ++s) n += !zero_mass(s);
    return n;
}

Policy extract_policy(const lp::LpSolution& y, const StateSpace& space) {
    if (static_cast<std::int64_t>(y.values.size()) != space.variable_count()) {
        throw std::invalid_argument("solution length does not match the state space");
    }
    std::vector<std::int32_t> start(space.n_states() + 1, 0);
    std::vector<Policy::Entry> entries;
    for (std::int64_t s = 0; s < space.n_states(); ++s) {
        start[s] = static_cast<std::int32_t>(entries.size());
        double mass = 0.0;
        for (int k = 1; k <= space.n_actions; ++k) mass += y.values[space.var_index(s, k)];
        if (mass < zero_mass_threshold) continue;
        double kept = 0.0;
        const std::size_t first = entries.size();
        for (int k = 1; k <= space.n_actions; ++k) {
            const double v = y.values[space.var_index(s, k)];
            if (v < zero_mass_threshold) continue;
            entries.push_back({static_cast<std::int16_t>(k), v});
            kept += v;
        }
        if (kept <= 0.0) {
            entries.resize(first);  // every entry was subthreshold: treat as zero mass
            continue;
        }
        for (std::size_t e = first; e < entries.size(); ++e) entries[e].prob /= kept;
    }
    start[space.n_states()] = static_cast<std::int32_t>(entries.size());
    return Policy(space, std::move(start), std::move(entries));
}

int soc_grid_index(double stored_kwh, const BatteryParams& battery, int n_soc) {
    const double frac = stored_kwh / battery.capacity_kwh;
    const int j = static_cast<int>(std::lround(frac * (n_soc - 1)));
    return std::clamp(j, 0, n_soc - 1);
}

double sample_action(const Policy& policy, const ExecutionState& state,
                     const BatteryParams& battery, const PeakThresholds* thresholds,
                     std::mt19937_64& rng) {
    const StateSpace& space = policy.space();
    if (space.has_peak() != (thresholds != nullptr)) {
        throw std::invalid_argument("peak thresholds must match the policy's state space");
    }
    const int j = soc_grid_index(state.stored_kwh, battery, space.n_soc);
    const int r = thresholds ? thresholds->threshold_index(state.peak_so_far) : 1;
    const auto s = space.state_index(state.hour, j, state.quantile, r);

    const auto dist = policy.distribution(s);
    if (dist.empty()) return space.action_rate(policy.default_action());
    if (dist.size() == 1) return space.action_rate(dist[0].action_k);

    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const double draw = uniform(rng);
    double cum = 0.0;
    for (const auto& e : dist) {
        cum += e.prob;
        if (draw <= cum) return space.action_rate(e.action_k);
    }
    return space.action_rate(dist.back().action_k);
}

std::pair<double, double> correct_step(double prev_stored_kwh, double u,
                                       const BatteryParams& battery) {
    const double cb = battery.capacity_kwh;
    const double raw = prev_stored_kwh + cb * u;
    if (raw > cb) return {cb, 1.0 - prev_stored_kwh / cb};
    if (raw < 0.0) return {0.0, -prev_stored_kwh / cb};
    return {raw, u};
}

void save_policy_csv(const Policy& policy, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    const StateSpace& space = policy.space();
    out << "hour,soc_index,quantile,peak_index,action_k,probability\n";
    char buf[40];
    for (std::int64_t s = 0; s < space.n_states(); ++s) {
        int i, j, q, r;
        space.decode_state(s, i, j, q, r);
        for (const auto& e : policy.distribution(s)) {
            std::snprintf(buf, sizeof(buf), "%.17g", e.prob);
            out << i << ',' << j << ',' << q << ',' << (space.has_peak() ? r : 0) << ','
                << e.action_k << ',' << buf << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Policy load_policy_csv(const std::string& path, const StateSpace& space) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty policy file");

    struct Row {
        int i, j, q, r, k;
        double prob;
    };
    std::vector<Row> raw;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Row row;
        if (std::sscanf(line.c_str(), "%d,%d,%d,%d,%d,%lf", &row.i, &row.j, &row.q, &row.r,
                        &row.k, &row.prob) != 6) {
            throw std::runtime_error(path + ": malformed policy row '" + line + "'");
        }
        if ((row.r == 0) == space.has_peak()) {
            throw std::runtime_error(path + ": policy peak axis does not match the run setup");
        }
        raw.push_back(row);
    }

    std::vector<std::vector<Policy::Entry>> per_state(space.n_states());
    for (const Row& row : raw) {
        const auto s = space.state_index(row.i, row.j, row.q, std::max(row.r, 1));
        per_state[s].push_back({static_cast<std::int16_t>(row.k), row.prob});
    }
    std::vector<std::int32_t> start(space.n_states() + 1, 0);
    std::vector<Policy::Entry> entries;
    for (std::int64_t s = 0; s < space.n_states(); ++s) {
        start[s] = static_cast<std::int32_t>(entries.size());
        for (const auto& e : per_state[s]) entries.push_back(e);
    }
    start[space.n_states()] = static_cast<std::int32_t>(entries.size());
    return Policy(space, std::move(start), std::move(entries));
}

}  // namespace battmdp
