#pragma once

#include <cstdint>
#include <stdexcept>

namespace battmdp {

// Axes of the dispatch MDP. States are (hour i, state-of-charge level j,
// demand quantile q) plus an optional peak-threshold level r; each state
// offers n_actions charge rates.
//
// Index conventions used throughout:
//   i : 1..n_hours      hour of day (i=1 covers 00:00-01:00)
//   j : 0..n_soc-1      state of charge in steps of 1/(n_soc-1)
//   q : 1..n_quantiles  demand quantile level
//   r : 1..n_peaks      peak threshold (only when n_peaks > 0)
//   k : 1..n_actions    charge-rate decision, u = (k - (n_actions+1)/2) / 10
//
// Flat state indices are lexicographic in (i, j, q, r); flat variable
// indices append k fastest. n_peaks == 0 means the peak axis is absent.
struct StateSpace {
    int n_hours = 24;
    int n_soc = 11;
    int n_quantiles = 9;
    int n_peaks = 0;
    int n_actions = 21;

    bool has_peak() const { return n_peaks > 0; }
    int peak_dim() const { return has_peak() ? n_peaks : 1; }

    std::int64_t n_states() const {
        return static_cast<std::int64_t>(n_hours) * n_soc * n_quantiles * peak_dim();
    }
    std::int64_t variable_count() const { return n_states() * n_actions; }

    // Constraint count in the "normalization + nonnegativity + balance"
    // accounting (one row per variable bound plus one balance row per state).
    std::int64_t constraint_count() const { return 1 + variable_count() + n_states(); }

    std::int64_t state_index(int i, int j, int q, int r = 1) const {
        check_state(i, j, q, r);
        std::int64_t s = i - 1;
        s = s * n_soc + j;
        s = s * n_quantiles + (q - 1);
        s = s * peak_dim() + (r - 1);
        return s;
    }

    void decode_state(std::int64_t s, int& i, int& j, int& q, int& r) const {
        r = static_cast<int>(s % peak_dim()) + 1;
        s /= peak_dim();
        q = static_cast<int>(s % n_quantiles) + 1;
        s /= n_quantiles;
        j = static_cast<int>(s % n_soc);
        i = static_cast<int>(s / n_soc) + 1;
    }

    std::int64_t var_index(std::int64_t state, int k) const {
        return state * n_actions + (k - 1);
    }

    // Charge rate for action k; with the default 21-action grid this is
    // -1.0, -0.9, ..., 0.9, 1.0.
    double action_rate(int k) const {
        if (k < 1 || k > n_actions) throw std::out_of_range("action index out of range");
        return (k - (n_actions + 1) / 2) / 10.0;
    }
    int no_op_action() const { return (n_actions + 1) / 2; }

    static StateSpace basic() { return StateSpace{}; }
    static StateSpace with_peaks(int n_peaks) {
        StateSpace s;
        s.n_peaks = n_peaks;
        return s;
    }

private:
    void check_state(int i, int j, int q, int r) const {
        if (i < 1 || i > n_hours || j < 0 || j >= n_soc || q < 1 || q > n_quantiles ||
            r < 1 || r > peak_dim()) {
            throw std::out_of_range("state index out of range");
        }
    }
};

}  // namespace battmdp
