#pragma once

#include <string>
#include <vector>

#include "battmdp/load_series.hpp"
#include "battmdp/lp_core.hpp"

namespace battmdp {

// Asymmetric (pinball) loss: beta*max(e,0) + (1-beta)*max(-e,0).
double pinball_loss(double error, double beta);

// One fitted quantile curve over the trigonometric day basis
//   mu + sum_h a_h sin(2 pi h f t) + b_h cos(2 pi h f t),  f = 1/24 per hour,
// so every harmonic is an exact multiple of the daily frequency and the
// curve repeats with a 24 h period.
struct QuantileModel {
    double beta = 0.5;
    double mu = 0.0;
    std::vector<double> amplitudes_a;  // sine
    std::vector<double> amplitudes_b;  // cosine
    double fit_loss = 0.0;             // mean pinball loss at the optimum

    int n_waves() const { return static_cast<int>(amplitudes_a.size()); }
    static constexpr double base_frequency = 1.0 / 24.0;
};

double evaluate(const QuantileModel& model, double t_hours);

struct QuantileSet {
    std::vector<QuantileModel> models;  // betas strictly increasing

    int size() const { return static_cast<int>(models.size()); }
    void validate() const;
};

inline std::vector<double> default_betas() {
    return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
}

// Mean-pinball-loss minimization posed as an LP (split positive/negative
// residuals; mu and the amplitudes free) and solved with lp_core. n_waves = 0
// fits the constant term alone.
QuantileModel fit(const LoadSeries& train, double beta, int n_waves);

QuantileSet fit_quantile_set(const LoadSeries& train, int n_waves,
                             const std::vector<double>& betas = default_betas());

// Index (1-based) of the fitted curve nearest to the observation at time t;
// ties break toward the lower index.
int assign_quantile(const QuantileSet& qset, double observation_kwh, double t_hours);

std::vector<int> assign_quantile_sequence(const QuantileSet& qset, const LoadSeries& series);

inline std::vector<int> default_n_wave_candidates() {
    return {1, 2, 5, 10, 20, 50, 100, 200, 500, 1000};
}

// Fits each candidate on the first half of `train` and scores mean pinball
// loss (beta = 0.5) on the second half; returns the loss-minimizing count
// with ties (within a small relative tolerance) going to the smaller count.
int select_n_waves(const LoadSeries& train, const std::vector<int>& candidates);

double mean_pinball_loss(const QuantileModel& model, const LoadSeries& series);

void save_quantile_set_json(const QuantileSet& qset, const std::string& path);
QuantileSet load_quantile_set_json(const std::string& path);

}  // namespace battmdp
