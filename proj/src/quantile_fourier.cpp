#include "battmdp/quantile_fourier.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace battmdp {

namespace {
constexpr double two_pi = 6.283185307179586476925286766559;
}

double pinball_loss(double error, double beta) {
    if (beta <= 0.0 || beta >= 1.0) throw std::invalid_argument("beta must lie in (0, 1)");
    return beta * std::max(error, 0.0) + (1.0 - beta) * std::max(-error, 0.0);
}

double evaluate(const QuantileModel& model, double t_hours) {
    double v = model.mu;
    for (int h = 1; h <= model.n_waves(); ++h) {
        const double arg = two_pi * h * QuantileModel::base_frequency * t_hours;
        v += model.amplitudes_a[h - 1] * std::sin(arg) + model.amplitudes_b[h - 1] * std::cos(arg);
    }
    return v;
}

void QuantileSet::validate() const {
    for (std::size_t i = 0; i < models.size(); ++i) {
        if (i > 0 && models[i].beta <= models[i - 1].beta) {
            throw std::invalid_argument("quantile betas must be strictly increasing");
        }
        if (models[i].amplitudes_a.size() != models[i].amplitudes_b.size()) {
            throw std::invalid_argument("sine/cosine coefficient lists differ in length");
        }
    }
}

// Variable layout of the fit LP: [mu, a_1..a_n, b_1..b_n] free, then one
// (p_i, n_i) >= 0 pair per sample with p_i - n_i the residual. One equality
// row per sample: prediction + p_i - n_i = x_i. The pinball objective is
// (1/N) sum beta p_i + (1-beta) n_i.
QuantileModel fit(const LoadSeries& train, double beta, int n_waves) {
    if (train.size() == 0) throw std::invalid_argument("empty training series");
    if (n_waves < 0) throw std::invalid_argument("n_waves must be >= 0");
    if (beta <= 0.0 || beta >= 1.0) throw std::invalid_argument("beta must lie in (0, 1)");

    const int N = static_cast<int>(train.size());
    const int n_model = 1 + 2 * n_waves;
    lp::LpProblem p;
    p.reserve(n_model + 2 * N, N, static_cast<std::int64_t>(N) * (n_model + 2));
    for (int c = 0; c < n_model; ++c) p.add_variable(-lp::inf, lp::inf, 0.0);
    const double inv_n = 1.0 / N;
    for (int i = 0; i < N; ++i) {
        p.add_variable(0.0, lp::inf, beta * inv_n);          // p_i
        p.add_variable(0.0, lp::inf, (1.0 - beta) * inv_n);  // n_i
    }

    std::vector<int> cols(n_model + 2);
    std::vector<double> vals(n_model + 2);
    for (int i = 0; i < N; ++i) {
        const double t = train.start.hour + static_cast<double>(i);
        int nz = 0;
        cols[nz] = 0;
        vals[nz++] = 1.0;
        for (int h = 1; h <= n_waves; ++h) {
            const double arg = two_pi * h * QuantileModel::base_frequency * t;
            cols[nz] = 2 * h - 1;
            vals[nz++] = std::sin(arg);
            cols[nz] = 2 * h;
            vals[nz++] = std::cos(arg);
        }
        cols[nz] = n_model + 2 * i;
        vals[nz++] = 1.0;
        cols[nz] = n_model + 2 * i + 1;
        vals[nz++] = -1.0;
        p.add_row(lp::RowSense::Equal, train.values_kwh[i],
                  std::span<const int>(cols.data(), nz), std::span<const double>(vals.data(), nz));
    }

    const lp::LpSolution sol = lp::solve_lp(p);
    if (sol.status != lp::SolveStatus::Optimal) {
        throw std::runtime_error(std::string("quantile fit LP did not solve: ") +
                                 lp::to_string(sol.status));
    }

    QuantileModel model;
    model.beta = beta;
    model.mu = sol.values[0];
    model.amplitudes_a.resize(n_waves);
    model.amplitudes_b.resize(n_waves);
    for (int h = 1; h <= n_waves; ++h) {
        model.amplitudes_a[h - 1] = sol.values[2 * h - 1];
        model.amplitudes_b[h - 1] = sol.values[2 * h];
    }
    model.fit_loss = sol.objective;
    return model;
}

QuantileSet fit_quantile_set(const LoadSeries& train, int n_waves,
                             const std::vector<double>& betas) {
    QuantileSet qset;
    qset.models.reserve(betas.size());
    for (double beta : betas) qset.models.push_back(fit(train, beta, n_waves));
    qset.validate();
    return qset;
}

int assign_quantile(const QuantileSet& qset, double observation_kwh, double t_hours) {
    if (qset.models.empty()) throw std::invalid_argument("empty quantile set");
    int best = 1;
    double best_dist = lp::inf;
    for (int q = 1; q <= qset.size(); ++q) {
        const double dist = std::abs(evaluate(qset.models[q - 1], t_hours) - observation_kwh);
        if (dist < best_dist) {
            best_dist = dist;
            best = q;
        }
    }
    return best;
}

std::vector<int> assign_quantile_sequence(const QuantileSet& qset, const LoadSeries& series) {
    std::vector<int> seq(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double t = series.start.hour + static_cast<double>(i);
        seq[i] = assign_quantile(qset, series.values_kwh[i], t);
    }
    return seq;
}

double mean_pinball_loss(const QuantileModel& model, const LoadSeries& series) {
    double s = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double t = series.start.hour + static_cast<double>(i);
        s += pinball_loss(series.values_kwh[i] - evaluate(model, t), model.beta);
    }
    return s / static_cast<double>(series.size());
}

int select_n_waves(const LoadSeries& train, const std::vector<int>& candidates) {
    if (candidates.empty()) throw std::invalid_argument("no candidate wave counts");
    if (candidates.size() == 1) return candidates[0];

    const std::int64_t half_days = static_cast<std::int64_t>(train.n_days()) / 2;
    if (half_days == 0) throw std::invalid_argument("series too short to hold out a split");
    auto [fit_part, score_part] = split_train_test(train, half_days * 24);

    int best = candidates[0];
    double best_loss = lp::inf;
    for (int n : candidates) {
        const QuantileModel m = fit(fit_part, 0.5, n);
        const double loss = mean_pinball_loss(m, score_part);
        // ties within noise go to the smaller count
        if (loss < best_loss - 1e-9 * (1.0 + std::abs(best_loss))) {
            best_loss = loss;
            best = n;
        }
    }
    return best;
}

void save_quantile_set_json(const QuantileSet& qset, const std::string& path) {
    nlohmann::json j;
    j["models"] = nlohmann::json::array();
    for (const auto& m : qset.models) {
        j["models"].push_back({{"beta", m.beta},
                               {"mu", m.mu},
                               {"amplitudes_a", m.amplitudes_a},
                               {"amplitudes_b", m.amplitudes_b},
                               {"n_waves", m.n_waves()},
                               {"fit_loss", m.fit_loss}});
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

QuantileSet load_quantile_set_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    QuantileSet qset;
    for (const auto& jm : j.at("models")) {
        QuantileModel m;
        m.beta = jm.at("beta").get<double>();
        m.mu = jm.at("mu").get<double>();
        m.amplitudes_a = jm.at("amplitudes_a").get<std::vector<double>>();
        m.amplitudes_b = jm.at("amplitudes_b").get<std::vector<double>>();
        m.fit_loss = jm.value("fit_loss", 0.0);
        qset.models.push_back(std::move(m));
    }
    qset.validate();
    return qset;
}

}  // namespace battmdp
