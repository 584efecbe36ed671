#include "battmdp/ideal_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace battmdp {

namespace {

double hour_price(const PricingPolicy& pricing, const LoadSeries& load, int t) {
    const int h = load.hour_of_day(t);
    switch (pricing.kind) {
        case PricingKind::TouA: return pricing.tou_schedule[h];
        case PricingKind::RealtimeB: return pricing.realtime_prices[h];
        case PricingKind::EnergyLimitC: return pricing.low_price;
        case PricingKind::PeakD: return pricing.energy_price;
    }
    throw std::logic_error("bad pricing kind");
}

// Common per-hour block: u, E_B, E_G, E_s and optionally an import variable
// g >= max(E_G, 0) used when exports are not refunded.
struct HourBlock {
    int stride;
    int extra_per_hour;  // columns beyond the four shared ones
    bool import_var;

    int u(int t) const { return t * stride; }
    int eb(int t) const { return t * stride + 1; }
    int eg(int t) const { return t * stride + 2; }
    int es(int t) const { return t * stride + 3; }
    int g(int t) const { return t * stride + 4 + extra_per_hour; }
};

// Adds the shared structure: variables for hour t plus the grid-energy
// definition, the two-max battery-energy rows and the storage recursion.
void add_hour_core(lp::LpProblem& p, const HourBlock& blk, const IdealProblemSpec& spec,
                   const LoadSeries& load, int t, double eta_c) {
    const double cb = spec.battery.capacity_kwh;
    p.add_variable(-1.0, 1.0, 0.0);                          // u
    p.add_variable(-cb * eta_c, cb / eta_c, 0.0);            // E_B
    p.add_variable(-lp::inf, lp::inf, 0.0);                  // E_G
    p.add_variable(0.0, cb, 0.0);                            // E_s

    // E_G - E_B = load
    {
        const int cols[] = {blk.eg(t), blk.eb(t)};
        const double vals[] = {1.0, -1.0};
        p.add_row(lp::RowSense::Equal, load.values_kwh[t], cols, vals);
    }
    // E_B >= C_B eta u and E_B >= (C_B/eta) u (one row when eta_c == 1)
    {
        const int cols[] = {blk.eb(t), blk.u(t)};
        const double v1[] = {1.0, -cb * eta_c};
        p.add_row(lp::RowSense::GreaterEqual, 0.0, cols, v1);
        if (eta_c != 1.0) {
            const double v2[] = {1.0, -cb / eta_c};
            p.add_row(lp::RowSense::GreaterEqual, 0.0, cols, v2);
        }
    }
    // E_s(t) - E_s(t-1) - C_B u(t) = 0, anchored at the initial fill
    if (t == 0) {
        const int cols[] = {blk.es(t), blk.u(t)};
        const double vals[] = {1.0, -cb};
        p.add_row(lp::RowSense::Equal, spec.battery.initial_soc * cb, cols, vals);
    } else {
        const int cols[] = {blk.es(t), blk.es(t - 1), blk.u(t)};
        const double vals[] = {1.0, -1.0, -cb};
        p.add_row(lp::RowSense::Equal, 0.0, cols, vals);
    }
}

void add_import_var(lp::LpProblem& p, const HourBlock& blk, int t, double price) {
    p.add_variable(0.0, lp::inf, price);  // g
    const int cols[] = {blk.g(t), blk.eg(t)};
    const double vals[] = {1.0, -1.0};
    p.add_row(lp::RowSense::GreaterEqual, 0.0, cols, vals);
}

void reject_negative_prices(const IdealProblemSpec& spec) {
    spec.pricing.validate();  // already enforces nonnegative prices
}

}  // namespace

int IdealProblemSpec::horizon() const {
    const int full = static_cast<int>(load.size());
    const int h = horizon_hours < 0 ? full : horizon_hours;
    if (h <= 0 || h > full || h % 24 != 0) {
        throw std::invalid_argument("horizon must cover whole days within the series");
    }
    return h;
}

double IdealProblemSpec::effective_big_m() const {
    if (big_m > 0) return big_m;
    double max_load = 0.0;
    const int h = horizon();
    for (int t = 0; t < h; ++t) max_load = std::max(max_load, load.values_kwh[t]);
    return max_load + battery.capacity_kwh / battery.efficiency + 1.0;
}

LoadSeries IdealProblemSpec::trimmed_load() const {
    const int h = horizon();
    LoadSeries trimmed{load.start,
                       {load.values_kwh.begin(), load.values_kwh.begin() + h}};
    return trimmed;
}

lp::LpProblem build_policy_ab_lp(const IdealProblemSpec& spec) {
    if (spec.pricing.kind != PricingKind::TouA && spec.pricing.kind != PricingKind::RealtimeB) {
        throw std::invalid_argument("build_policy_ab_lp needs pricing A or B");
    }
    reject_negative_prices(spec);
    spec.battery.validate();
    const int H = spec.horizon();
    const double eta_c = spec.cost_case.apply_losses ? spec.battery.efficiency : 1.0;
    const bool import_var = !spec.cost_case.refund_exports;

    HourBlock blk{import_var ? 5 : 4, 0, import_var};
    lp::LpProblem p;
    p.reserve(blk.stride * H, 5 * H, 16 * static_cast<std::int64_t>(H));
    for (int t = 0; t < H; ++t) {
        add_hour_core(p, blk, spec, spec.load, t, eta_c);
        const double price = hour_price(spec.pricing, spec.load, t);
        if (import_var) {
            add_import_var(p, blk, t, price);
        } else {
            p.set_objective_coeff(blk.eg(t), price);
        }
    }
    return p;
}

lp::LpProblem build_policy_c_milp(const IdealProblemSpec& spec) {
    if (spec.pricing.kind != PricingKind::EnergyLimitC) {
        throw std::invalid_argument("build_policy_c_milp needs pricing C");
    }
    reject_negative_prices(spec);
    spec.battery.validate();
    const int H = spec.horizon();
    const double cb = spec.battery.capacity_kwh;
    const double eta_c = spec.cost_case.apply_losses ? spec.battery.efficiency : 1.0;
    const bool import_var = !spec.cost_case.refund_exports;
    const double M = spec.effective_big_m();
    const double limit = spec.pricing.limit_kwh;
    const double low = spec.pricing.low_price;
    const double surcharge = spec.pricing.high_price - spec.pricing.low_price;

    // block layout: u, E_B, E_G, E_s, Z, B [, g]
    HourBlock blk{import_var ? 7 : 6, 2, import_var};
    const auto z_of = [&](int t) { return t * blk.stride + 4; };
    const auto b_of = [&](int t) { return t * blk.stride + 5; };

    lp::LpProblem p;
    p.reserve(blk.stride * H, 11 * H, 30 * static_cast<std::int64_t>(H));
    for (int t = 0; t < H; ++t) {
        add_hour_core(p, blk, spec, spec.load, t, eta_c);
        p.add_variable(-cb * eta_c, cb / eta_c, surcharge);                 // Z
        const int b = p.add_variable(0.0, 1.0, surcharge * spec.load.values_kwh[t]);  // B
        p.set_binary(b);

        // E_G >= limit - M(1-B)  and  E_G <= limit + M B
        {
            const int cols[] = {blk.eg(t), b_of(t)};
            const double v1[] = {1.0, -M};
            p.add_row(lp::RowSense::GreaterEqual, limit - M, cols, v1);
            p.add_row(lp::RowSense::LessEqual, limit, cols, v1);
        }
        // linearization of Z = B * E_B
        {
            const int cols_zb[] = {z_of(t), b_of(t)};
            const double v1[] = {1.0, cb * eta_c};
            p.add_row(lp::RowSense::GreaterEqual, 0.0, cols_zb, v1);  // Z >= -C_B eta B
            const double v2[] = {1.0, -cb / eta_c};
            p.add_row(lp::RowSense::LessEqual, 0.0, cols_zb, v2);     // Z <= (C_B/eta) B
            const int cols_ebz[] = {blk.eb(t), z_of(t), b_of(t)};
            const double v3[] = {1.0, -1.0, -cb * eta_c};
            p.add_row(lp::RowSense::GreaterEqual, -cb * eta_c, cols_ebz, v3);
            const double v4[] = {1.0, -1.0, cb / eta_c};
            p.add_row(lp::RowSense::LessEqual, cb / eta_c, cols_ebz, v4);
        }

        if (import_var) {
            add_import_var(p, blk, t, low);
        } else {
            p.set_objective_coeff(blk.eg(t), low);
        }
    }
    return p;
}

lp::LpProblem build_policy_d_program(const IdealProblemSpec& spec) {
    if (spec.pricing.kind != PricingKind::PeakD) {
        throw std::invalid_argument("build_policy_d_program needs pricing D");
    }
    reject_negative_prices(spec);
    spec.battery.validate();
    const int H = spec.horizon();
    const int days = H / 24;
    const double eta_c = spec.cost_case.apply_losses ? spec.battery.efficiency : 1.0;
    const bool import_var = !spec.cost_case.refund_exports;

    HourBlock blk{import_var ? 5 : 4, 0, import_var};
    lp::LpProblem p;
    p.reserve(blk.stride * H + days, 6 * H, 18 * static_cast<std::int64_t>(H));
    for (int t = 0; t < H; ++t) {
        add_hour_core(p, blk, spec, spec.load, t, eta_c);
        if (import_var) {
            add_import_var(p, blk, t, spec.pricing.energy_price);
        } else {
            p.set_objective_coeff(blk.eg(t), spec.pricing.energy_price);
        }
    }
    // one nonnegative peak variable per day, above every hour's grid energy
    for (int n = 0; n < days; ++n) {
        const int pvar = p.add_variable(0.0, lp::inf, spec.pricing.peak_price);
        for (int t = 24 * n; t < 24 * (n + 1); ++t) {
            const int cols[] = {pvar, blk.eg(t)};
            const double vals[] = {1.0, -1.0};
            p.add_row(lp::RowSense::GreaterEqual, 0.0, cols, vals);
        }
    }
    return p;
}

IdealResult ideal_schedule(const IdealProblemSpec& spec, const lp::SolverOptions& options) {
    lp::LpProblem program;
    bool is_mip = false;
    switch (spec.pricing.kind) {
        case PricingKind::TouA:
        case PricingKind::RealtimeB: program = build_policy_ab_lp(spec); break;
        case PricingKind::EnergyLimitC:
            program = build_policy_c_milp(spec);
            is_mip = true;
            break;
        case PricingKind::PeakD: program = build_policy_d_program(spec); break;
    }

    IdealResult result;
    result.solution = is_mip ? lp::solve_mip(program, options) : lp::solve_lp(program, options);
    if (result.solution.status != lp::SolveStatus::Optimal) {
        throw SolverFailure(std::string("ideal schedule solve ended with status ") +
                                lp::to_string(result.solution.status),
                            result.solution.status, result.solution.mip_gap);
    }

    const int H = spec.horizon();
    const int stride = spec.pricing.kind == PricingKind::EnergyLimitC
                           ? (spec.cost_case.refund_exports ? 6 : 7)
                           : (spec.cost_case.refund_exports ? 4 : 5);
    result.schedule.resize(H);
    for (int t = 0; t < H; ++t) {
        result.schedule[t] = std::clamp(result.solution.values[t * stride], -1.0, 1.0);
    }

    const LoadSeries trimmed = spec.trimmed_load();
    result.sim = run_schedule(trimmed, result.schedule, spec.battery, spec.pricing,
                              spec.cost_case);
    result.replay_gap = std::abs(result.sim.bill_total - result.solution.objective);
    return result;
}

}  // namespace battmdp
