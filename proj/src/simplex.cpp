// Bounded-variable revised simplex.
//
// The problem min c.x, lo <= Ax <= hi, l <= x <= u is handled in the logical
// form [A | -I] (x, s) = 0 with s in [lo, hi]: every row owns a logical
// (slack) variable, so ranged and equality rows need no special cases and the
// all-logical basis is always nonsingular. The basis is refactorized with a
// sparse LU every few dozen pivots and updated in between with product-form
// eta vectors. Phase 1 minimizes the sum of bound violations of the basic
// variables (costs recomputed each iteration), phase 2 the true objective.
// Pricing is Dantzig (largest violation, lowest index on ties) with a switch
// to Bland's rule after a run of degenerate steps.

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <utility>
#include <vector>

#include "battmdp/lp_core.hpp"

namespace battmdp::lp {

namespace {

enum class VarState : std::uint8_t { Basic, AtLower, AtUpper, Free };

struct Eta {
    int pos;       // basis position of the pivot
    double pivot;  // w[pos]
    std::vector<std::pair<int, double>> entries;  // w restricted to other positions
};

class Simplex {
public:
    Simplex(const LpProblem& p, const SolverOptions& opt) : p_(p), opt_(opt) {
        n_ = p.num_vars();
        m_ = p.num_rows();
        build_columns();
        lower_.assign(n_ + m_, 0.0);
        upper_.assign(n_ + m_, 0.0);
        for (int j = 0; j < n_; ++j) {
            lower_[j] = p.lower_bound(j);
            upper_[j] = p.upper_bound(j);
        }
        for (int i = 0; i < m_; ++i) {
            lower_[n_ + i] = p.row_lower(i);
            upper_[n_ + i] = p.row_upper(i);
        }
        presolve();
    }

    LpSolution run() {
        LpSolution sol;
        if (presolve_infeasible_) {
            sol.status = SolveStatus::Infeasible;
            finish(sol);
            return sol;
        }
        if (unbounded_empty_column_ >= 0) {
            sol.status = SolveStatus::Unbounded;
            finish(sol);
            return sol;
        }
        if (m_ == 0) {
            sol.status = SolveStatus::Optimal;
            finish(sol);
            return sol;
        }

        init_basis();
        crash_singletons();
        if (!refactorize()) {
            sol.status = SolveStatus::IterationLimit;
            finish(sol);
            return sol;
        }

        const SolveStatus st = iterate();
        sol.status = st;
        sol.iterations = iterations_;
        clean_recompute();
        finish(sol);
        return sol;
    }

private:
    const LpProblem& p_;
    const SolverOptions& opt_;
    int n_ = 0, m_ = 0;

    // structural columns, CSC
    std::vector<std::int64_t> col_starts_;
    std::vector<int> col_rows_;
    std::vector<double> col_vals_;

    std::vector<double> lower_, upper_;  // combined bounds (structural + logical)
    bool presolve_infeasible_ = false;
    int unbounded_empty_column_ = -1;

    std::vector<int> basic_var_;       // variable per basis position
    std::vector<int> basis_pos_;       // position per variable, -1 if nonbasic
    std::vector<VarState> vstat_;
    std::vector<double> xval_;

    mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
    std::vector<Eta> etas_;
    bool factor_ok_ = false;

    std::int64_t iterations_ = 0;
    int degenerate_run_ = 0;
    bool bland_ = false;

    Eigen::VectorXd work_, duals_;

    void build_columns() {
        std::vector<int> counts(n_, 0);
        for (int r = 0; r < m_; ++r) {
            for (int c : p_.row_indices(r)) ++counts[c];
        }
        col_starts_.assign(n_ + 1, 0);
        for (int j = 0; j < n_; ++j) col_starts_[j + 1] = col_starts_[j] + counts[j];
        col_rows_.resize(col_starts_[n_]);
        col_vals_.resize(col_starts_[n_]);
        std::vector<std::int64_t> cursor(col_starts_.begin(), col_starts_.end() - 1);
        for (int r = 0; r < m_; ++r) {
            const auto idx = p_.row_indices(r);
            const auto val = p_.row_values(r);
            for (std::size_t t = 0; t < idx.size(); ++t) {
                const auto at = cursor[idx[t]]++;
                col_rows_[at] = r;
                col_vals_[at] = val[t];
            }
        }
    }

    // Empty rows become never-binding, exact duplicate rows are merged onto
    // their first occurrence, and empty columns are pinned at their cheapest
    // bound. Nothing is physically removed, so no index remapping is needed.
    void presolve() {
        std::map<std::vector<std::pair<int, double>>, int> seen;
        std::vector<std::pair<int, double>> key;
        for (int r = 0; r < m_; ++r) {
            const auto idx = p_.row_indices(r);
            const auto val = p_.row_values(r);
            if (idx.empty()) {
                if (lower_[n_ + r] > 0.0 || upper_[n_ + r] < 0.0) presolve_infeasible_ = true;
                lower_[n_ + r] = -inf;
                upper_[n_ + r] = inf;
                continue;
            }
            key.assign(idx.size(), {});
            for (std::size_t t = 0; t < idx.size(); ++t) key[t] = {idx[t], val[t]};
            std::sort(key.begin(), key.end());
            auto [it, inserted] = seen.try_emplace(key, r);
            if (!inserted) {
                const int first = n_ + it->second;
                lower_[first] = std::max(lower_[first], lower_[n_ + r]);
                upper_[first] = std::min(upper_[first], upper_[n_ + r]);
                if (lower_[first] > upper_[first]) presolve_infeasible_ = true;
                lower_[n_ + r] = -inf;
                upper_[n_ + r] = inf;
            }
        }
        for (int j = 0; j < n_; ++j) {
            if (col_starts_[j] != col_starts_[j + 1]) continue;
            const double c = p_.objective_coeff(j);
            double v;
            if (c > 0.0 || (c == 0.0 && lower_[j] > -inf)) {
                v = lower_[j];
            } else if (c < 0.0 || upper_[j] < inf) {
                v = upper_[j];
            } else {
                v = 0.0;
            }
            if (!std::isfinite(v)) {
                if (c == 0.0) {
                    v = 0.0;
                } else {
                    unbounded_empty_column_ = j;
                    continue;
                }
            }
            lower_[j] = upper_[j] = v;
        }
    }

    double initial_value(int j) const {
        if (lower_[j] > -inf) return lower_[j];
        if (upper_[j] < inf) return upper_[j];
        return 0.0;
    }

    void init_basis() {
        basic_var_.resize(m_);
        basis_pos_.assign(n_ + m_, -1);
        vstat_.assign(n_ + m_, VarState::AtLower);
        xval_.assign(n_ + m_, 0.0);
        for (int j = 0; j < n_; ++j) {
            xval_[j] = initial_value(j);
            vstat_[j] = lower_[j] > -inf ? VarState::AtLower
                        : upper_[j] < inf ? VarState::AtUpper
                                          : VarState::Free;
        }
        // row activities of the nonbasic structurals
        std::vector<double> act(m_, 0.0);
        for (int j = 0; j < n_; ++j) {
            if (xval_[j] == 0.0) continue;
            for (auto t = col_starts_[j]; t < col_starts_[j + 1]; ++t) {
                act[col_rows_[t]] += col_vals_[t] * xval_[j];
            }
        }
        for (int i = 0; i < m_; ++i) {
            basic_var_[i] = n_ + i;
            basis_pos_[n_ + i] = i;
            vstat_[n_ + i] = VarState::Basic;
            xval_[n_ + i] = act[i];
        }
    }

    // For rows infeasible at the starting point, pivot in a structural
    // singleton column when one can absorb the violation on its own. This
    // keeps the basis diagonal and spares phase 1 one pivot per such row
    // (the residual-split columns of a regression fit, for instance).
    void crash_singletons() {
        std::vector<std::vector<int>> row_singletons(m_);
        for (int j = 0; j < n_; ++j) {
            if (col_starts_[j + 1] - col_starts_[j] == 1 && lower_[j] < upper_[j]) {
                row_singletons[col_rows_[col_starts_[j]]].push_back(j);
            }
        }
        for (int i = 0; i < m_; ++i) {
            const double act = xval_[n_ + i];
            const double lo = lower_[n_ + i], hi = upper_[n_ + i];
            if (act >= lo - opt_.feasibility_tol && act <= hi + opt_.feasibility_tol) continue;
            const double pin = act < lo ? lo : hi;
            if (!std::isfinite(pin)) continue;
            for (int j : row_singletons[i]) {
                const double a = col_vals_[col_starts_[j]];
                if (std::abs(a) < 1e-12) continue;
                const double needed = xval_[j] + (pin - act) / a;
                if (needed < lower_[j] - 1e-12 || needed > upper_[j] + 1e-12) continue;
                basic_var_[i] = j;
                basis_pos_[j] = i;
                basis_pos_[n_ + i] = -1;
                vstat_[j] = VarState::Basic;
                vstat_[n_ + i] = act < lo ? VarState::AtLower : VarState::AtUpper;
                xval_[n_ + i] = pin;
                xval_[j] = needed;
                break;
            }
        }
    }

    bool refactorize() {
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(static_cast<std::size_t>(m_) * 4);
        for (int pos = 0; pos < m_; ++pos) {
            const int v = basic_var_[pos];
            if (v < n_) {
                for (auto t = col_starts_[v]; t < col_starts_[v + 1]; ++t) {
                    trips.emplace_back(col_rows_[t], pos, col_vals_[t]);
                }
            } else {
                trips.emplace_back(v - n_, pos, -1.0);
            }
        }
        Eigen::SparseMatrix<double> B(m_, m_);
        B.setFromTriplets(trips.begin(), trips.end());
        B.makeCompressed();
        lu_.analyzePattern(B);
        lu_.factorize(B);
        factor_ok_ = lu_.info() == Eigen::Success;
        etas_.clear();
        if (factor_ok_) recompute_basic_values();
        return factor_ok_;
    }

    void recompute_basic_values() {
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
        for (int j = 0; j < n_ + m_; ++j) {
            if (vstat_[j] == VarState::Basic || xval_[j] == 0.0) continue;
            if (j < n_) {
                for (auto t = col_starts_[j]; t < col_starts_[j + 1]; ++t) {
                    rhs[col_rows_[t]] -= col_vals_[t] * xval_[j];
                }
            } else {
                rhs[j - n_] += xval_[j];
            }
        }
        Eigen::VectorXd xb = lu_.solve(rhs);
        for (int pos = 0; pos < m_; ++pos) xval_[basic_var_[pos]] = xb[pos];
    }

    mutable Eigen::VectorXd solve_tmp_;

    void ftran(Eigen::VectorXd& v) const {
        solve_tmp_ = lu_.solve(v);
        v.swap(solve_tmp_);
        for (const Eta& e : etas_) {
            const double t = v[e.pos] / e.pivot;
            v[e.pos] = t;
            if (t != 0.0) {
                for (const auto& [i, w] : e.entries) v[i] -= w * t;
            }
        }
    }

    void btran(Eigen::VectorXd& v) const {
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            double s = 0.0;
            for (const auto& [i, w] : it->entries) s += w * v[i];
            v[it->pos] = (v[it->pos] - s) / it->pivot;
        }
        solve_tmp_ = lu_.adjoint().solve(v);
        v.swap(solve_tmp_);
    }

    void scatter_column(int j, Eigen::VectorXd& v) const {
        v.setZero();
        if (j < n_) {
            for (auto t = col_starts_[j]; t < col_starts_[j + 1]; ++t) {
                v[col_rows_[t]] = col_vals_[t];
            }
        } else {
            v[j - n_] = -1.0;
        }
    }

    double column_dot(int j, const Eigen::VectorXd& y) const {
        if (j >= n_) return -y[j - n_];
        double s = 0.0;
        for (auto t = col_starts_[j]; t < col_starts_[j + 1]; ++t) {
            s += col_vals_[t] * y[col_rows_[t]];
        }
        return s;
    }

    double objective_coeff(int j) const { return j < n_ ? p_.objective_coeff(j) : 0.0; }

    double total_infeasibility() const {
        double s = 0.0;
        for (int pos = 0; pos < m_; ++pos) {
            const int v = basic_var_[pos];
            s += std::max(0.0, lower_[v] - xval_[v]) + std::max(0.0, xval_[v] - upper_[v]);
        }
        return s;
    }

    double max_basic_violation() const {
        double s = 0.0;
        for (int pos = 0; pos < m_; ++pos) {
            const int v = basic_var_[pos];
            s = std::max(s, lower_[v] - xval_[v]);
            s = std::max(s, xval_[v] - upper_[v]);
        }
        return s;
    }

    SolveStatus iterate() {
        duals_.resize(m_);
        work_.resize(m_);
        const double ftol = opt_.feasibility_tol;

        while (iterations_ < opt_.iteration_limit) {
            const bool phase1 = max_basic_violation() > ftol;

            // duals for the active objective
            for (int pos = 0; pos < m_; ++pos) {
                const int v = basic_var_[pos];
                if (phase1) {
                    duals_[pos] = xval_[v] < lower_[v] - ftol ? -1.0
                                  : xval_[v] > upper_[v] + ftol ? 1.0
                                                                : 0.0;
                } else {
                    duals_[pos] = objective_coeff(v);
                }
            }
            btran(duals_);

            // pricing
            int enter = -1;
            double best = 0.0;
            for (int j = 0; j < n_ + m_; ++j) {
                const VarState st = vstat_[j];
                if (st == VarState::Basic || lower_[j] == upper_[j]) continue;
                const double cj = phase1 ? 0.0 : objective_coeff(j);
                const double d = cj - column_dot(j, duals_);
                const double dtol = opt_.optimality_tol * (1.0 + std::abs(cj));
                double viol = 0.0;
                if (st == VarState::AtLower && d < -dtol) viol = -d;
                else if (st == VarState::AtUpper && d > dtol) viol = d;
                else if (st == VarState::Free && std::abs(d) > dtol) viol = std::abs(d);
                if (viol > 0.0) {
                    if (bland_) { enter = j; break; }
                    if (viol > best) { best = viol; enter = j; }
                }
            }
            if (enter < 0) {
                if (phase1) return SolveStatus::Infeasible;
                return SolveStatus::Optimal;
            }

            const double d_enter = (phase1 ? 0.0 : objective_coeff(enter)) -
                                   column_dot(enter, duals_);
            const int dir = (vstat_[enter] == VarState::AtLower ||
                             (vstat_[enter] == VarState::Free && d_enter < 0.0))
                                ? 1
                                : -1;

            scatter_column(enter, work_);
            ftran(work_);

            // ratio test; in phase 1 an infeasible basic blocks at the bound
            // it violates (it turns feasible there and leaves the basis)
            double t_limit = upper_[enter] - lower_[enter];  // bound flip distance
            int leave_pos = -1;
            double best_t = t_limit;
            double best_w = 0.0;
            for (int pos = 0; pos < m_; ++pos) {
                const double w = work_[pos];
                if (std::abs(w) < 1e-11) continue;
                const int v = basic_var_[pos];
                const double delta = -dir * w;  // change of x_v per unit step
                const double xv = xval_[v];
                double t = inf;
                bool hits_lower = false;
                if (phase1 && xv < lower_[v] - ftol) {
                    if (delta > 0.0) { t = (lower_[v] - xv) / delta; hits_lower = true; }
                } else if (phase1 && xv > upper_[v] + ftol) {
                    if (delta < 0.0) { t = (upper_[v] - xv) / delta; hits_lower = false; }
                } else if (delta < 0.0 && lower_[v] > -inf) {
                    t = (lower_[v] - xv) / delta;
                    hits_lower = true;
                } else if (delta > 0.0 && upper_[v] < inf) {
                    t = (upper_[v] - xv) / delta;
                    hits_lower = false;
                }
                if (t == inf) continue;
                t = std::max(t, 0.0);
                if (t < best_t - 1e-10 ||
                    (t < best_t + 1e-10 &&
                     (leave_pos < 0 || std::abs(w) > std::abs(best_w)))) {
                    best_t = t;
                    leave_pos = pos;
                    best_w = w;
                    // remember which bound the leaving variable lands on
                    leave_at_lower_ = hits_lower;
                }
            }

            ++iterations_;

            if (leave_pos < 0) {
                if (best_t == inf || !std::isfinite(best_t)) {
                    if (phase1) {
                        // cannot happen for a genuinely improving direction;
                        // treat as numerical stall
                        if (!etas_.empty()) { if (!refactorize()) return SolveStatus::IterationLimit; continue; }
                        return SolveStatus::IterationLimit;
                    }
                    return SolveStatus::Unbounded;
                }
                // bound flip
                apply_step(enter, dir, best_t);
                xval_[enter] = dir > 0 ? upper_[enter] : lower_[enter];
                vstat_[enter] = dir > 0 ? VarState::AtUpper : VarState::AtLower;
                track_degeneracy(best_t);
                continue;
            }

            if (std::abs(best_w) < 1e-9 && !etas_.empty()) {
                // refuse an unstable pivot; retry from a fresh factorization
                if (!refactorize()) return SolveStatus::IterationLimit;
                continue;
            }

            pivot(enter, dir, leave_pos, best_t);
            track_degeneracy(best_t);

            if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) {
                if (!refactorize()) return SolveStatus::IterationLimit;
            }
            if (opt_.log && iterations_ % 10000 == 0) {
                std::fprintf(stderr, "simplex: iter %lld infeas %.3e\n",
                             static_cast<long long>(iterations_), total_infeasibility());
            }
        }
        return SolveStatus::IterationLimit;
    }

    bool leave_at_lower_ = false;

    void apply_step(int enter, int dir, double t) {
        if (t != 0.0) {
            for (int pos = 0; pos < m_; ++pos) {
                const double w = work_[pos];
                if (w != 0.0) xval_[basic_var_[pos]] -= dir * t * w;
            }
        }
        xval_[enter] += dir * t;
    }

    void pivot(int enter, int dir, int leave_pos, double t) {
        apply_step(enter, dir, t);
        const int leave = basic_var_[leave_pos];
        // snap the leaving variable exactly onto its bound
        xval_[leave] = leave_at_lower_ ? lower_[leave] : upper_[leave];
        vstat_[leave] = leave_at_lower_ ? VarState::AtLower : VarState::AtUpper;
        if (lower_[leave] <= -inf && upper_[leave] >= inf) vstat_[leave] = VarState::Free;
        basis_pos_[leave] = -1;

        basic_var_[leave_pos] = enter;
        basis_pos_[enter] = leave_pos;
        vstat_[enter] = VarState::Basic;

        Eta e;
        e.pos = leave_pos;
        e.pivot = work_[leave_pos];
        for (int pos = 0; pos < m_; ++pos) {
            if (pos != leave_pos && std::abs(work_[pos]) > 1e-13) {
                e.entries.emplace_back(pos, work_[pos]);
            }
        }
        etas_.push_back(std::move(e));
    }

    void track_degeneracy(double t) {
        if (t <= 1e-12) {
            if (++degenerate_run_ > opt_.bland_trigger) bland_ = true;
        } else {
            degenerate_run_ = 0;
            if (t > 1e-10) bland_ = false;
        }
    }

    void clean_recompute() {
        if (m_ == 0 || !factor_ok_) return;
        if (!etas_.empty()) {
            if (!refactorize()) return;
        } else {
            recompute_basic_values();
        }
    }

    void finish(LpSolution& sol) {
        sol.values.assign(n_, 0.0);
        if (m_ > 0 && !xval_.empty()) {
            for (int j = 0; j < n_; ++j) sol.values[j] = xval_[j];
        } else {
            for (int j = 0; j < n_; ++j) sol.values[j] = initial_value(j);
        }
        double obj = 0.0;
        for (int j = 0; j < n_; ++j) obj += p_.objective_coeff(j) * sol.values[j];
        sol.objective = obj;

        double worst = 0.0;
        for (int j = 0; j < n_; ++j) {
            worst = std::max(worst, p_.lower_bound(j) - sol.values[j]);
            worst = std::max(worst, sol.values[j] - p_.upper_bound(j));
        }
        for (int r = 0; r < m_; ++r) {
            const double a = p_.row_activity(r, sol.values);
            worst = std::max(worst, p_.row_lower(r) - a);
            worst = std::max(worst, a - p_.row_upper(r));
        }
        sol.max_primal_infeasibility = std::max(worst, 0.0);
        if (sol.status == SolveStatus::Optimal &&
            sol.max_primal_infeasibility > opt_.feasibility_tol) {
            sol.status = SolveStatus::IterationLimit;
        }
    }
};

}  // namespace

LpSolution solve_lp(const LpProblem& problem, const SolverOptions& options) {
    if (problem.has_integers()) {
        throw std::invalid_argument("solve_lp called with integrality flags set");
    }
    return detail::solve_relaxation(problem, options);
}

namespace detail {

LpSolution solve_relaxation(const LpProblem& problem, const SolverOptions& options) {
    problem.validate();
    Simplex s(problem, options);
    return s.run();
}

}  // namespace detail

}  // namespace battmdp::lp
