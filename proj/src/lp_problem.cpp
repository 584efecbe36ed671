#include "battmdp/lp_core.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace battmdp::lp {

int LpProblem::add_variable(double lower, double upper, double objective) {
    obj_.push_back(objective);
    lower_.push_back(lower);
    upper_.push_back(upper);
    binary_.push_back(0);
    return static_cast<int>(obj_.size()) - 1;
}

void LpProblem::set_binary(int var) {
    if (lower_[var] < 0.0 || upper_[var] > 1.0) {
        throw std::invalid_argument("binary flag requires bounds within [0, 1]");
    }
    if (!binary_[var]) ++n_binary_;
    binary_[var] = 1;
}

void LpProblem::set_bounds(int var, double lower, double upper) {
    lower_[var] = lower;
    upper_[var] = upper;
}

int LpProblem::add_row(double lo, double hi, std::span<const int> cols,
                       std::span<const double> vals) {
    if (cols.size() != vals.size()) throw std::invalid_argument("row index/value size mismatch");
    row_cols_.insert(row_cols_.end(), cols.begin(), cols.end());
    row_vals_.insert(row_vals_.end(), vals.begin(), vals.end());
    row_starts_.push_back(static_cast<std::int64_t>(row_cols_.size()));
    row_lo_.push_back(lo);
    row_hi_.push_back(hi);
    return static_cast<int>(row_lo_.size()) - 1;
}

int LpProblem::add_row(RowSense sense, double rhs, std::span<const int> cols,
                       std::span<const double> vals) {
    switch (sense) {
        case RowSense::LessEqual: return add_row(-inf, rhs, cols, vals);
        case RowSense::Equal: return add_row(rhs, rhs, cols, vals);
        case RowSense::GreaterEqual: return add_row(rhs, inf, cols, vals);
    }
    throw std::invalid_argument("bad row sense");
}

void LpProblem::reserve(int n_vars, int n_rows, std::int64_t n_nonzeros) {
    obj_.reserve(n_vars);
    lower_.reserve(n_vars);
    upper_.reserve(n_vars);
    binary_.reserve(n_vars);
    row_starts_.reserve(n_rows + 1);
    row_lo_.reserve(n_rows);
    row_hi_.reserve(n_rows);
    row_cols_.reserve(n_nonzeros);
    row_vals_.reserve(n_nonzeros);
}

std::span<const int> LpProblem::row_indices(int row) const {
    return {row_cols_.data() + row_starts_[row],
            static_cast<std::size_t>(row_starts_[row + 1] - row_starts_[row])};
}

std::span<const double> LpProblem::row_values(int row) const {
    return {row_vals_.data() + row_starts_[row],
            static_cast<std::size_t>(row_starts_[row + 1] - row_starts_[row])};
}

void LpProblem::validate() const {
    const int n = num_vars();
    for (int j = 0; j < n; ++j) {
        if (std::isnan(lower_[j]) || std::isnan(upper_[j]) || lower_[j] > upper_[j]) {
            throw std::invalid_argument("bad bounds on variable " + std::to_string(j));
        }
        if (!std::isfinite(obj_[j])) {
            throw std::invalid_argument("non-finite objective coefficient on variable " +
                                        std::to_string(j));
        }
    }
    for (std::size_t t = 0; t < row_cols_.size(); ++t) {
        if (row_cols_[t] < 0 || row_cols_[t] >= n) {
            throw std::invalid_argument("row references column out of range");
        }
        if (!std::isfinite(row_vals_[t])) {
            throw std::invalid_argument("non-finite constraint coefficient");
        }
    }
    for (int r = 0; r < num_rows(); ++r) {
        if (std::isnan(row_lo_[r]) || std::isnan(row_hi_[r]) || row_lo_[r] > row_hi_[r]) {
            throw std::invalid_argument("bad row interval on row " + std::to_string(r));
        }
    }
}

double LpProblem::row_activity(int row, std::span<const double> x) const {
    double a = 0.0;
    const auto idx = row_indices(row);
    const auto val = row_values(row);
    for (std::size_t t = 0; t < idx.size(); ++t) a += val[t] * x[idx[t]];
    return a;
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::IterationLimit: return "iteration_limit";
    }
    return "unknown";
}

void write_solution_csv(const LpSolution& solution, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "var_index,value\n";
    char buf[40];
    for (std::size_t j = 0; j < solution.values.size(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g", solution.values[j]);
        out << j << ',' << buf << '\n';
    }
}

}  // namespace battmdp::lp
