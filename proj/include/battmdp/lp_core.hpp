#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace battmdp::lp {

constexpr double inf = std::numeric_limits<double>::infinity();

enum class RowSense { LessEqual, Equal, GreaterEqual };

// Sparse linear (or 0/1 mixed-integer) program, minimization. Rows are stored
// as activity intervals lo <= a.x <= hi, which covers <=, =, >= and ranged
// rows uniformly. Variable bounds default to [0, +inf).
class LpProblem {
public:
    int add_variable(double lower = 0.0, double upper = inf, double objective = 0.0);
    void set_binary(int var);

    int add_row(double lo, double hi, std::span<const int> cols, std::span<const double> vals);
    int add_row(RowSense sense, double rhs, std::span<const int> cols,
                std::span<const double> vals);
    void reserve(int n_vars, int n_rows, std::int64_t n_nonzeros);

    int num_vars() const { return static_cast<int>(obj_.size()); }
    int num_rows() const { return static_cast<int>(row_lo_.size()); }
    std::int64_t num_nonzeros() const { return static_cast<std::int64_t>(row_cols_.size()); }
    bool has_integers() const { return n_binary_ > 0; }
    int num_binary() const { return n_binary_; }

    double objective_coeff(int var) const { return obj_[var]; }
    double lower_bound(int var) const { return lower_[var]; }
    double upper_bound(int var) const { return upper_[var]; }
    bool is_binary(int var) const { return binary_[var] != 0; }
    void set_bounds(int var, double lower, double upper);
    void set_objective_coeff(int var, double c) { obj_[var] = c; }

    double row_lower(int row) const { return row_lo_[row]; }
    double row_upper(int row) const { return row_hi_[row]; }
    std::span<const int> row_indices(int row) const;
    std::span<const double> row_values(int row) const;

    // Throws std::invalid_argument on NaN/infinite coefficients, column
    // indices out of range, or crossed bounds.
    void validate() const;

    double row_activity(int row, std::span<const double> x) const;

private:
    std::vector<double> obj_, lower_, upper_;
    std::vector<std::uint8_t> binary_;
    std::vector<std::int64_t> row_starts_{0};
    std::vector<int> row_cols_;
    std::vector<double> row_vals_;
    std::vector<double> row_lo_, row_hi_;
    int n_binary_ = 0;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(SolveStatus s);

struct LpSolution {
    SolveStatus status = SolveStatus::IterationLimit;
    std::vector<double> values;
    double objective = 0.0;
    double max_primal_infeasibility = 0.0;
    std::int64_t iterations = 0;
    // Branch-and-bound extras; zero for pure LP solves.
    std::int64_t nodes_explored = 0;
    double mip_gap = 0.0;
    bool has_incumbent = false;
};

struct SolverOptions {
    double feasibility_tol = 1e-9;
    double optimality_tol = 1e-9;
    std::int64_t iteration_limit = 2'000'000;
    int refactor_interval = 64;
    // Consecutive degenerate pivots before switching to Bland's rule.
    int bland_trigger = 1000;
    // Branch and bound.
    std::int64_t node_limit = 1'000'000;
    double mip_abs_gap = 1e-6;
    double integrality_tol = 1e-7;
    bool log = false;
};

// Revised simplex with bounded variables; deterministic pivoting (largest
// violation, lowest index ties) with Bland-rule fallback against cycling.
LpSolution solve_lp(const LpProblem& problem, const SolverOptions& options = {});

namespace detail {
// Simplex on the continuous relaxation, integrality flags ignored.
LpSolution solve_relaxation(const LpProblem& problem, const SolverOptions& options);
}  // namespace detail

// Branch and bound over solve_lp relaxations. Binary variables only;
// branching picks the most fractional variable, lowest index on ties.
LpSolution solve_mip(const LpProblem& problem, const SolverOptions& options = {});

// Fixed-format MPS (8-character name fields). Numeric fields carry full
// round-trip precision and may run past the classic 12-character width.
// Binary variables are emitted as BV entries in the BOUNDS section.
void export_mps(const LpProblem& problem, const std::string& path,
                const std::string& name = "BATTMDP");
LpProblem import_mps(const std::string& path);

void write_solution_csv(const LpSolution& solution, const std::string& path);

}  // namespace battmdp::lp
