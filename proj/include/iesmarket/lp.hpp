// Linear programming and branch-and-bound engine.
//
// Every optimization in the toolkit (price-taker schedules, bidding
// programs, unit commitment, economic dispatch) compiles to a LinearModel
// and is solved here. The solver is a bounded-variable revised simplex
// with a sparsity-exploiting basis factorization, so it handles both the
// dense toy models in the tests and the long staircase scheduling models.
#pragma once

#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "iesmarket/common.hpp"

namespace ies::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { LessEqual, Equal, GreaterEqual };
enum class Objective { Minimize, Maximize };

enum class Status {
    Optimal,
    Infeasible,
    Unbounded,
    GapLimit,  // MILP node budget exhausted with an incumbent
};

struct Variable {
    std::string name;
    double lower = 0.0;
    double upper = kInf;
    double objective = 0.0;
    bool integral = false;
};

struct Row {
    std::string name;
    Sense sense = Sense::LessEqual;
    double rhs = 0.0;
    std::vector<std::pair<int, double>> coefs;  // (variable index, coefficient)
};

class LinearModel {
  public:
    Objective sense = Objective::Minimize;

    int add_variable(std::string name, double lower, double upper, double objective,
                     bool integral = false);
    int add_row(Sense sense, double rhs, std::vector<std::pair<int, double>> coefs,
                std::string name = "");

    int num_variables() const { return static_cast<int>(vars_.size()); }
    int num_rows() const { return static_cast<int>(rows_.size()); }
    const Variable& variable(int j) const { return vars_[j]; }
    Variable& variable(int j) { return vars_[j]; }
    const Row& row(int i) const { return rows_[i]; }
    const std::vector<Variable>& variables() const { return vars_; }
    const std::vector<Row>& rows() const { return rows_; }

    bool has_integers() const;

    // Throws InputError on non-finite coefficients, crossed bounds, or
    // references to undeclared variables.
    void validate() const;

    // Human-readable dump for debugging (flag-gated by callers).
    std::string to_lp_text() const;

  private:
    std::vector<Variable> vars_;
    std::vector<Row> rows_;
};

struct SolverSettings {
    double rel_gap = 0.01;       // MILP relative gap (matches market practice)
    double int_tol = 1e-6;       // integrality tolerance
    long max_nodes = 200000;     // branch-and-bound node budget
    long max_iterations = 0;     // 0 = automatic (scales with model size)
    unsigned seed = 0;           // recorded for reproducibility manifests
    std::string dump_lp_path;    // when non-empty, write to_lp_text() here
};

// Opaque warm-start token: variable statuses from a previous solve of a
// structurally identical model (same variables and rows, bounds may move).
struct Basis {
    std::vector<uint8_t> status;
    bool empty() const { return status.empty(); }
};

struct Solution {
    Status status = Status::Infeasible;
    double objective = 0.0;            // in the model's own sense
    std::vector<double> primal;        // per variable
    std::vector<double> duals;         // per row, original-sense convention
    std::vector<double> reduced_costs; // per variable
    double best_bound = 0.0;           // MILP bound (== objective for pure LP)
    double mip_gap = 0.0;              // reported relative gap
    long iterations = 0;
    long nodes = 0;
    std::vector<double> bound_log;     // global bound after each processed node
    Basis basis;                       // reusable warm start

    bool optimal() const { return status == Status::Optimal; }
};

// Simplex solve; integrality flags must not be set.
Solution solve_lp(const LinearModel& model, const SolverSettings& settings = {},
                  const Basis* warm = nullptr);

// Branch-and-bound over solve_lp. Pure LPs pass straight through.
Solution solve_milp(const LinearModel& model, const SolverSettings& settings = {});

// Re-solve with integers pinned at the incumbent to expose dual values
// (the standard pricing pass for commitment problems).
Solution fixed_integer_duals(const LinearModel& model, const Solution& incumbent,
                             const SolverSettings& settings = {});

// Value of the dual solution, for strong-duality checks.
double dual_objective(const LinearModel& model, const Solution& sol);

// Reusable solver handle: one engine instance solving the same model under
// changing variable bounds (the branch-and-bound workhorse).
class NodeSolver {
  public:
    NodeSolver(const LinearModel& model, const SolverSettings& settings);
    ~NodeSolver();
    NodeSolver(const NodeSolver&) = delete;
    NodeSolver& operator=(const NodeSolver&) = delete;

    // Bounds are (variable, (lower, upper)) overrides on top of the model.
    Solution solve(const std::vector<std::pair<int, std::pair<double, double>>>& bounds,
                   const std::vector<uint8_t>* warm_status = nullptr,
                   std::vector<uint8_t>* status_out = nullptr);

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace ies::lp
