#ifndef CHANCEKIT_SOLVER_HPP
#define CHANCEKIT_SOLVER_HPP

#include "chancekit/program.hpp"

#include <optional>
#include <vector>

namespace chancekit {

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(SolveStatus s);

struct SolveResult {
    SolveStatus status = SolveStatus::Infeasible;
    Eigen::VectorXd x;       ///< values for dp.variables (empty unless optimal)
    double objective = std::numeric_limits<double>::quiet_NaN();

    std::optional<std::vector<int>> support_set;
    std::optional<bool> degenerate;

    long pivot_count = 0;
    long node_count = 0;
    int kelley_iterations = 0;
    std::vector<double> kelley_objective_trace;

    /// |primal - dual| / max(1, |primal|) from the final basis (LP solves).
    double duality_gap = std::numeric_limits<double>::quiet_NaN();
    /// Largest negative reduced cost at termination (LP solves).
    double dual_infeasibility = std::numeric_limits<double>::quiet_NaN();
};

/// Two-phase dense simplex with Bland's anti-cycling rule.
/// Feasibility tolerance 1e-9, optimality tolerance 1e-9, pivot cap 1e5.
/// Preconditions: no binaries, no SOC rows.
SolveResult solve_lp(const DeterministicProgram& dp);

/// solve_lp followed by sequential objective fixing so that the returned
/// optimizer is the lexicographically smallest one on the optimal face.
/// This is the tie-break used wherever uniqueness of the optimizer matters.
SolveResult solve_lp_lex(const DeterministicProgram& dp);

/// Best-first branch and bound on LP relaxations, branching on the most
/// fractional binary (smallest index on ties); deterministic node order,
/// node cap 1e6. Exact at desk scale.
SolveResult solve_milp(const DeterministicProgram& dp);

/// Kelley cutting-plane loop for programs with SOC rows: solve the LP
/// relaxation, add a supporting-hyperplane cut for every SOC row violated
/// beyond 1e-7, repeat (at most 500 iterations). Variables must be bounded;
/// an unbounded relaxation raises an error telling the caller to add box
/// bounds.
SolveResult solve_soc(const DeterministicProgram& dp);

/// Dispatch on program contents (binaries -> MILP, SOC rows -> Kelley).
SolveResult solve(const DeterministicProgram& dp);

struct SupportScenarios {
    std::vector<int> support_set; ///< scenario indices whose removal moves x*
    int count = 0;                ///< s*_N
    bool degenerate = false;      ///< |o*(S) - o*(N)| > 1e-7
    double objective_full = 0.0;
    double objective_support_only = 0.0;
};

/// Identify support scenarios of the scenario problem by removal: scenario j
/// is a support scenario iff re-solving without it moves the optimizer by
/// more than 1e-7 in the infinity norm. All solves use the lexicographic
/// tie-break so removal comparisons are well defined. Requires `base` to be
/// an optimal (lexicographic) solution of scenario_problem(prog, scen).
SupportScenarios find_support_scenarios(const CCProgram& prog, const ScenarioSet& scen,
                                        const SolveResult& base);

} // namespace chancekit

#endif
