#ifndef CHANCEKIT_PROGRAM_HPP
#define CHANCEKIT_PROGRAM_HPP

#include "chancekit/model.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace chancekit {

enum class VarKind { Continuous, Binary };

struct Variable {
    std::string name;
    VarKind kind = VarKind::Continuous;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
};

/// Sparse linear term: (variable index, coefficient).
using LinTerm = std::pair<int, double>;

struct LinearRow {
    std::vector<LinTerm> terms;
    Relation rel = Relation::LessEqual;
    double rhs = 0.0;
    std::string name;
};

/// Second-order cone row ||F v + g||_2 <= h' v + s over the variable vector v.
struct SocRow {
    std::vector<std::vector<LinTerm>> f_rows;
    std::vector<double> g;
    std::vector<LinTerm> h;
    double s = 0.0;
    std::string name;
};

/// Which reformulation produced a program, and from how many scenarios.
struct Provenance {
    std::string method; ///< e.g. "scenario", "saa_bigm", "gaussian", "robust_ball"
    int scenario_count = 0;
    std::string detail;
};

/// Solver-ready program: minimize objective . v subject to linear rows,
/// SOC rows, variable bounds and integrality.
struct DeterministicProgram {
    std::vector<Variable> variables;
    std::vector<double> objective; ///< same length as variables
    std::vector<LinearRow> rows;
    std::vector<SocRow> soc_rows;
    Provenance provenance;

    int num_variables() const { return static_cast<int>(variables.size()); }
    bool has_binaries() const;
    bool has_soc_rows() const { return !soc_rows.empty(); }

    int add_variable(std::string name, VarKind kind, double lower, double upper);
    void add_row(std::vector<LinTerm> terms, Relation rel, double rhs, std::string name = "");

    /// Consistency checks: term indices in range, objective sized, binaries
    /// only for SAA provenance, SOC rows only for the provenances that may
    /// carry them.
    void validate() const;
};

/// Same program with every binary relaxed to a [0,1] continuous variable.
DeterministicProgram lp_relaxation(const DeterministicProgram& dp);

/// Value of a sparse linear expression at v.
double eval_terms(const std::vector<LinTerm>& terms, const Eigen::VectorXd& v);

/// Left-hand-side residual of a SOC row at v: ||F v + g|| - (h' v + s).
double soc_violation(const SocRow& row, const Eigen::VectorXd& v);

/// Largest violation of any linear row, bound, or SOC row at v.
double max_constraint_violation(const DeterministicProgram& dp, const Eigen::VectorXd& v);

} // namespace chancekit

#endif
