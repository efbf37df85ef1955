#include "chancekit/program.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace chancekit {

bool DeterministicProgram::has_binaries() const {
    return std::any_of(variables.begin(), variables.end(),
                       [](const Variable& v) { return v.kind == VarKind::Binary; });
}

int DeterministicProgram::add_variable(std::string name, VarKind kind, double lower,
                                       double upper) {
    variables.push_back(Variable{std::move(name), kind, lower, upper});
    objective.push_back(0.0);
    return static_cast<int>(variables.size()) - 1;
}

void DeterministicProgram::add_row(std::vector<LinTerm> terms, Relation rel, double rhs,
                                   std::string name) {
    rows.push_back(LinearRow{std::move(terms), rel, rhs, std::move(name)});
}

void DeterministicProgram::validate() const {
    const int n = num_variables();
    if (static_cast<int>(objective.size()) != n)
        throw std::invalid_argument("DeterministicProgram: objective length mismatch");
    auto check_terms = [&](const std::vector<LinTerm>& terms) {
        for (const auto& [idx, coef] : terms) {
            if (idx < 0 || idx >= n)
                throw std::invalid_argument("DeterministicProgram: term index out of range");
            if (!std::isfinite(coef))
                throw std::invalid_argument("DeterministicProgram: non-finite coefficient");
        }
    };
    for (const LinearRow& row : rows)
        check_terms(row.terms);
    for (const SocRow& row : soc_rows) {
        if (row.f_rows.size() != row.g.size())
            throw std::invalid_argument("DeterministicProgram: SOC row F/g size mismatch");
        for (const auto& frow : row.f_rows)
            check_terms(frow);
        check_terms(row.h);
    }
    for (const Variable& v : variables)
        if (v.lower > v.upper)
            throw std::invalid_argument("DeterministicProgram: crossed bounds on " + v.name);

    if (has_binaries()) {
        const std::string& method = provenance.method;
        if (method.rfind("saa", 0) != 0)
            throw std::invalid_argument(
                "DeterministicProgram: binary variables require SAA provenance");
    }
    if (has_soc_rows()) {
        static const std::set<std::string> allowed = {
            "gaussian", "robust_ball", "robust_ball_box", "robust_u3",
            "robust_u4", "robust_u5", "pi_bound_3", "pi_bound_4", "pi_bound_5"};
        if (!allowed.count(provenance.method))
            throw std::invalid_argument(
                "DeterministicProgram: SOC rows not expected for provenance '" +
                provenance.method + "'");
    }
}

DeterministicProgram lp_relaxation(const DeterministicProgram& dp) {
    DeterministicProgram out = dp;
    for (Variable& v : out.variables) {
        if (v.kind == VarKind::Binary) {
            v.kind = VarKind::Continuous;
            v.lower = std::max(v.lower, 0.0);
            v.upper = std::min(v.upper, 1.0);
        }
    }
    out.provenance.detail += (out.provenance.detail.empty() ? "" : "; ");
    out.provenance.detail += "lp_relaxation";
    return out;
}

double eval_terms(const std::vector<LinTerm>& terms, const Eigen::VectorXd& v) {
    double acc = 0.0;
    for (const auto& [idx, coef] : terms)
        acc += coef * v[idx];
    return acc;
}

double soc_violation(const SocRow& row, const Eigen::VectorXd& v) {
    double norm2 = 0.0;
    for (std::size_t r = 0; r < row.f_rows.size(); ++r) {
        const double val = eval_terms(row.f_rows[r], v) + row.g[r];
        norm2 += val * val;
    }
    return std::sqrt(norm2) - (eval_terms(row.h, v) + row.s);
}

double max_constraint_violation(const DeterministicProgram& dp, const Eigen::VectorXd& v) {
    double worst = 0.0;
    for (const LinearRow& row : dp.rows) {
        const double lhs = eval_terms(row.terms, v);
        switch (row.rel) {
        case Relation::LessEqual:
            worst = std::max(worst, lhs - row.rhs);
            break;
        case Relation::GreaterEqual:
            worst = std::max(worst, row.rhs - lhs);
            break;
        case Relation::Equal:
            worst = std::max(worst, std::abs(lhs - row.rhs));
            break;
        }
    }
    for (int j = 0; j < dp.num_variables(); ++j) {
        worst = std::max(worst, dp.variables[j].lower - v[j]);
        worst = std::max(worst, v[j] - dp.variables[j].upper);
    }
    for (const SocRow& row : dp.soc_rows)
        worst = std::max(worst, soc_violation(row, v));
    return worst;
}

} // namespace chancekit
