#include "chancekit/solver.hpp"

#include "chancekit/reformulate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <stdexcept>

namespace chancekit {

namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kOptTol = 1e-9;
constexpr double kPivotTol = 1e-11;
constexpr long kPivotCap = 100000;
constexpr long kNodeCap = 1000000;

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Standard-form conversion
//   min c.y   s.t.  A y = b (b >= 0), y >= 0
// ---------------------------------------------------------------------------

struct VarMap {
    enum class Kind { Shift, Mirror, Split, Fixed } kind;
    int col0 = -1; ///< y column (Shift/Mirror) or positive part (Split)
    int col1 = -1; ///< negative part (Split)
    double offset = 0.0;
};

struct StandardLP {
    Eigen::MatrixXd table; ///< tableau rows x (cols + 1), last column = rhs
    Eigen::VectorXd cost;  ///< phase-2 costs over all columns
    double cost_const = 0.0;
    int n_rows = 0;
    int n_cols = 0;       ///< structural + slack/surplus + artificial
    int first_slack = 0;  ///< index of the first slack/surplus column
    int first_artificial = 0;
    std::vector<int> basis;        ///< basic column per row
    std::vector<int> row_link;     ///< slack/surplus/artificial column of each row
    std::vector<double> row_sign;  ///< its coefficient (+1 or -1)
    std::vector<VarMap> vmap;      ///< original variable -> y columns
    Eigen::VectorXd orig_rhs;      ///< standardized b before any pivoting
};

struct DenseRow {
    Eigen::VectorXd coeffs; // over y columns (structural only)
    Relation rel;
    double rhs;
};

StandardLP build_standard(const DeterministicProgram& dp,
                          const std::vector<double>* lower_override,
                          const std::vector<double>* upper_override) {
    const int nv = dp.num_variables();
    StandardLP lp;
    lp.vmap.resize(nv);

    // map variables to nonnegative columns
    int ncols = 0;
    std::vector<std::pair<int, double>> upper_rows; // (variable, span) for two-sided bounds
    for (int j = 0; j < nv; ++j) {
        double lo = lower_override ? (*lower_override)[j] : dp.variables[j].lower;
        double up = upper_override ? (*upper_override)[j] : dp.variables[j].upper;
        if (lo > up + 1e-12) {
            lp.n_rows = -1; // trivially infeasible marker
            return lp;
        }
        VarMap& vm = lp.vmap[j];
        if (std::isfinite(lo) && std::isfinite(up) && up - lo <= 1e-14) {
            vm.kind = VarMap::Kind::Fixed;
            vm.offset = 0.5 * (lo + up);
        } else if (std::isfinite(lo)) {
            vm.kind = VarMap::Kind::Shift;
            vm.col0 = ncols++;
            vm.offset = lo;
            if (std::isfinite(up))
                upper_rows.emplace_back(j, up - lo);
        } else if (std::isfinite(up)) {
            vm.kind = VarMap::Kind::Mirror;
            vm.col0 = ncols++;
            vm.offset = up;
        } else {
            vm.kind = VarMap::Kind::Split;
            vm.col0 = ncols++;
            vm.col1 = ncols++;
        }
    }
    const int n_structural = ncols;

    // substitute variables into rows
    auto densify = [&](const std::vector<LinTerm>& terms, Relation rel,
                       double rhs) -> DenseRow {
        DenseRow row;
        row.coeffs = Eigen::VectorXd::Zero(n_structural);
        row.rel = rel;
        row.rhs = rhs;
        for (const auto& [idx, coef] : terms) {
            const VarMap& vm = lp.vmap[idx];
            switch (vm.kind) {
            case VarMap::Kind::Fixed:
                row.rhs -= coef * vm.offset;
                break;
            case VarMap::Kind::Shift:
                row.coeffs[vm.col0] += coef;
                row.rhs -= coef * vm.offset;
                break;
            case VarMap::Kind::Mirror:
                row.coeffs[vm.col0] -= coef;
                row.rhs -= coef * vm.offset;
                break;
            case VarMap::Kind::Split:
                row.coeffs[vm.col0] += coef;
                row.coeffs[vm.col1] -= coef;
                break;
            }
        }
        return row;
    };

    std::vector<DenseRow> rows;
    rows.reserve(dp.rows.size() + upper_rows.size());
    for (const LinearRow& r : dp.rows)
        rows.push_back(densify(r.terms, r.rel, r.rhs));
    for (const auto& [j, span] : upper_rows) {
        DenseRow row;
        row.coeffs = Eigen::VectorXd::Zero(n_structural);
        row.coeffs[lp.vmap[j].col0] = 1.0;
        row.rel = Relation::LessEqual;
        row.rhs = span;
        rows.push_back(row);
    }

    const int m = static_cast<int>(rows.size());
    lp.n_rows = m;
    lp.first_slack = n_structural;
    // one slack or surplus per inequality row; artificials assigned below
    int n_slack = 0;
    for (const DenseRow& r : rows)
        if (r.rel != Relation::Equal)
            ++n_slack;
    lp.first_artificial = n_structural + n_slack;

    // count artificials: needed when the row has no usable slack basis column
    std::vector<int> slack_col(m, -1), art_col(m, -1);
    std::vector<double> slack_sign(m, 0.0);
    int next_slack = lp.first_slack;
    int next_art = lp.first_artificial;
    for (int i = 0; i < m; ++i) {
        DenseRow& r = rows[i];
        bool flipped = false;
        if (r.rhs < 0.0) { // make b >= 0
            r.coeffs = -r.coeffs;
            r.rhs = -r.rhs;
            if (r.rel == Relation::LessEqual)
                r.rel = Relation::GreaterEqual;
            else if (r.rel == Relation::GreaterEqual)
                r.rel = Relation::LessEqual;
            flipped = true;
        }
        (void)flipped;
        if (r.rel == Relation::LessEqual) {
            slack_col[i] = next_slack++;
            slack_sign[i] = 1.0; // slack is basic
        } else if (r.rel == Relation::GreaterEqual) {
            slack_col[i] = next_slack++;
            slack_sign[i] = -1.0;
            art_col[i] = next_art++;
        } else {
            art_col[i] = next_art++;
        }
    }
    lp.n_cols = next_art;

    lp.table = Eigen::MatrixXd::Zero(m, lp.n_cols + 1);
    lp.basis.resize(m);
    lp.row_link.resize(m);
    lp.row_sign.resize(m, 1.0);
    for (int i = 0; i < m; ++i) {
        lp.table.row(i).head(n_structural) = rows[i].coeffs.transpose();
        lp.table(i, lp.n_cols) = rows[i].rhs;
        if (slack_col[i] >= 0) {
            lp.table(i, slack_col[i]) = slack_sign[i];
            lp.row_link[i] = slack_col[i];
            lp.row_sign[i] = slack_sign[i];
        }
        if (art_col[i] >= 0) {
            lp.table(i, art_col[i]) = 1.0;
            lp.basis[i] = art_col[i];
            if (slack_col[i] < 0) {
                lp.row_link[i] = art_col[i];
                lp.row_sign[i] = 1.0;
            }
        } else {
            lp.basis[i] = slack_col[i];
        }
    }
    lp.orig_rhs = lp.table.col(lp.n_cols);

    // phase-2 cost over columns
    lp.cost = Eigen::VectorXd::Zero(lp.n_cols);
    lp.cost_const = 0.0;
    for (int j = 0; j < nv; ++j) {
        const double c = dp.objective[j];
        if (c == 0.0)
            continue;
        const VarMap& vm = lp.vmap[j];
        switch (vm.kind) {
        case VarMap::Kind::Fixed:
            lp.cost_const += c * vm.offset;
            break;
        case VarMap::Kind::Shift:
            lp.cost[vm.col0] += c;
            lp.cost_const += c * vm.offset;
            break;
        case VarMap::Kind::Mirror:
            lp.cost[vm.col0] -= c;
            lp.cost_const += c * vm.offset;
            break;
        case VarMap::Kind::Split:
            lp.cost[vm.col0] += c;
            lp.cost[vm.col1] -= c;
            break;
        }
    }
    return lp;
}

/// Bland's-rule simplex on a prepared tableau. `banned` columns never enter.
/// Returns 0 optimal, 1 unbounded, 2 iteration limit.
int run_simplex(StandardLP& lp, Eigen::VectorXd& red_cost, double& obj,
                const std::vector<bool>& banned, long& pivots) {
    const int m = lp.n_rows;
    const int rhs = lp.n_cols;
    while (true) {
        // Bland: smallest-index column with negative reduced cost
        int enter = -1;
        for (int j = 0; j < lp.n_cols; ++j) {
            if (banned[j])
                continue;
            if (red_cost[j] < -kOptTol) {
                enter = j;
                break;
            }
        }
        if (enter < 0)
            return 0;
        // ratio test, ties by smallest basic variable index (Bland)
        int leave = -1;
        double best = kInf;
        for (int i = 0; i < m; ++i) {
            const double a = lp.table(i, enter);
            if (a > kPivotTol) {
                const double ratio = lp.table(i, rhs) / a;
                if (ratio < best - 1e-12) {
                    best = ratio;
                    leave = i;
                } else if (ratio <= best + 1e-12 && leave >= 0 &&
                           lp.basis[i] < lp.basis[leave]) {
                    leave = i;
                }
            }
        }
        if (leave < 0)
            return 1; // unbounded direction
        if (++pivots > kPivotCap)
            return 2;
        // pivot
        const double piv = lp.table(leave, enter);
        lp.table.row(leave) /= piv;
        for (int i = 0; i < m; ++i) {
            if (i == leave)
                continue;
            const double f = lp.table(i, enter);
            if (f != 0.0)
                lp.table.row(i) -= f * lp.table.row(leave);
        }
        const double fc = red_cost[enter];
        if (fc != 0.0) {
            red_cost -= fc * lp.table.row(leave).head(lp.n_cols);
            obj -= fc * lp.table(leave, rhs);
        }
        lp.basis[leave] = enter;
    }
}

struct LpOutcome {
    SolveStatus status;
    Eigen::VectorXd x;
    double objective = std::numeric_limits<double>::quiet_NaN();
    long pivots = 0;
    double duality_gap = std::numeric_limits<double>::quiet_NaN();
    double dual_infeasibility = std::numeric_limits<double>::quiet_NaN();
};

LpOutcome solve_standard(const DeterministicProgram& dp,
                         const std::vector<double>* lower_override,
                         const std::vector<double>* upper_override) {
    StandardLP lp = build_standard(dp, lower_override, upper_override);
    LpOutcome out;
    if (lp.n_rows < 0) {
        out.status = SolveStatus::Infeasible;
        return out;
    }
    const int m = lp.n_rows;
    const int rhs = lp.n_cols;
    long pivots = 0;

    // ----- phase 1: minimize the artificial sum -----
    std::vector<bool> banned(lp.n_cols, false);
    if (lp.first_artificial < lp.n_cols) {
        Eigen::VectorXd red = Eigen::VectorXd::Zero(lp.n_cols);
        for (int j = lp.first_artificial; j < lp.n_cols; ++j)
            red[j] = 1.0;
        double obj1 = 0.0;
        for (int i = 0; i < m; ++i) {
            if (lp.basis[i] >= lp.first_artificial) {
                red -= lp.table.row(i).head(lp.n_cols);
                obj1 += lp.table(i, rhs);
            }
        }
        const int rc = run_simplex(lp, red, obj1, banned, pivots);
        out.pivots = pivots;
        if (rc == 2) {
            out.status = SolveStatus::IterationLimit;
            return out;
        }
        if (obj1 > 1e-8) {
            out.status = SolveStatus::Infeasible;
            return out;
        }
        // drive leftover artificials out of the basis where possible
        for (int i = 0; i < m; ++i) {
            if (lp.basis[i] < lp.first_artificial)
                continue;
            int enter = -1;
            for (int j = 0; j < lp.first_artificial; ++j) {
                if (std::abs(lp.table(i, j)) > 1e-9) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0)
                continue; // redundant row; its artificial stays basic at zero
            const double piv = lp.table(i, enter);
            lp.table.row(i) /= piv;
            for (int r = 0; r < m; ++r) {
                if (r == i)
                    continue;
                const double f = lp.table(r, enter);
                if (f != 0.0)
                    lp.table.row(r) -= f * lp.table.row(i);
            }
            lp.basis[i] = enter;
        }
    }
    for (int j = lp.first_artificial; j < lp.n_cols; ++j)
        banned[j] = true;

    // ----- phase 2 -----
    Eigen::VectorXd red = lp.cost;
    double obj = lp.cost_const;
    for (int i = 0; i < m; ++i) {
        const int b = lp.basis[i];
        const double cb = b < lp.n_cols ? lp.cost[b] : 0.0;
        if (cb != 0.0) {
            red -= cb * lp.table.row(i).head(lp.n_cols);
            obj += cb * lp.table(i, rhs);
        }
    }
    const int rc = run_simplex(lp, red, obj, banned, pivots);
    out.pivots = pivots;
    if (rc == 2) {
        out.status = SolveStatus::IterationLimit;
        return out;
    }
    if (rc == 1) {
        out.status = SolveStatus::Unbounded;
        return out;
    }

    // recover y and map back to x
    Eigen::VectorXd y = Eigen::VectorXd::Zero(lp.n_cols);
    for (int i = 0; i < m; ++i)
        y[lp.basis[i]] = lp.table(i, rhs);
    const int nv = dp.num_variables();
    out.x.resize(nv);
    for (int j = 0; j < nv; ++j) {
        const VarMap& vm = lp.vmap[j];
        switch (vm.kind) {
        case VarMap::Kind::Fixed:
            out.x[j] = vm.offset;
            break;
        case VarMap::Kind::Shift:
            out.x[j] = vm.offset + y[vm.col0];
            break;
        case VarMap::Kind::Mirror:
            out.x[j] = vm.offset - y[vm.col0];
            break;
        case VarMap::Kind::Split:
            out.x[j] = y[vm.col0] - y[vm.col1];
            break;
        }
    }
    out.objective = obj;
    out.status = SolveStatus::Optimal;

    // duals from the identity column of each row; dual objective recomputed
    // independently against the standardized right-hand side
    double dual_obj = lp.cost_const;
    for (int i = 0; i < m; ++i) {
        const int link = lp.row_link[i];
        const double yi = -red[link] * lp.row_sign[i];
        dual_obj += yi * lp.orig_rhs[i];
    }
    out.duality_gap = std::abs(obj - dual_obj) / std::max(1.0, std::abs(obj));
    double worst = 0.0;
    for (int j = 0; j < lp.n_cols; ++j)
        if (!banned[j])
            worst = std::max(worst, -red[j]);
    out.dual_infeasibility = worst;
    return out;
}

void guard_lp_input(const DeterministicProgram& dp) {
    if (dp.has_binaries())
        throw std::invalid_argument("solve_lp: binaries present; use solve_milp");
    if (dp.has_soc_rows())
        throw std::invalid_argument("solve_lp: SOC rows present; use solve_soc");
}

} // namespace

const char* to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::Optimal:
        return "optimal";
    case SolveStatus::Infeasible:
        return "infeasible";
    case SolveStatus::Unbounded:
        return "unbounded";
    case SolveStatus::IterationLimit:
        return "iteration_limit";
    }
    return "unknown";
}

SolveResult solve_lp(const DeterministicProgram& dp) {
    guard_lp_input(dp);
    const LpOutcome o = solve_standard(dp, nullptr, nullptr);
    SolveResult r;
    r.status = o.status;
    r.x = o.x;
    r.objective = o.objective;
    r.pivot_count = o.pivots;
    r.duality_gap = o.duality_gap;
    r.dual_infeasibility = o.dual_infeasibility;
    return r;
}

SolveResult solve_lp_lex(const DeterministicProgram& dp) {
    SolveResult base = solve_lp(dp);
    if (base.status != SolveStatus::Optimal)
        return base;

    DeterministicProgram work = dp;
    std::vector<LinTerm> obj_terms;
    for (int j = 0; j < dp.num_variables(); ++j)
        if (dp.objective[j] != 0.0)
            obj_terms.emplace_back(j, dp.objective[j]);
    work.add_row(obj_terms, Relation::LessEqual, base.objective + 1e-9, "lex_obj");

    SolveResult stage = base;
    for (int j = 0; j < dp.num_variables(); ++j) {
        std::fill(work.objective.begin(), work.objective.end(), 0.0);
        work.objective[j] = 1.0;
        stage = solve_lp(work);
        if (stage.status != SolveStatus::Optimal)
            throw std::runtime_error(
                "solve_lp_lex: lexicographic stage not solvable (unbounded optimal face?)");
        base.pivot_count += stage.pivot_count;
        work.add_row({{j, 1.0}}, Relation::LessEqual, stage.x[j] + 1e-9, "lex_fix");
    }
    SolveResult out = base;
    out.x = stage.x;
    double obj = 0.0;
    for (int j = 0; j < dp.num_variables(); ++j)
        obj += dp.objective[j] * out.x[j];
    out.objective = obj;
    return out;
}

SolveResult solve_milp(const DeterministicProgram& dp) {
    if (dp.has_soc_rows())
        throw std::invalid_argument("solve_milp: SOC rows not supported");

    const int nv = dp.num_variables();
    std::vector<int> binaries;
    for (int j = 0; j < nv; ++j)
        if (dp.variables[j].kind == VarKind::Binary)
            binaries.push_back(j);

    std::vector<double> lo(nv), up(nv);
    for (int j = 0; j < nv; ++j) {
        lo[j] = dp.variables[j].lower;
        up[j] = dp.variables[j].upper;
    }
    for (int j : binaries) {
        lo[j] = std::max(lo[j], 0.0);
        up[j] = std::min(up[j], 1.0);
    }

    struct Node {
        double bound;
        long id;
        std::vector<double> lo, up;
        bool operator>(const Node& other) const {
            if (bound != other.bound)
                return bound > other.bound;
            return id > other.id;
        }
    };

    std::priority_queue<Node, std::vector<Node>, std::greater<Node>> open;
    long next_id = 0;
    SolveResult result;
    result.status = SolveStatus::Infeasible;
    double incumbent = kInf;
    Eigen::VectorXd incumbent_x;
    long nodes = 0;

    open.push(Node{-kInf, next_id++, lo, up});
    while (!open.empty()) {
        Node node = open.top();
        open.pop();
        if (node.bound >= incumbent - 1e-9)
            continue;
        if (++nodes > kNodeCap) {
            result.status = SolveStatus::IterationLimit;
            result.node_count = nodes;
            return result;
        }
        const LpOutcome relax = solve_standard(dp, &node.lo, &node.up);
        result.pivot_count += relax.pivots;
        if (relax.status == SolveStatus::IterationLimit) {
            result.status = SolveStatus::IterationLimit;
            result.node_count = nodes;
            return result;
        }
        if (relax.status == SolveStatus::Unbounded) {
            result.status = SolveStatus::Unbounded;
            result.node_count = nodes;
            return result;
        }
        if (relax.status != SolveStatus::Optimal)
            continue; // infeasible leaf
        if (relax.objective >= incumbent - 1e-9)
            continue;

        // most fractional binary; ties keep the smallest index
        int branch = -1;
        double best_frac = 1e-6;
        for (int j : binaries) {
            const double dist = std::abs(relax.x[j] - std::round(relax.x[j]));
            if (dist > best_frac + 1e-12) {
                best_frac = dist;
                branch = j;
            }
        }
        if (branch < 0) {
            // integral: candidate incumbent
            if (relax.objective < incumbent - 1e-9) {
                incumbent = relax.objective;
                incumbent_x = relax.x;
                for (int j : binaries)
                    incumbent_x[j] = std::round(incumbent_x[j]);
            }
            continue;
        }
        Node down = node, upn = node;
        down.bound = relax.objective;
        upn.bound = relax.objective;
        down.up[branch] = 0.0;
        down.id = next_id++;
        upn.lo[branch] = 1.0;
        upn.id = next_id++;
        open.push(down);
        open.push(upn);
    }

    result.node_count = nodes;
    if (std::isfinite(incumbent)) {
        result.status = SolveStatus::Optimal;
        result.objective = incumbent;
        result.x = incumbent_x;
    }
    return result;
}

SolveResult solve_soc(const DeterministicProgram& dp) {
    if (dp.has_binaries())
        throw std::invalid_argument("solve_soc: binaries not supported");
    if (!dp.has_soc_rows())
        return solve_lp(dp);

    DeterministicProgram work = dp;
    work.soc_rows.clear();
    // a SOC row with a constant norm part is just a linear row
    std::vector<SocRow> cone_rows;
    for (const SocRow& row : dp.soc_rows) {
        bool constant_norm = true;
        for (const auto& frow : row.f_rows)
            if (!frow.empty())
                constant_norm = false;
        if (constant_norm) {
            double norm = 0.0;
            for (std::size_t r = 0; r < row.g.size(); ++r)
                norm += row.g[r] * row.g[r];
            norm = std::sqrt(norm);
            std::vector<LinTerm> terms;
            for (const auto& [idx, coef] : row.h)
                terms.emplace_back(idx, -coef);
            work.add_row(std::move(terms), Relation::LessEqual, row.s - norm,
                         row.name + "_lin");
        } else {
            cone_rows.push_back(row);
        }
    }

    SolveResult result;
    for (int it = 0; it < 500; ++it) {
        SolveResult lp = solve_lp(work);
        result.pivot_count += lp.pivot_count;
        if (lp.status == SolveStatus::Unbounded)
            throw std::runtime_error(
                "solve_soc: LP relaxation unbounded; add finite variable bounds so the "
                "cutting planes can close the feasible set");
        if (lp.status != SolveStatus::Optimal) {
            result.status = lp.status;
            result.kelley_iterations = it + 1;
            return result;
        }
        result.kelley_objective_trace.push_back(lp.objective);

        double worst = 0.0;
        for (const SocRow& row : cone_rows) {
            const double viol = soc_violation(row, lp.x);
            worst = std::max(worst, viol);
            if (viol > 1e-7) {
                // supporting hyperplane of ||F v + g|| - h'v - s at lp.x
                const std::size_t dim = row.f_rows.size();
                std::vector<double> w(dim);
                double norm2 = 0.0;
                for (std::size_t r = 0; r < dim; ++r) {
                    w[r] = eval_terms(row.f_rows[r], lp.x) + row.g[r];
                    norm2 += w[r] * w[r];
                }
                const double norm = std::sqrt(norm2);
                std::map<int, double> grad;
                if (norm > 1e-12) {
                    for (std::size_t r = 0; r < dim; ++r)
                        for (const auto& [idx, coef] : row.f_rows[r])
                            grad[idx] += coef * w[r] / norm;
                }
                for (const auto& [idx, coef] : row.h)
                    grad[idx] -= coef;
                std::vector<LinTerm> terms(grad.begin(), grad.end());
                const double at_x = eval_terms(terms, lp.x);
                work.add_row(std::move(terms), Relation::LessEqual, at_x - viol,
                             row.name + "_cut");
            }
        }
        if (worst <= 1e-7) {
            result.status = SolveStatus::Optimal;
            result.x = lp.x;
            result.objective = lp.objective;
            result.duality_gap = lp.duality_gap;
            result.kelley_iterations = it + 1;
            return result;
        }
    }
    result.status = SolveStatus::IterationLimit;
    result.kelley_iterations = 500;
    return result;
}

SolveResult solve(const DeterministicProgram& dp) {
    if (dp.has_binaries() && dp.has_soc_rows())
        throw std::invalid_argument("solve: programs with both binaries and SOC rows "
                                    "are not supported");
    if (dp.has_binaries())
        return solve_milp(dp);
    if (dp.has_soc_rows())
        return solve_soc(dp);
    return solve_lp(dp);
}

SupportScenarios find_support_scenarios(const CCProgram& prog, const ScenarioSet& scen,
                                        const SolveResult& base) {
    if (base.status != SolveStatus::Optimal)
        throw std::invalid_argument("find_support_scenarios: base solve not optimal");

    const int n_scen = scen.size();
    SupportScenarios out;
    out.objective_full = base.objective;

    std::vector<int> keep;
    keep.reserve(n_scen - 1);
    for (int j = 0; j < n_scen; ++j) {
        keep.clear();
        for (int i = 0; i < n_scen; ++i)
            if (i != j)
                keep.push_back(i);
        const DeterministicProgram dpj = scenario_problem_subset(prog, scen, keep);
        bool moved;
        try {
            const SolveResult rj = solve_lp_lex(dpj);
            moved = rj.status != SolveStatus::Optimal ||
                    (rj.x - base.x).cwiseAbs().maxCoeff() > 1e-7;
        } catch (const std::runtime_error&) {
            moved = true; // removal exposed an unbounded face: the optimizer moved
        }
        if (moved)
            out.support_set.push_back(j);
    }
    out.count = static_cast<int>(out.support_set.size());

    const DeterministicProgram dps = scenario_problem_subset(prog, scen, out.support_set);
    const SolveResult rs = solve_lp_lex(dps);
    out.objective_support_only =
        rs.status == SolveStatus::Optimal ? rs.objective : -kInf;
    out.degenerate = std::abs(out.objective_support_only - out.objective_full) > 1e-7;
    return out;
}

} // namespace chancekit
