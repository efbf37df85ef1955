#include "chancekit/reformulate.hpp"

#include "chancekit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace chancekit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCvarTDelta = 1e-4;

void require(bool cond, const std::string& msg) {
    if (!cond)
        throw std::invalid_argument(msg);
}

std::string scen_tag(int j) {
    return "s" + std::to_string(j + 1);
}

/// f_i(x, xi) = alpha'x + gamma for a fixed scenario.
void cc_row_at(const CCRow& row, const Eigen::VectorXd& xi, Eigen::VectorXd& alpha,
               double& gamma) {
    alpha = row.a0 + row.A.transpose() * xi;
    gamma = row.b0 + row.b.dot(xi);
}

std::vector<LinTerm> dense_to_terms(const Eigen::VectorXd& coeffs) {
    std::vector<LinTerm> terms;
    terms.reserve(coeffs.size());
    for (int k = 0; k < coeffs.size(); ++k)
        if (coeffs[k] != 0.0)
            terms.emplace_back(k, coeffs[k]);
    return terms;
}

/// Original decision variables plus the deterministic part of prog.
DeterministicProgram base_program(const CCProgram& prog) {
    prog.validate();
    DeterministicProgram dp;
    for (int j = 0; j < prog.n; ++j)
        dp.add_variable("x" + std::to_string(j + 1), VarKind::Continuous, prog.lower[j],
                        prog.upper[j]);
    for (int j = 0; j < prog.n; ++j)
        dp.objective[j] = prog.objective_c[j];
    int idx = 0;
    for (const DetRow& r : prog.det_constraints)
        dp.add_row(dense_to_terms(r.coeffs), r.rel, r.rhs, "det" + std::to_string(++idx));
    return dp;
}

AffineExpr neg(const AffineExpr& e) {
    AffineExpr out;
    out.constant = -e.constant;
    out.terms.reserve(e.terms.size());
    for (const auto& [idx, coef] : e.terms)
        out.terms.emplace_back(idx, -coef);
    return out;
}

AffineExpr shift_var(const AffineExpr& e, int var, double coef) {
    AffineExpr out = e;
    out.terms.emplace_back(var, coef);
    return out;
}

/// head and per-coordinate coefficients of inner row i: f_i = head + xi'coeffs.
void row_affine_parts(const CCProgram& prog, int row_index, AffineExpr& head,
                      std::vector<AffineExpr>& coeffs) {
    const CCRow& row = prog.cc_rows[row_index];
    head.terms = dense_to_terms(row.a0);
    head.constant = row.b0;
    coeffs.assign(prog.d, AffineExpr{});
    for (int k = 0; k < prog.d; ++k) {
        coeffs[k].terms = dense_to_terms(row.A.row(k).transpose());
        coeffs[k].constant = row.b[k];
    }
}

} // namespace

// ---------------------------------------------------------------------------
// Scenario approach
// ---------------------------------------------------------------------------

DeterministicProgram scenario_problem_subset(const CCProgram& prog, const ScenarioSet& scen,
                                             const std::vector<int>& keep) {
    require(scen.dimension() == prog.d, "scenario_problem: scenario dimension mismatch");
    DeterministicProgram dp = base_program(prog);
    Eigen::VectorXd alpha;
    double gamma;
    for (int j : keep) {
        require(j >= 0 && j < scen.size(), "scenario_problem: scenario index out of range");
        const Eigen::VectorXd xi = scen.data.row(j).transpose();
        for (int i = 0; i < prog.m; ++i) {
            cc_row_at(prog.cc_rows[i], xi, alpha, gamma);
            dp.add_row(dense_to_terms(alpha), Relation::LessEqual, -gamma,
                       "cc" + std::to_string(i + 1) + "_" + scen_tag(j));
        }
    }
    dp.provenance = {"scenario", static_cast<int>(keep.size()), ""};
    return dp;
}

DeterministicProgram scenario_problem(const CCProgram& prog, const ScenarioSet& scen) {
    scen.validate();
    std::vector<int> all(scen.size());
    for (int j = 0; j < scen.size(); ++j)
        all[j] = j;
    return scenario_problem_subset(prog, scen, all);
}

// ---------------------------------------------------------------------------
// SAA
// ---------------------------------------------------------------------------

Eigen::VectorXd auto_big_m(const CCProgram& prog, const Eigen::VectorXd& xi) {
    Eigen::VectorXd out(prog.m);
    Eigen::VectorXd alpha;
    double gamma;
    for (int i = 0; i < prog.m; ++i) {
        cc_row_at(prog.cc_rows[i], xi, alpha, gamma);
        double hi = gamma;
        for (int k = 0; k < prog.n; ++k) {
            if (alpha[k] > 0.0) {
                require(std::isfinite(prog.upper[k]),
                        "auto_big_m: variable box must be bounded (missing upper bound)");
                hi += alpha[k] * prog.upper[k];
            } else if (alpha[k] < 0.0) {
                require(std::isfinite(prog.lower[k]),
                        "auto_big_m: variable box must be bounded (missing lower bound)");
                hi += alpha[k] * prog.lower[k];
            }
        }
        out[i] = std::max(hi, 0.0);
    }
    return out;
}

DeterministicProgram saa_bigm(const CCProgram& prog, const ScenarioSet& scen,
                              double eps_level, std::optional<double> big_m) {
    scen.validate();
    require(scen.dimension() == prog.d, "saa_bigm: scenario dimension mismatch");
    require(eps_level >= 0.0 && eps_level < 1.0, "saa_bigm: eps_level must lie in [0,1)");

    const int n_scen = scen.size();
    DeterministicProgram dp = base_program(prog);
    std::vector<int> zcol(n_scen);
    for (int j = 0; j < n_scen; ++j)
        zcol[j] = dp.add_variable("z" + std::to_string(j + 1), VarKind::Binary, 0.0, 1.0);

    Eigen::VectorXd alpha;
    double gamma;
    for (int j = 0; j < n_scen; ++j) {
        const Eigen::VectorXd xi = scen.data.row(j).transpose();
        const Eigen::VectorXd m_row =
            big_m ? Eigen::VectorXd::Constant(prog.m, *big_m) : auto_big_m(prog, xi);
        for (int i = 0; i < prog.m; ++i) {
            cc_row_at(prog.cc_rows[i], xi, alpha, gamma);
            std::vector<LinTerm> terms = dense_to_terms(alpha);
            terms.emplace_back(zcol[j], -m_row[i]);
            dp.add_row(std::move(terms), Relation::LessEqual, -gamma,
                       "cc" + std::to_string(i + 1) + "_" + scen_tag(j));
        }
    }

    // integer-tightened cardinality row: sum z <= floor(eps_level * N)
    const double budget = std::floor(eps_level * n_scen + 1e-12);
    std::vector<LinTerm> card;
    for (int j = 0; j < n_scen; ++j)
        card.emplace_back(zcol[j], 1.0);
    dp.add_row(std::move(card), Relation::LessEqual, budget, "cardinality");

    dp.provenance = {"saa_bigm", n_scen,
                     big_m ? "explicit_m" : "interval_m"};
    return dp;
}

DeterministicProgram saa_separable_strong(const CCProgram& prog, const ScenarioSet& scen,
                                          double eps_level) {
    scen.validate();
    require(prog.separable, "saa_separable_strong: program is not separable");
    require(scen.dimension() == prog.d, "saa_separable_strong: scenario dimension mismatch");
    require(eps_level >= 0.0 && eps_level < 1.0,
            "saa_separable_strong: eps_level must lie in [0,1)");

    const int n_scen = scen.size();
    const double budget = std::floor(eps_level * n_scen + 1e-12);
    require(budget <= n_scen - 1,
            "saa_separable_strong: the budget must leave at least one scenario enforced");

    // Row i reads -a0_i'x >= b0_i + b_i'xi_j =: r_ij. Shift each row so
    // every right-hand side is nonnegative.
    Eigen::MatrixXd r(prog.m, n_scen);
    for (int i = 0; i < prog.m; ++i)
        for (int j = 0; j < n_scen; ++j)
            r(i, j) = prog.cc_rows[i].b0 +
                      prog.cc_rows[i].b.dot(scen.data.row(j).transpose());
    Eigen::VectorXd shift(prog.m);
    for (int i = 0; i < prog.m; ++i)
        shift[i] = std::max(0.0, -r.row(i).minCoeff());

    DeterministicProgram dp = base_program(prog);
    std::vector<int> vcol(prog.m), zcol(n_scen);
    for (int i = 0; i < prog.m; ++i)
        vcol[i] = dp.add_variable("v" + std::to_string(i + 1), VarKind::Continuous, -kInf, kInf);
    for (int j = 0; j < n_scen; ++j)
        zcol[j] = dp.add_variable("z" + std::to_string(j + 1), VarKind::Binary, 0.0, 1.0);

    for (int i = 0; i < prog.m; ++i) {
        // v_i = -a0_i'x + shift_i
        std::vector<LinTerm> link = dense_to_terms(prog.cc_rows[i].a0);
        link.emplace_back(vcol[i], 1.0);
        dp.add_row(std::move(link), Relation::Equal, shift[i], "v_link" + std::to_string(i + 1));
        for (int j = 0; j < n_scen; ++j) {
            const double rij = r(i, j) + shift[i];
            dp.add_row({{vcol[i], 1.0}, {zcol[j], rij}}, Relation::GreaterEqual, rij,
                       "mix" + std::to_string(i + 1) + "_" + scen_tag(j));
        }
    }

    std::vector<LinTerm> card;
    for (int j = 0; j < n_scen; ++j)
        card.emplace_back(zcol[j], 1.0);
    dp.add_row(std::move(card), Relation::LessEqual, budget, "cardinality");

    std::ostringstream detail;
    if (shift.maxCoeff() > 0.0)
        detail << "rhs_shift=" << shift.maxCoeff();
    dp.provenance = {"saa_strong", n_scen, detail.str()};
    return dp;
}

// ---------------------------------------------------------------------------
// CVaR
// ---------------------------------------------------------------------------

DeterministicProgram cvar_sample(const CCProgram& prog, const ScenarioSet& scen, double eps) {
    scen.validate();
    require(scen.dimension() == prog.d, "cvar_sample: scenario dimension mismatch");
    require(eps > 0.0 && eps < 1.0, "cvar_sample: eps must lie in (0,1)");

    const int n_scen = scen.size();
    DeterministicProgram dp = base_program(prog);
    const int tcol = dp.add_variable("t", VarKind::Continuous, kCvarTDelta, kInf);
    std::vector<int> scol(n_scen);
    for (int i = 0; i < n_scen; ++i)
        scol[i] = dp.add_variable("s" + std::to_string(i + 1), VarKind::Continuous, 0.0, kInf);

    Eigen::VectorXd alpha;
    double gamma;
    for (int i = 0; i < n_scen; ++i) {
        const Eigen::VectorXd xi = scen.data.row(i).transpose();
        for (int j = 0; j < prog.m; ++j) {
            cc_row_at(prog.cc_rows[j], xi, alpha, gamma);
            std::vector<LinTerm> terms = dense_to_terms(alpha);
            terms.emplace_back(tcol, 1.0);
            terms.emplace_back(scol[i], -1.0);
            dp.add_row(std::move(terms), Relation::LessEqual, -gamma,
                       "hinge" + std::to_string(j + 1) + "_" + scen_tag(i));
        }
    }
    std::vector<LinTerm> avg;
    for (int i = 0; i < n_scen; ++i)
        avg.emplace_back(scol[i], 1.0 / n_scen);
    avg.emplace_back(tcol, -eps);
    dp.add_row(std::move(avg), Relation::LessEqual, 0.0, "cvar_budget");

    dp.provenance = {"cvar", n_scen, ""};
    return dp;
}

DeterministicProgram empirical_cvar_program(const std::vector<double>& values, double eps) {
    require(!values.empty(), "empirical_cvar_program: empty sample");
    require(eps > 0.0 && eps < 1.0, "empirical_cvar_program: eps must lie in (0,1)");
    const int n = static_cast<int>(values.size());
    DeterministicProgram dp;
    const int gcol = dp.add_variable("gamma", VarKind::Continuous, -kInf, kInf);
    dp.objective[gcol] = 1.0;
    for (int i = 0; i < n; ++i) {
        const int s = dp.add_variable("s" + std::to_string(i + 1), VarKind::Continuous, 0.0, kInf);
        dp.objective[s] = 1.0 / (eps * n);
        dp.add_row({{s, 1.0}, {gcol, 1.0}}, Relation::GreaterEqual, values[i],
                   "hinge" + std::to_string(i + 1));
    }
    dp.provenance = {"cvar", n, "epigraph"};
    return dp;
}

// ---------------------------------------------------------------------------
// Gaussian SOCP
// ---------------------------------------------------------------------------

DeterministicProgram gaussian_socp(const GaussianCC& gcc) {
    gcc.validate();
    const int n = gcc.n();
    const int d = gcc.d();

    DeterministicProgram dp;
    for (int j = 0; j < n; ++j)
        dp.add_variable("x" + std::to_string(j + 1), VarKind::Continuous, -kInf, kInf);

    const Eigen::VectorXd lin = gcc.a + gcc.D.transpose() * gcc.mu; // (a + D'mu)
    const double rhs = gcc.e - gcc.b.dot(gcc.mu);
    const double q = gcc.epsilon < 0.5 ? normal_quantile(1.0 - gcc.epsilon) : 0.0;

    if (q == 0.0) {
        dp.add_row(dense_to_terms(lin), Relation::LessEqual, rhs, "gaussian_mean");
    } else {
        const Eigen::MatrixXd root = psd_sqrt(gcc.sigma);
        SocRow soc;
        soc.name = "gaussian";
        const Eigen::MatrixXd f = root * gcc.D; // d x n
        const Eigen::VectorXd g = root * gcc.b;
        soc.f_rows.resize(d);
        soc.g.resize(d);
        for (int r = 0; r < d; ++r) {
            soc.f_rows[r] = dense_to_terms(f.row(r).transpose());
            soc.g[r] = g[r];
        }
        soc.h = dense_to_terms(Eigen::VectorXd(-lin / q));
        soc.s = rhs / q;
        dp.soc_rows.push_back(std::move(soc));
    }
    dp.provenance = {"gaussian", 0, ""};
    return dp;
}

// ---------------------------------------------------------------------------
// Bonferroni split
// ---------------------------------------------------------------------------

std::vector<CCProgram> bonferroni_split(const CCProgram& prog,
                                        const std::vector<double>& weights) {
    prog.validate();
    std::vector<double> eps(prog.m, prog.epsilon / prog.m);
    if (!weights.empty()) {
        require(static_cast<int>(weights.size()) == prog.m,
                "bonferroni_split: need one weight per inner row");
        double sum = 0.0;
        for (double w : weights) {
            require(w > 0.0, "bonferroni_split: weights must be positive");
            sum += w;
        }
        require(sum <= prog.epsilon + 1e-12,
                "bonferroni_split: weights must sum to at most epsilon");
        eps = weights;
    }
    std::vector<CCProgram> out;
    out.reserve(prog.m);
    for (int i = 0; i < prog.m; ++i) {
        CCProgram piece = prog;
        piece.m = 1;
        piece.cc_rows = {prog.cc_rows[i]};
        piece.epsilon = eps[i];
        piece.separable = prog.separable;
        out.push_back(std::move(piece));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Uncertainty sets
// ---------------------------------------------------------------------------

void DirectionalDeviations::rebuild_index_sets() {
    finite_plus.clear();
    infinite_plus.clear();
    finite_minus.clear();
    infinite_minus.clear();
    for (int k = 0; k < delta_plus.size(); ++k)
        (std::isfinite(delta_plus[k]) ? finite_plus : infinite_plus).push_back(k);
    for (int k = 0; k < delta_minus.size(); ++k)
        (std::isfinite(delta_minus[k]) ? finite_minus : infinite_minus).push_back(k);
}

void UncertaintySetSpec::validate() const {
    require(d >= 1, "UncertaintySetSpec: dimension must be >= 1");
    switch (kind) {
    case Kind::Box:
        break;
    case Kind::Ball:
    case Kind::BallBox:
    case Kind::Budget:
        require(radius > 0.0, "UncertaintySetSpec: radius must be positive");
        break;
    case Kind::U1:
    case Kind::U2:
        require(w.H.cols() == d && w.H.rows() == w.k.size(),
                "UncertaintySetSpec: polytope shape mismatch");
        break;
    case Kind::U3:
        require(sigma.rows() == d && sigma.cols() == d,
                "UncertaintySetSpec: covariance shape mismatch");
        require(radius > 0.0, "UncertaintySetSpec: radius must be positive");
        psd_sqrt(sigma);
        break;
    case Kind::U4:
    case Kind::U5:
        require(devs.delta_plus.size() == d && devs.delta_minus.size() == d,
                "UncertaintySetSpec: deviation length mismatch");
        require(radius > 0.0, "UncertaintySetSpec: radius must be positive");
        for (int k = 0; k < d; ++k) {
            if (std::isfinite(devs.delta_plus[k]))
                require(devs.delta_plus[k] > 0.0,
                        "UncertaintySetSpec: finite deviations must be positive");
            if (std::isfinite(devs.delta_minus[k]))
                require(devs.delta_minus[k] > 0.0,
                        "UncertaintySetSpec: finite deviations must be positive");
        }
        break;
    }
}

UncertaintySetSpec make_box_set(int d) {
    UncertaintySetSpec s;
    s.kind = UncertaintySetSpec::Kind::Box;
    s.d = d;
    s.validate();
    return s;
}

UncertaintySetSpec make_ball_set(int d, double radius) {
    UncertaintySetSpec s;
    s.kind = UncertaintySetSpec::Kind::Ball;
    s.d = d;
    s.radius = radius;
    s.validate();
    return s;
}

UncertaintySetSpec make_ball_box_set(int d, double radius) {
    UncertaintySetSpec s;
    s.kind = UncertaintySetSpec::Kind::BallBox;
    s.d = d;
    s.radius = radius;
    s.validate();
    return s;
}

UncertaintySetSpec make_budget_set(int d, double gamma) {
    UncertaintySetSpec s;
    s.kind = UncertaintySetSpec::Kind::Budget;
    s.d = d;
    s.radius = gamma;
    s.validate();
    return s;
}

double ball_radius(double eps) {
    require(eps > 0.0 && eps < 1.0, "ball_radius: eps must lie in (0,1)");
    return std::sqrt(2.0 * std::log(1.0 / eps));
}

double budget_radius(int d, double eps) {
    require(d >= 1, "budget_radius: d must be >= 1");
    require(eps > 0.0 && eps < 1.0, "budget_radius: eps must lie in (0,1)");
    return std::sqrt(2.0 * d * std::log(1.0 / eps));
}

namespace {

/// w_k >= |expr_k| via two rows; returns the auxiliary indices.
std::vector<int> add_abs_auxiliaries(DeterministicProgram& dp,
                                     const std::vector<AffineExpr>& exprs,
                                     const std::string& tag) {
    std::vector<int> aux(exprs.size());
    for (std::size_t k = 0; k < exprs.size(); ++k) {
        aux[k] = dp.add_variable(tag + "_abs" + std::to_string(k + 1), VarKind::Continuous,
                                 0.0, kInf);
        // w - expr >= 0 and w + expr >= 0
        std::vector<LinTerm> up = {{aux[k], 1.0}};
        for (const auto& [idx, coef] : exprs[k].terms)
            up.emplace_back(idx, -coef);
        dp.add_row(std::move(up), Relation::GreaterEqual, exprs[k].constant,
                   tag + "_absp" + std::to_string(k + 1));
        std::vector<LinTerm> dn = {{aux[k], 1.0}};
        for (const auto& [idx, coef] : exprs[k].terms)
            dn.emplace_back(idx, coef);
        dp.add_row(std::move(dn), Relation::GreaterEqual, -exprs[k].constant,
                   tag + "_absm" + std::to_string(k + 1));
    }
    return aux;
}

/// One SOC row || radius * exprs ||_2 <= -(head_expr).
void add_norm_le_rows(DeterministicProgram& dp, double radius,
                      const std::vector<AffineExpr>& exprs, const AffineExpr& head,
                      const std::string& tag) {
    SocRow soc;
    soc.name = tag;
    soc.f_rows.resize(exprs.size());
    soc.g.resize(exprs.size());
    for (std::size_t k = 0; k < exprs.size(); ++k) {
        for (const auto& [idx, coef] : exprs[k].terms)
            soc.f_rows[k].emplace_back(idx, radius * coef);
        soc.g[k] = radius * exprs[k].constant;
    }
    const AffineExpr mh = neg(head);
    soc.h = mh.terms;
    soc.s = mh.constant;
    dp.soc_rows.push_back(std::move(soc));
}

/// Deviation-scaled auxiliaries: u_k >= plus_k * expr_k and
/// u_k >= -minus_k * expr_k, with infinite deviations turning into sign
/// constraints on expr_k.
std::vector<AffineExpr> add_deviation_auxiliaries(DeterministicProgram& dp,
                                                  const std::vector<AffineExpr>& exprs,
                                                  const Eigen::VectorXd& plus,
                                                  const Eigen::VectorXd& minus,
                                                  const std::string& tag) {
    std::vector<AffineExpr> aux_exprs(exprs.size());
    for (std::size_t k = 0; k < exprs.size(); ++k) {
        const int u = dp.add_variable(tag + "_u" + std::to_string(k + 1), VarKind::Continuous,
                                      0.0, kInf);
        aux_exprs[k].terms = {{u, 1.0}};
        if (std::isfinite(plus[k])) {
            std::vector<LinTerm> row = {{u, 1.0}};
            for (const auto& [idx, coef] : exprs[k].terms)
                row.emplace_back(idx, -plus[k] * coef);
            dp.add_row(std::move(row), Relation::GreaterEqual, plus[k] * exprs[k].constant,
                       tag + "_devp" + std::to_string(k + 1));
        } else {
            // finite only when expr_k <= 0
            std::vector<LinTerm> row = exprs[k].terms;
            dp.add_row(std::move(row), Relation::LessEqual, -exprs[k].constant,
                       tag + "_sgnp" + std::to_string(k + 1));
        }
        if (std::isfinite(minus[k])) {
            std::vector<LinTerm> row = {{u, 1.0}};
            for (const auto& [idx, coef] : exprs[k].terms)
                row.emplace_back(idx, minus[k] * coef);
            dp.add_row(std::move(row), Relation::GreaterEqual, -minus[k] * exprs[k].constant,
                       tag + "_devm" + std::to_string(k + 1));
        } else {
            // finite only when expr_k >= 0
            std::vector<LinTerm> row = exprs[k].terms;
            dp.add_row(std::move(row), Relation::GreaterEqual, -exprs[k].constant,
                       tag + "_sgnm" + std::to_string(k + 1));
        }
    }
    return aux_exprs;
}

/// Polytope support-function dual: lambda >= 0 with H'lambda = coeffs;
/// returns the affine expression k'lambda bounding max_{xi in W} xi'coeffs.
AffineExpr add_polytope_dual(DeterministicProgram& dp, const Polytope& w,
                             const std::vector<AffineExpr>& coeffs, double scale,
                             const std::string& tag) {
    const int q = static_cast<int>(w.H.rows());
    std::vector<int> lam(q);
    for (int r = 0; r < q; ++r)
        lam[r] = dp.add_variable(tag + "_lam" + std::to_string(r + 1), VarKind::Continuous,
                                 0.0, kInf);
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        std::vector<LinTerm> row;
        for (int r = 0; r < q; ++r)
            if (w.H(r, static_cast<int>(k)) != 0.0)
                row.emplace_back(lam[r], w.H(r, static_cast<int>(k)));
        for (const auto& [idx, coef] : coeffs[k].terms)
            row.emplace_back(idx, -scale * coef);
        dp.add_row(std::move(row), Relation::Equal, scale * coeffs[k].constant,
                   tag + "_dual" + std::to_string(k + 1));
    }
    AffineExpr support;
    for (int r = 0; r < q; ++r)
        if (w.k[r] != 0.0)
            support.terms.emplace_back(lam[r], w.k[r]);
    return support;
}

AffineExpr add_exprs(const AffineExpr& a, const AffineExpr& b) {
    AffineExpr out = a;
    out.constant += b.constant;
    out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
    return out;
}

} // namespace

void add_robust_counterpart_rows(DeterministicProgram& dp, const AffineExpr& head,
                                 const std::vector<AffineExpr>& coeffs,
                                 const UncertaintySetSpec& uset, const std::string& tag) {
    uset.validate();
    require(static_cast<int>(coeffs.size()) == uset.d,
            "add_robust_counterpart_rows: coefficient count must match set dimension");

    switch (uset.kind) {
    case UncertaintySetSpec::Kind::Box: {
        // head + ||coeffs||_1 <= 0
        const std::vector<int> aux = add_abs_auxiliaries(dp, coeffs, tag);
        std::vector<LinTerm> row = head.terms;
        for (int a : aux)
            row.emplace_back(a, 1.0);
        dp.add_row(std::move(row), Relation::LessEqual, -head.constant, tag + "_box");
        break;
    }
    case UncertaintySetSpec::Kind::Ball: {
        add_norm_le_rows(dp, uset.radius, coeffs, head, tag + "_ball");
        break;
    }
    case UncertaintySetSpec::Kind::BallBox: {
        // head + ||u||_1 + r ||coeffs - u||_2 <= 0 with auxiliary u
        std::vector<AffineExpr> u_exprs(coeffs.size());
        std::vector<AffineExpr> diff(coeffs.size());
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            const int u = dp.add_variable(tag + "_split" + std::to_string(k + 1),
                                          VarKind::Continuous, -kInf, kInf);
            u_exprs[k].terms = {{u, 1.0}};
            diff[k] = shift_var(coeffs[k], u, -1.0);
        }
        const std::vector<int> aux = add_abs_auxiliaries(dp, u_exprs, tag);
        AffineExpr lhs = head;
        for (int a : aux)
            lhs.terms.emplace_back(a, 1.0);
        add_norm_le_rows(dp, uset.radius, diff, lhs, tag + "_ballbox");
        break;
    }
    case UncertaintySetSpec::Kind::Budget: {
        // head + Gamma * max_k |coeffs_k| <= 0
        const int tau = dp.add_variable(tag + "_tau", VarKind::Continuous, 0.0, kInf);
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            std::vector<LinTerm> up = {{tau, 1.0}};
            for (const auto& [idx, coef] : coeffs[k].terms)
                up.emplace_back(idx, -coef);
            dp.add_row(std::move(up), Relation::GreaterEqual, coeffs[k].constant,
                       tag + "_supp" + std::to_string(k + 1));
            std::vector<LinTerm> dn = {{tau, 1.0}};
            for (const auto& [idx, coef] : coeffs[k].terms)
                dn.emplace_back(idx, coef);
            dp.add_row(std::move(dn), Relation::GreaterEqual, -coeffs[k].constant,
                       tag + "_supm" + std::to_string(k + 1));
        }
        std::vector<LinTerm> row = head.terms;
        row.emplace_back(tau, uset.radius);
        dp.add_row(std::move(row), Relation::LessEqual, -head.constant, tag + "_budget");
        break;
    }
    case UncertaintySetSpec::Kind::U1:
    case UncertaintySetSpec::Kind::U2: {
        const double scale = uset.kind == UncertaintySetSpec::Kind::U1 ? 1.0 : uset.scale;
        const AffineExpr support = add_polytope_dual(dp, uset.w, coeffs, scale, tag);
        const AffineExpr lhs = add_exprs(head, support);
        dp.add_row(lhs.terms, Relation::LessEqual, -lhs.constant, tag + "_poly");
        break;
    }
    case UncertaintySetSpec::Kind::U3: {
        const Eigen::MatrixXd root = psd_sqrt(uset.sigma);
        std::vector<AffineExpr> scaled(uset.d);
        for (int r = 0; r < uset.d; ++r) {
            for (int k = 0; k < uset.d; ++k) {
                const double fr = root(r, k);
                if (fr == 0.0)
                    continue;
                for (const auto& [idx, coef] : coeffs[k].terms)
                    scaled[r].terms.emplace_back(idx, fr * coef);
                scaled[r].constant += fr * coeffs[k].constant;
            }
        }
        add_norm_le_rows(dp, uset.radius, scaled, head, tag + "_u3");
        break;
    }
    case UncertaintySetSpec::Kind::U4: {
        const std::vector<AffineExpr> u = add_deviation_auxiliaries(
            dp, coeffs, uset.devs.delta_plus, uset.devs.delta_minus, tag + "_u4");
        add_norm_le_rows(dp, uset.radius, u, head, tag + "_u4");
        break;
    }
    case UncertaintySetSpec::Kind::U5: {
        // the pi^5 pairing swaps the deviation roles relative to U4
        std::vector<AffineExpr> negc(coeffs.size());
        for (std::size_t k = 0; k < coeffs.size(); ++k)
            negc[k] = neg(coeffs[k]);
        const std::vector<AffineExpr> u = add_deviation_auxiliaries(
            dp, negc, uset.devs.delta_plus, uset.devs.delta_minus, tag + "_u5");
        add_norm_le_rows(dp, uset.radius, u, head, tag + "_u5");
        break;
    }
    }
}

void robust_counterpart_rows(DeterministicProgram& dp, const CCProgram& prog,
                             int row_index, const UncertaintySetSpec& uset) {
    require(row_index >= 0 && row_index < prog.m,
            "robust_counterpart_rows: row index out of range");
    AffineExpr head;
    std::vector<AffineExpr> coeffs;
    row_affine_parts(prog, row_index, head, coeffs);
    add_robust_counterpart_rows(dp, head, coeffs, uset,
                                "rc" + std::to_string(row_index + 1));
}

UncertaintySetSpec UncertaintySetFamily::at(int d, double eps) const {
    switch (kind) {
    case UncertaintySetSpec::Kind::Box:
        return make_box_set(d);
    case UncertaintySetSpec::Kind::Ball:
        return make_ball_set(d, ball_radius(eps));
    case UncertaintySetSpec::Kind::BallBox:
        return make_ball_box_set(d, ball_radius(eps));
    case UncertaintySetSpec::Kind::Budget:
        return make_budget_set(d, budget_radius(d, eps));
    case UncertaintySetSpec::Kind::U1:
    case UncertaintySetSpec::Kind::U2:
    case UncertaintySetSpec::Kind::U3:
    case UncertaintySetSpec::Kind::U4:
    case UncertaintySetSpec::Kind::U5: {
        PiContext ctx;
        ctx.w = w;
        ctx.sigma = sigma;
        ctx.devs = devs;
        const int which = static_cast<int>(kind) - static_cast<int>(UncertaintySetSpec::Kind::U1) + 1;
        return uncertainty_set_from_pi(which, d, eps, ctx);
    }
    }
    throw std::logic_error("unreachable");
}

DeterministicProgram robust_counterpart_program(const CCProgram& prog,
                                                const UncertaintySetFamily& family,
                                                const std::vector<double>& weights) {
    const std::vector<CCProgram> pieces = bonferroni_split(prog, weights);
    DeterministicProgram dp = base_program(prog);
    for (int i = 0; i < prog.m; ++i) {
        const UncertaintySetSpec uset = family.at(prog.d, pieces[i].epsilon);
        AffineExpr head;
        std::vector<AffineExpr> coeffs;
        row_affine_parts(prog, i, head, coeffs);
        add_robust_counterpart_rows(dp, head, coeffs, uset, "rc" + std::to_string(i + 1));
    }
    switch (family.kind) {
    case UncertaintySetSpec::Kind::Box:
        dp.provenance.method = "robust_box";
        break;
    case UncertaintySetSpec::Kind::Ball:
        dp.provenance.method = "robust_ball";
        break;
    case UncertaintySetSpec::Kind::BallBox:
        dp.provenance.method = "robust_ball_box";
        break;
    case UncertaintySetSpec::Kind::Budget:
        dp.provenance.method = "robust_budget";
        break;
    case UncertaintySetSpec::Kind::U1:
        dp.provenance.method = "robust_u1";
        break;
    case UncertaintySetSpec::Kind::U2:
        dp.provenance.method = "robust_u2";
        break;
    case UncertaintySetSpec::Kind::U3:
        dp.provenance.method = "robust_u3";
        break;
    case UncertaintySetSpec::Kind::U4:
        dp.provenance.method = "robust_u4";
        break;
    case UncertaintySetSpec::Kind::U5:
        dp.provenance.method = "robust_u5";
        break;
    }
    return dp;
}

// ---------------------------------------------------------------------------
// Directional deviations
// ---------------------------------------------------------------------------

namespace {

/// sup over theta > 0 of sqrt(2 lnmgf(theta) / theta^2) on a log grid with
/// golden-section refinement. Returns +inf when the objective exceeds 1e6 or
/// the mgf estimate is non-finite anywhere on the grid.
double deviation_sup(const LogMgf& lnmgf) {
    auto objective = [&](double theta) -> double {
        const double v = lnmgf(theta);
        if (!std::isfinite(v))
            return kInf;
        return std::max(2.0 * v / (theta * theta), 0.0);
    };

    const int grid_points = 64;
    const double lo = -3.0, hi = 3.0; // log10 range
    double best = -1.0;
    int best_idx = -1;
    std::vector<double> thetas(grid_points);
    for (int i = 0; i < grid_points; ++i) {
        thetas[i] = std::pow(10.0, lo + (hi - lo) * i / (grid_points - 1));
        const double v = objective(thetas[i]);
        if (std::isinf(v))
            return kInf;
        if (v > best) {
            best = v;
            best_idx = i;
        }
    }
    // golden-section refinement around the best grid point (in log-theta)
    double a = std::log(thetas[std::max(best_idx - 1, 0)]);
    double b = std::log(thetas[std::min(best_idx + 1, grid_points - 1)]);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = objective(std::exp(x1)), f2 = objective(std::exp(x2));
    for (int it = 0; it < 80; ++it) {
        if (std::isinf(f1) || std::isinf(f2))
            return kInf;
        if (f1 > f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = objective(std::exp(x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = objective(std::exp(x2));
        }
    }
    best = std::max(best, std::max(f1, f2));
    const double dev = std::sqrt(best);
    return dev > 1e6 ? kInf : dev;
}

double stable_log_sinhc(double u) {
    // ln(sinh(u)/u) for u > 0
    if (u < 1e-4)
        return u * u / 6.0 - u * u * u * u / 180.0;
    if (u > 30.0)
        return u - std::log(2.0 * u) + std::log1p(-std::exp(-2.0 * u));
    return std::log(std::sinh(u) / u);
}

double stable_log_cosh(double u) {
    u = std::abs(u);
    if (u > 30.0)
        return u - std::log(2.0) + std::log1p(std::exp(-2.0 * u));
    return std::log(std::cosh(u));
}

} // namespace

DirectionalDeviations directional_deviations(const std::vector<LogMgf>& log_mgfs) {
    DirectionalDeviations out;
    const int d = static_cast<int>(log_mgfs.size());
    out.delta_plus.resize(d);
    out.delta_minus.resize(d);
    for (int k = 0; k < d; ++k) {
        const LogMgf& f = log_mgfs[k];
        out.delta_plus[k] = deviation_sup(f);
        out.delta_minus[k] = deviation_sup([&f](double theta) { return f(-theta); });
    }
    out.rebuild_index_sets();
    return out;
}

DirectionalDeviations directional_deviations(const GeneratorSpec& gen) {
    gen.validate();
    std::vector<LogMgf> fns;
    fns.reserve(gen.d);
    const Eigen::VectorXd mean = gen.mean();
    for (int k = 0; k < gen.d; ++k) {
        switch (gen.kind) {
        case GeneratorSpec::Kind::Gaussian: {
            const double var = gen.sigma(k, k);
            fns.push_back([var](double theta) { return 0.5 * theta * theta * var; });
            break;
        }
        case GeneratorSpec::Kind::UniformBox: {
            const double half = 0.5 * (gen.hi[k] - gen.lo[k]);
            fns.push_back(
                [half](double theta) { return stable_log_sinhc(std::abs(theta) * half); });
            break;
        }
        case GeneratorSpec::Kind::ScaledBernoulli:
            fns.push_back([](double theta) { return stable_log_cosh(theta); });
            break;
        case GeneratorSpec::Kind::FiniteDiscrete: {
            std::vector<double> vals, lps;
            for (int i = 0; i < gen.support.rows(); ++i) {
                if (gen.probs[i] <= 0.0)
                    continue;
                vals.push_back(gen.support(i, k) - mean[k]);
                lps.push_back(std::log(gen.probs[i]));
            }
            fns.push_back([vals, lps](double theta) {
                std::vector<double> lt(vals.size());
                for (std::size_t i = 0; i < vals.size(); ++i)
                    lt[i] = lps[i] + theta * vals[i];
                return log_sum_exp(lt);
            });
            break;
        }
        }
    }
    return directional_deviations(fns);
}

DirectionalDeviations directional_deviations(const Eigen::MatrixXd& samples) {
    require(samples.rows() >= 2, "directional_deviations: need at least two samples");
    const int d = static_cast<int>(samples.cols());
    const Eigen::VectorXd mean = samples.colwise().mean();
    std::vector<LogMgf> fns;
    fns.reserve(d);
    const double log_n = std::log(static_cast<double>(samples.rows()));
    for (int k = 0; k < d; ++k) {
        Eigen::VectorXd centered = samples.col(k).array() - mean[k];
        fns.push_back([centered, log_n](double theta) {
            std::vector<double> lt(centered.size());
            for (int i = 0; i < centered.size(); ++i)
                lt[i] = theta * centered[i];
            return log_sum_exp(lt) - log_n;
        });
    }
    return directional_deviations(fns);
}

// ---------------------------------------------------------------------------
// pi bounds
// ---------------------------------------------------------------------------

void add_pi_bound_rows(DeterministicProgram& dp, int which, const AffineExpr& head,
                       const std::vector<AffineExpr>& coeffs, double eps,
                       const PiContext& ctx, const std::string& tag) {
    require(which >= 1 && which <= 5, "add_pi_bound_rows: which must lie in 1..5");
    require(eps > 0.0 && eps < 1.0, "add_pi_bound_rows: eps must lie in (0,1)");
    const int d = static_cast<int>(coeffs.size());

    switch (which) {
    case 1: {
        require(ctx.w.has_value(), "pi^1 needs the support polytope W");
        const int t = dp.add_variable(tag + "_t", VarKind::Continuous, -kInf, kInf);
        const int eta = dp.add_variable(tag + "_eta", VarKind::Continuous, 0.0, kInf);
        const AffineExpr support = add_polytope_dual(dp, *ctx.w, coeffs, 1.0, tag);
        // eta >= (head - t) + support
        AffineExpr hinge = add_exprs(head, support);
        hinge = shift_var(hinge, t, -1.0);
        hinge = shift_var(hinge, eta, -1.0);
        dp.add_row(hinge.terms, Relation::LessEqual, -hinge.constant, tag + "_hinge");
        // t + eta / eps <= 0
        dp.add_row({{t, 1.0}, {eta, 1.0 / eps}}, Relation::LessEqual, 0.0, tag + "_pi1");
        break;
    }
    case 2: {
        require(ctx.w.has_value(), "pi^2 needs the support polytope W");
        const int t = dp.add_variable(tag + "_t", VarKind::Continuous, -kInf, kInf);
        const int eta = dp.add_variable(tag + "_eta", VarKind::Continuous, 0.0, kInf);
        std::vector<AffineExpr> negc(coeffs.size());
        for (std::size_t k = 0; k < coeffs.size(); ++k)
            negc[k] = neg(coeffs[k]);
        const AffineExpr support = add_polytope_dual(dp, *ctx.w, negc, 1.0, tag);
        // eta >= -(head - t) + support
        AffineExpr hinge = add_exprs(neg(head), support);
        hinge = shift_var(hinge, t, 1.0);
        hinge = shift_var(hinge, eta, -1.0);
        dp.add_row(hinge.terms, Relation::LessEqual, -hinge.constant, tag + "_hinge");
        // t + ((head - t) + eta) / eps <= 0
        AffineExpr total = head;
        total = shift_var(total, t, eps - 1.0); // (1/eps)(head - t) + t, scaled by eps
        total = shift_var(total, eta, 1.0);
        dp.add_row(total.terms, Relation::LessEqual, -total.constant, tag + "_pi2");
        break;
    }
    case 3: {
        require(ctx.sigma.has_value(), "pi^3 needs the covariance Sigma");
        require(ctx.sigma->rows() == d && ctx.sigma->cols() == d,
                "pi^3: covariance shape mismatch");
        const int t = dp.add_variable(tag + "_t", VarKind::Continuous, -kInf, kInf);
        const int wvar = dp.add_variable(tag + "_w", VarKind::Continuous, 0.0, kInf);
        // ||(head - t, Sigma^(1/2) coeffs)||_2 <= w as one stacked SOC row
        const Eigen::MatrixXd root = psd_sqrt(*ctx.sigma);
        SocRow soc;
        soc.name = tag + "_pi3";
        soc.f_rows.resize(d + 1);
        soc.g.assign(d + 1, 0.0);
        AffineExpr s_expr = shift_var(head, t, -1.0);
        soc.f_rows[0] = s_expr.terms;
        soc.g[0] = s_expr.constant;
        for (int r = 0; r < d; ++r) {
            AffineExpr acc;
            for (int k = 0; k < d; ++k) {
                const double fr = root(r, k);
                if (fr == 0.0)
                    continue;
                for (const auto& [idx, coef] : coeffs[k].terms)
                    acc.terms.emplace_back(idx, fr * coef);
                acc.constant += fr * coeffs[k].constant;
            }
            soc.f_rows[r + 1] = acc.terms;
            soc.g[r + 1] = acc.constant;
        }
        soc.h = {{wvar, 1.0}};
        soc.s = 0.0;
        dp.soc_rows.push_back(std::move(soc));
        // t + ((head - t) + w) / (2 eps) <= 0, scaled by 2 eps
        AffineExpr total = head;
        total = shift_var(total, t, 2.0 * eps - 1.0);
        total = shift_var(total, wvar, 1.0);
        dp.add_row(total.terms, Relation::LessEqual, -total.constant, tag + "_pi3");
        break;
    }
    case 4:
    case 5: {
        require(ctx.devs.has_value(), "pi^4/pi^5 need directional deviations");
        const UncertaintySetSpec uset = uncertainty_set_from_pi(which, d, eps, ctx);
        add_robust_counterpart_rows(dp, head, coeffs, uset, tag);
        break;
    }
    }
}

UncertaintySetSpec uncertainty_set_from_pi(int which, int d, double eps,
                                           const PiContext& ctx) {
    require(which >= 1 && which <= 5, "uncertainty_set_from_pi: which must lie in 1..5");
    require(eps > 0.0 && eps < 1.0, "uncertainty_set_from_pi: eps must lie in (0,1)");
    UncertaintySetSpec s;
    s.d = d;
    switch (which) {
    case 1:
        require(ctx.w.has_value(), "U1 needs the support polytope W");
        s.kind = UncertaintySetSpec::Kind::U1;
        s.w = *ctx.w;
        break;
    case 2:
        require(ctx.w.has_value(), "U2 needs the support polytope W");
        s.kind = UncertaintySetSpec::Kind::U2;
        s.w = *ctx.w;
        s.scale = 1.0 - 1.0 / eps;
        break;
    case 3:
        require(ctx.sigma.has_value(), "U3 needs the covariance Sigma");
        s.kind = UncertaintySetSpec::Kind::U3;
        s.sigma = *ctx.sigma;
        s.radius = std::sqrt((1.0 - eps) / eps);
        break;
    case 4:
        require(ctx.devs.has_value(), "U4 needs directional deviations");
        s.kind = UncertaintySetSpec::Kind::U4;
        s.devs = *ctx.devs;
        s.radius = std::sqrt(-2.0 * std::log(eps));
        break;
    case 5:
        require(ctx.devs.has_value(), "U5 needs directional deviations");
        s.kind = UncertaintySetSpec::Kind::U5;
        s.devs = *ctx.devs;
        s.radius = (1.0 - eps) / eps * std::sqrt(2.0 * std::log(1.0 / (1.0 - eps)));
        break;
    }
    s.validate();
    return s;
}

} // namespace chancekit
