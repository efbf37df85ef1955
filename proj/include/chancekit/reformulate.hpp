#ifndef CHANCEKIT_REFORMULATE_HPP
#define CHANCEKIT_REFORMULATE_HPP

#include "chancekit/model.hpp"
#include "chancekit/program.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace chancekit {

// ---------------------------------------------------------------------------
// Scenario approach / SAA / CVaR
// ---------------------------------------------------------------------------

/// LP enforcing every inner row at every scenario: m*N rows f_i(x, xi_j) <= 0
/// on top of the deterministic constraints and bounds.
DeterministicProgram scenario_problem(const CCProgram& prog, const ScenarioSet& scen);

/// Same, restricted to the scenarios listed in `keep` (may be empty).
DeterministicProgram scenario_problem_subset(const CCProgram& prog, const ScenarioSet& scen,
                                             const std::vector<int>& keep);

/// Per-row big-M values max_{x in box} f_i(x, xi) by interval arithmetic over
/// the variable bounds, clamped below at zero. Throws when a bound needed by
/// a nonzero coefficient is infinite.
Eigen::VectorXd auto_big_m(const CCProgram& prog, const Eigen::VectorXd& xi);

/// MILP with one binary per scenario: f_i(x, xi_j) <= M_ij z_j and the
/// cardinality row sum z <= floor(eps_level * N). When big_m is omitted the
/// coefficients come from auto_big_m, which requires a bounded variable box.
DeterministicProgram saa_bigm(const CCProgram& prog, const ScenarioSet& scen,
                              double eps_level, std::optional<double> big_m = std::nullopt);

/// Big-M-free MILP for separable programs (every A_i == 0): with
/// v_i = -a0_i'x and per-scenario right-hand sides r_ij = b0_i + b_i'xi_j,
/// rows v_i + r_ij z_j >= r_ij. Negative right-hand sides are handled by a
/// constant per-row shift (recorded in the provenance detail).
DeterministicProgram saa_separable_strong(const CCProgram& prog, const ScenarioSet& scen,
                                          double eps_level);

/// Sample CVaR constraint as an LP over (x, t, s_1..s_N):
///   s_i >= f_j(x, xi_i) + t for every row j,   s_i >= 0,
///   (1/N) sum s_i <= eps * t,                  t >= 1e-4.
/// The joint rows enter through their pointwise maximum, so no per-row
/// weights are needed. The strict t > 0 is approximated by t >= 1e-4.
DeterministicProgram cvar_sample(const CCProgram& prog, const ScenarioSet& scen, double eps);

/// Rockafellar-Uryasev epigraph LP whose optimal value is the empirical CVaR
/// of `values` at level 1 - eps:
///   min gamma + 1/(eps*N) * sum s_i   s.t. s_i >= values_i - gamma, s_i >= 0.
DeterministicProgram empirical_cvar_program(const std::vector<double>& values, double eps);

// ---------------------------------------------------------------------------
// Gaussian special case
// ---------------------------------------------------------------------------

/// SOC program equivalent to the Gaussian individual chance constraint for
/// eps <= 1/2:
///   || Sigma^(1/2) (b + D x) ||_2 <= (e - b'mu - (a + D'mu)'x) / q,
/// q = Phi^{-1}(1 - eps). At eps = 1/2 (q = 0) the row degenerates to the
/// linear row (a + D'mu)'x <= e - b'mu. Objective and bounds are left for the
/// caller to fill in.
DeterministicProgram gaussian_socp(const GaussianCC& gcc);

// ---------------------------------------------------------------------------
// Joint-to-individual conversion
// ---------------------------------------------------------------------------

/// Split a joint chance constraint into m single-row programs at levels
/// eps_i (default eps/m). Feasibility of all pieces implies feasibility of
/// the joint constraint (union bound), so this is a safe approximation, not
/// an equivalence. Throws when the weights sum above prog.epsilon.
std::vector<CCProgram> bonferroni_split(const CCProgram& prog,
                                        const std::vector<double>& weights = {});

// ---------------------------------------------------------------------------
// Uncertainty sets and robust counterparts
// ---------------------------------------------------------------------------

/// Polytope in H-representation: { xi : H xi <= k }.
struct Polytope {
    Eigen::MatrixXd H;
    Eigen::VectorXd k;
};

/// Directional deviations of zero-mean coordinates. Entries may be +inf;
/// the index sets record which are finite.
struct DirectionalDeviations {
    Eigen::VectorXd delta_plus;
    Eigen::VectorXd delta_minus;
    std::vector<int> finite_plus, infinite_plus;
    std::vector<int> finite_minus, infinite_minus;

    void rebuild_index_sets();
};

struct UncertaintySetSpec {
    enum class Kind { Box, Ball, BallBox, Budget, U1, U2, U3, U4, U5 };

    Kind kind = Kind::Box;
    int d = 0;
    double radius = 0.0; ///< ball/ball-box radius, budget Gamma, or U3..U5 radius
    double scale = 1.0;  ///< U2 scaling factor (1 - 1/eps)
    Polytope w;          ///< U1/U2
    Eigen::MatrixXd sigma;          ///< U3
    DirectionalDeviations devs;     ///< U4/U5

    void validate() const;
};

UncertaintySetSpec make_box_set(int d);
UncertaintySetSpec make_ball_set(int d, double radius);
UncertaintySetSpec make_ball_box_set(int d, double radius);
UncertaintySetSpec make_budget_set(int d, double gamma);

/// Radii that make the ball / budget counterparts safe approximations at
/// level eps for independent, zero-mean, [-1,1]-supported coordinates:
/// sqrt(2 ln(1/eps)) and sqrt(2 d ln(1/eps)).
double ball_radius(double eps);
double budget_radius(int d, double eps);

/// Affine expression over program variables: terms . v + constant.
struct AffineExpr {
    std::vector<LinTerm> terms;
    double constant = 0.0;
};

/// Append to dp the deterministic encoding of
///   head + xi' coeffs <= 0  for all xi in uset
/// where head and each coefficient are affine in the program variables.
/// Box/budget/U1/U2 produce linear rows (auxiliaries as needed); ball,
/// ball-box and U3..U5 produce one SOC row each.
void add_robust_counterpart_rows(DeterministicProgram& dp, const AffineExpr& head,
                                 const std::vector<AffineExpr>& coeffs,
                                 const UncertaintySetSpec& uset, const std::string& tag);

/// Robust counterpart of a single inner row of prog (form x0 + xi'x <= 0
/// with x0, x affine in the decision variables).
void robust_counterpart_rows(DeterministicProgram& dp, const CCProgram& prog,
                             int row_index, const UncertaintySetSpec& uset);

/// A family of uncertainty sets parameterized by the violation level, so a
/// joint constraint can be split and each row can get a set sized by its own
/// eps_i. Context data (W, Sigma, deviations) is shared across rows.
struct UncertaintySetFamily {
    UncertaintySetSpec::Kind kind = UncertaintySetSpec::Kind::Box;
    Polytope w;
    Eigen::MatrixXd sigma;
    DirectionalDeviations devs;

    UncertaintySetSpec at(int d, double eps) const;
};

/// Bonferroni split followed by one robust counterpart per inner row,
/// assembled into a single program over the original variables.
DeterministicProgram robust_counterpart_program(const CCProgram& prog,
                                                const UncertaintySetFamily& family,
                                                const std::vector<double>& weights = {});

// ---------------------------------------------------------------------------
// Directional deviations
// ---------------------------------------------------------------------------

/// ln E[exp(theta * xi_k)] of a centered coordinate; may return +inf where
/// the moment generating function diverges.
using LogMgf = std::function<double(double)>;

/// Forward/backward deviations sup_theta sqrt(2 ln E[exp(+-theta xi)] / theta^2)
/// over a 64-point log-spaced grid on [1e-3, 1e3] refined by golden-section.
/// Values above 1e6 (or non-finite mgf estimates) are reported as +inf.
DirectionalDeviations directional_deviations(const std::vector<LogMgf>& log_mgfs);
DirectionalDeviations directional_deviations(const GeneratorSpec& gen);
/// Sample-based variant; coordinates are centered empirically.
DirectionalDeviations directional_deviations(const Eigen::MatrixXd& samples);

// ---------------------------------------------------------------------------
// Moment bounds pi^1..pi^5 and their uncertainty sets
// ---------------------------------------------------------------------------

/// Context data for the pi bounds: pi^1/pi^2 need the support polytope W,
/// pi^3 needs the covariance, pi^4/pi^5 need directional deviations.
struct PiContext {
    std::optional<Polytope> w;
    std::optional<Eigen::MatrixXd> sigma;
    std::optional<DirectionalDeviations> devs;
};

/// Append rows encoding t + (1/eps) pi^which(head - t, coeffs) <= 0 with a
/// fresh variable t. pi^1/pi^2 become linear rows through support-function
/// duality plus a hinge auxiliary; pi^3 becomes one SOC row; pi^4/pi^5 are
/// emitted through their equivalent uncertainty sets U4/U5 (the inf over mu
/// never becomes a variable).
void add_pi_bound_rows(DeterministicProgram& dp, int which, const AffineExpr& head,
                       const std::vector<AffineExpr>& coeffs, double eps,
                       const PiContext& ctx, const std::string& tag);

/// The uncertainty set whose support function reproduces the t-minimized
/// pi bound: U1 = W, U2 = (1 - 1/eps) W, U3 an ellipsoid of radius
/// sqrt((1-eps)/eps), U4/U5 deviation-scaled sets of radii sqrt(-2 ln eps)
/// and ((1-eps)/eps) sqrt(2 ln(1/(1-eps))).
UncertaintySetSpec uncertainty_set_from_pi(int which, int d, double eps,
                                           const PiContext& ctx);

} // namespace chancekit

#endif
