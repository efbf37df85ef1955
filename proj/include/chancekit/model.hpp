#ifndef CHANCEKIT_MODEL_HPP
#define CHANCEKIT_MODEL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace chancekit {

// ---------------------------------------------------------------------------
// Scenario generators
// ---------------------------------------------------------------------------

/// Specification of a d-dimensional scenario distribution.
struct GeneratorSpec {
    enum class Kind { Gaussian, UniformBox, ScaledBernoulli, FiniteDiscrete };

    Kind kind = Kind::UniformBox;
    int d = 0;

    // Gaussian
    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma;

    // UniformBox
    Eigen::VectorXd lo, hi;

    // FiniteDiscrete: one support point per row of `support`, with `probs`
    // summing to one.
    Eigen::MatrixXd support;
    Eigen::VectorXd probs;

    static GeneratorSpec gaussian(Eigen::VectorXd mu, Eigen::MatrixXd sigma);
    static GeneratorSpec uniform_box(Eigen::VectorXd lo, Eigen::VectorXd hi);
    /// Independent coordinates taking values -1 / +1 with equal probability.
    static GeneratorSpec scaled_bernoulli(int d);
    static GeneratorSpec finite_discrete(Eigen::MatrixXd support, Eigen::VectorXd probs);

    /// Mean vector of the distribution.
    Eigen::VectorXd mean() const;

    /// P(xi <= v) componentwise (joint CDF). Only available for product
    /// distributions and finite supports; throws otherwise (Gaussian with
    /// off-diagonal covariance).
    double joint_cdf(const Eigen::VectorXd& v) const;

    /// Marginal CDF of coordinate k.
    double coordinate_cdf(int k, double v) const;

    void validate() const;
};

/// N i.i.d. realizations with provenance.
struct ScenarioSet {
    Eigen::MatrixXd data; ///< N x d, one scenario per row
    std::string origin;   ///< generator description + seed, or "external file"
    std::uint64_t seed = 0;

    int size() const { return static_cast<int>(data.rows()); }
    int dimension() const { return static_cast<int>(data.cols()); }

    void validate() const;
};

/// Deterministic sampling: the result is a pure function of (gen, n, seed).
ScenarioSet draw_scenarios(const GeneratorSpec& gen, int n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Chance-constrained program
// ---------------------------------------------------------------------------

enum class Relation { LessEqual, Equal, GreaterEqual };

/// Deterministic linear constraint a'x rel rhs.
struct DetRow {
    Eigen::VectorXd coeffs;
    Relation rel = Relation::LessEqual;
    double rhs = 0.0;
};

/// One row of the inner constraint:
///   f_i(x, xi) = (a0 + A' xi)' x + b0 + b' xi
/// affine in the decision x and in the uncertainty xi.
struct CCRow {
    Eigen::VectorXd a0; ///< length n
    double b0 = 0.0;
    Eigen::MatrixXd A;  ///< d x n, zero when uncertainty is additive only
    Eigen::VectorXd b;  ///< length d
};

/// Linear objective, deterministic linear constraints, and one joint chance
/// constraint P(f(x, xi) <= 0) >= 1 - epsilon.
struct CCProgram {
    int n = 0; ///< decision dimension
    int d = 0; ///< uncertainty dimension
    int m = 0; ///< inner constraint rows

    Eigen::VectorXd objective_c;
    std::vector<DetRow> det_constraints;
    Eigen::VectorXd lower; ///< per-variable bounds, -inf allowed
    Eigen::VectorXd upper; ///< +inf allowed
    std::vector<CCRow> cc_rows;
    double epsilon = 0.1;
    bool separable = false; ///< true iff every A is exactly zero

    void validate() const;
};

/// Row values f_1..f_m plus their maximum.
struct InnerEvaluation {
    Eigen::VectorXd rows;
    double fbar;
};

InnerEvaluation evaluate_inner(const CCProgram& prog, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& xi);

/// True iff max_i f_i(x, xi) > 0 strictly; the boundary counts as satisfied.
bool violation_indicator(const CCProgram& prog, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& xi);

// ---------------------------------------------------------------------------
// Gaussian individual chance constraint
// ---------------------------------------------------------------------------

/// P(a'x + b'xi + xi' D x <= e) >= 1 - epsilon with xi ~ N(mu, Sigma).
struct GaussianCC {
    Eigen::VectorXd a;  ///< length n
    Eigen::VectorXd b;  ///< length d
    Eigen::MatrixXd D;  ///< d x n
    double e = 0.0;
    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma;
    double epsilon = 0.05; ///< must be <= 1/2

    int n() const { return static_cast<int>(a.size()); }
    int d() const { return static_cast<int>(b.size()); }
    void validate() const;
};

/// Symmetric PSD square root via eigendecomposition; eigenvalues below
/// -1e-9 are rejected, small negatives are clamped to zero.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& sigma);

} // namespace chancekit

#endif
