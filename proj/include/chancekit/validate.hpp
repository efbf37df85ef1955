#ifndef CHANCEKIT_VALIDATE_HPP
#define CHANCEKIT_VALIDATE_HPP

#include "chancekit/model.hpp"
#include "chancekit/reformulate.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace chancekit {

/// Knobs of the statistical experiments; fixed here rather than scattered
/// through call sites.
struct ValidateConfig {
    int meta_repetitions = 200;
    double ci_multiplier = 3.0;
};

/// Thread budget for experiment loops: CHANCEKIT_THREADS, default 1.
/// Results are identical for any thread count (per-trial substreams, results
/// reduced in trial order).
int experiment_threads();

struct ViolationEstimate {
    double eps_hat;
    long v_hat;
    long n_hat;
};

/// Monte Carlo estimate of the violation probability at x over fresh samples:
/// eps_hat = V_hat / N_hat; deterministic given the seed.
ViolationEstimate estimate_violation(const CCProgram& prog, const Eigen::VectorXd& x,
                                     const GeneratorSpec& gen, long n_hat,
                                     std::uint64_t seed);

// ---------------------------------------------------------------------------
// Closed-form violation family
// ---------------------------------------------------------------------------

/// The canonical testbed min sum_j x_j s.t. P(x >= xi) >= 1 - eps with
/// independent coordinates, whose violation probability is exactly
/// 1 - prod_j F_j(x_j). Exact violation values let the experiments check
/// distributional laws without inner Monte Carlo error.
struct CoordinatewiseFamily {
    CCProgram prog;
    GeneratorSpec gen;
};

/// Builds the family; the variable box defaults to the support bounds of the
/// generator (Gaussian coordinates use mean +- 10 sigma).
CoordinatewiseFamily make_coordinatewise_family(const GeneratorSpec& gen, double eps);

/// Exact violation probability 1 - P(xi <= x); throws when the generator has
/// no closed-form joint CDF (non-diagonal Gaussian).
double family_violation(const CoordinatewiseFamily& family, const Eigen::VectorXd& x);

/// For each trial: draw N scenarios, solve the scenario problem, record the
/// exact violation of the optimizer. Returns one violation value per trial.
std::vector<double> violation_distribution_experiment(const CoordinatewiseFamily& family,
                                                      int n_scenarios, int trials,
                                                      std::uint64_t seed);

/// Fraction of values strictly above eps.
double empirical_tail(const std::vector<double>& values, double eps);

// ---------------------------------------------------------------------------
// Order-statistics lower bounds
// ---------------------------------------------------------------------------

struct LowerBoundOutcome {
    double o_l; ///< the L-th smallest batch objective
    std::vector<double> sorted_objectives;
};

/// Solve M independent scenario problems of size N and return the L-th
/// smallest objective. (M, N, L) must satisfy the order-statistics condition
/// binomial_tail(M, L-1, (1-eps)^N) <= delta for prog.epsilon.
LowerBoundOutcome lower_bound_experiment(const CCProgram& prog, const GeneratorSpec& gen,
                                         int m_batches, int n_per_batch, int order_index,
                                         double delta, std::uint64_t seed);

/// SAA variant: K batches of N samples solved at level eps_level; L validated
/// against the conservative direction of the SAA order-statistics condition.
LowerBoundOutcome saa_lower_bound_experiment(const CCProgram& prog, const GeneratorSpec& gen,
                                             int k_batches, int n_per_batch,
                                             double eps_level, int order_index, double delta,
                                             std::uint64_t seed);

// ---------------------------------------------------------------------------
// p-efficient points (separable oracle)
// ---------------------------------------------------------------------------

/// Enumerate the minimal points v with P(zeta <= v) >= p over the grid of
/// coordinatewise support values of a finite distribution.
std::vector<Eigen::VectorXd> p_efficient_points(const GeneratorSpec& finite_dist, double p);

/// True iff y lies in some cone v + R_+^m anchored at a p-efficient point.
bool cone_union_contains(const std::vector<Eigen::VectorXd>& points,
                         const Eigen::VectorXd& y);

// ---------------------------------------------------------------------------
// Trial CSV
// ---------------------------------------------------------------------------

struct TrialRecord {
    int trial;
    int n_scenarios;
    double objective;
    double violation;
    int support_count; ///< -1 when not computed
    std::string method;
    double wall_time_ms;
};

void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& records);

} // namespace chancekit

#endif
