#ifndef CHANCEKIT_CERTIFICATES_HPP
#define CHANCEKIT_CERTIFICATES_HPP

#include <optional>
#include <string>

namespace chancekit {

// ---------------------------------------------------------------------------
// Certificate records
// ---------------------------------------------------------------------------

enum class PriorRule { Exact2008, ClosedForm2009 };

/// A-priori feasibility certificate: solving the scenario problem with
/// N_required scenarios makes the optimizer epsilon-feasible with
/// confidence 1 - beta.
struct PriorCertificate {
    double epsilon;
    double beta;
    int h_bar;      ///< support-scenario upper bound (defaults to n)
    long n_required;
    PriorRule rule;
};

/// A-posteriori certificate from the observed support-scenario count.
struct PosteriorCertificate {
    long n_scenarios;
    int k; ///< observed support-scenario count
    double beta;
    double epsilon_of_k;
};

/// Monte Carlo upper confidence bound on the violation probability.
struct FeasibilityBound {
    long n_hat;
    long v_hat;
    double rho;
    double eps_bar;
};

/// Parameters of an order-statistics lower-bound experiment.
struct LowerBoundPlan {
    enum class Variant { Scenario, Saa };
    Variant variant;
    long batches;   ///< M (scenario) or K (SAA)
    long n_per_batch;
    int order_index; ///< L
    double delta;
    double eps_level; ///< SAA only
};

// ---------------------------------------------------------------------------
// Tail arithmetic
// ---------------------------------------------------------------------------

/// Binomial lower tail sum_{i=0}^{k} C(N,i) eps^i (1-eps)^(N-i).
///
/// Terms are generated by the ratio recurrence anchored at the distribution
/// mode with a base-2 exponent tracker against overflow/underflow, and
/// accumulated with compensated summation in extended precision. Absolute
/// error stays below 1e-12 up to N = 1e6.
double binomial_tail(long n_draws, long k, double eps);

/// Smallest N with binomial_tail(N, h_bar - 1, eps) <= beta, located by
/// exponential bracketing plus binary search (the tail is decreasing in N).
long prior_sample_size_exact(double eps, double beta, int h_bar);

/// Closed-form bound ceil((2/eps) * (ln(1/beta) + h_bar)).
long prior_sample_size_simple(double eps, double beta, int h_bar);

/// Unique root in (0,1) of
///   beta/(N+1) * sum_{i=k}^{N} C(i,k) t^(i-k)  -  C(N,k) t^(N-k)  =  0
/// found by bisection with the polynomial evaluated in log space.
/// Bisection tolerance 1e-12 on the argument. k = N returns 1 by convention
/// (the polynomial has no root in (0,1) there).
double wait_and_judge_epsilon(long n_scenarios, long k, double beta);

/// Largest gamma in [0,1] with binomial_tail(n_hat, v_hat, gamma) >= rho,
/// by bisection (the tail is nonincreasing in gamma); tolerance 1e-10.
double posterior_violation_bound(long n_hat, long v_hat, double rho);

/// Largest k >= 0 with C(k+n-1,k) * binomial_tail(N, k+n-1, eps) <= beta,
/// by ascending scan with log-space binomial coefficients. Empty when even
/// k = 0 fails (i.e. N < prior_sample_size_exact(eps, beta, n)).
std::optional<long> discard_budget(long n_draws, int n_dim, double eps, double beta);

/// Sample size making every feasible point of the eps_inner-level empirical
/// approximation feasible at level eps with confidence 1 - beta, for an
/// L-Lipschitz inner function over a diameter-D domain:
///   ceil( 1/(2 (eps - eps_inner - theta)^2) *
///         (ln(1/beta) + n ln(ceil(2 L D / gamma)) + ln(ceil(1/theta))) )
/// with theta defaulting to (eps - eps_inner)/2.
long saa_feasibility_sample_size(double eps, double eps_inner, double gamma,
                                 double l_lipschitz, double diameter, int n_dim,
                                 double beta,
                                 std::optional<double> theta = std::nullopt);

/// ceil( ln(1/delta) / (2 (eps_level - eps)^2) ), requires eps_level > eps.
long saa_lowerbound_sample_size(double eps, double eps_level, double delta);

/// Largest L in {1..M} with
///   sum_{i=0}^{L-1} C(M,i) (1-eps)^(N i) (1-(1-eps)^N)^(M-i) <= delta,
/// i.e. binomial_tail(M, L-1, (1-eps)^N) <= delta. Empty when L = 1 fails.
std::optional<int> order_stat_index(long m_batches, long n_per_batch, double eps,
                                    double delta);

/// Inequality direction for saa_order_stat_index: AsPrinted keeps the
/// printed ">= delta" condition; ConservativeLE mirrors the scenario-side
/// condition "<= delta", which is the direction that actually certifies
/// the 1 - delta coverage.
enum class OrderStatDirection { AsPrinted, ConservativeLE };

/// Largest L in {1..K} with
///   sum_{i=0}^{L-1} C(K,i) b^i (1-b)^(K-i)  {>=, <=}  delta
/// where b = binomial_tail(N, floor(eps_level * N), eps).
std::optional<int> saa_order_stat_index(long k_batches, long n_per_batch, double eps,
                                        double eps_level, double delta,
                                        OrderStatDirection direction =
                                            OrderStatDirection::AsPrinted);

} // namespace chancekit

#endif
