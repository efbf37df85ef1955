#include "chancekit/certificates.hpp"

#include "chancekit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace chancekit {

namespace {

void require(bool cond, const char* msg) {
    if (!cond)
        throw std::invalid_argument(msg);
}

/// Value held as mantissa * 2^exponent so that long products of moderate
/// factors can never overflow or underflow.
struct ScaledValue {
    long double mantissa = 1.0L;
    long exponent = 0;

    void mul(long double f) {
        mantissa *= f;
        normalize();
    }
    void normalize() {
        if (mantissa == 0.0L)
            return;
        int e = 0;
        mantissa = std::frexp(mantissa, &e);
        exponent += e;
    }
};

/// pmf(i0) = C(N,i0) eps^i0 (1-eps)^(N-i0) as a scaled value.
ScaledValue binomial_pmf_scaled(long n, long i0, double eps) {
    ScaledValue v;
    // product over j=1..i0 of ((n-i0+j)/j) * eps
    for (long j = 1; j <= i0; ++j)
        v.mul(static_cast<long double>(n - i0 + j) / static_cast<long double>(j) *
              static_cast<long double>(eps));
    // (1-eps)^(n-i0): the exponent product is exact to long double ulp here
    const long double log1meps = std::log1p(static_cast<long double>(-eps));
    const long double e = static_cast<long double>(n - i0) * log1meps;
    // split into a power of two and a residual factor
    const long double log2e = e / 0.693147180559945309417232121458L;
    const long p2 = static_cast<long>(std::floor(log2e));
    v.exponent += p2;
    v.mul(std::exp2(log2e - static_cast<long double>(p2)));
    return v;
}

} // namespace

double binomial_tail(long n_draws, long k, double eps) {
    require(n_draws >= 0, "binomial_tail: N must be >= 0");
    require(k >= 0 && k <= n_draws, "binomial_tail: need 0 <= k <= N");
    require(eps >= 0.0 && eps <= 1.0, "binomial_tail: eps must lie in [0,1]");

    if (eps == 0.0)
        return 1.0;
    if (eps == 1.0)
        return k == n_draws ? 1.0 : 0.0;
    if (k == n_draws)
        return 1.0;

    // Anchor at the pmf mode (clamped into [0,k]) and sweep outward with the
    // ratio recurrence; beyond the mode terms decay geometrically, so the
    // sweeps can stop once terms stop contributing.
    const long mode = std::clamp(static_cast<long>(std::floor((n_draws + 1) * eps)), 0L, k);
    const ScaledValue anchor = binomial_pmf_scaled(n_draws, mode, eps);

    // Common scale: represent every term relative to 2^anchor.exponent.
    const long double ratio_up = static_cast<long double>(eps) / (1.0L - static_cast<long double>(eps));

    // All summands are taken relative to the anchor term; terms more than
    // 2^-200 below it cannot move the sum at the 1e-12 level.
    CompensatedSum sum;
    // downward sweep: i = mode, mode-1, ..., 0
    {
        long double t = anchor.mantissa;
        long e = anchor.exponent;
        for (long i = mode; i >= 0; --i) {
            sum.add(std::ldexp(t, static_cast<int>(e - anchor.exponent)));
            if (i == 0)
                break;
            // term(i-1) = term(i) * i / ((N-i+1) * ratio_up)
            t *= static_cast<long double>(i) / (static_cast<long double>(n_draws - i + 1) * ratio_up);
            int sh = 0;
            t = std::frexp(t, &sh);
            e += sh;
            if (e - anchor.exponent < -200)
                break;
        }
    }
    // upward sweep: i = mode+1, ..., k
    {
        long double t = anchor.mantissa;
        long e = anchor.exponent;
        for (long i = mode + 1; i <= k; ++i) {
            t *= static_cast<long double>(n_draws - i + 1) / static_cast<long double>(i) * ratio_up;
            int sh = 0;
            t = std::frexp(t, &sh);
            e += sh;
            if (e - anchor.exponent < -200)
                break;
            sum.add(std::ldexp(t, static_cast<int>(e - anchor.exponent)));
        }
    }

    const long double scale =
        std::ldexp(1.0L, static_cast<int>(std::clamp(anchor.exponent, -16400L, 16400L)));
    const long double total = sum.value() * scale;
    return static_cast<double>(std::clamp(total, 0.0L, 1.0L));
}

long prior_sample_size_exact(double eps, double beta, int h_bar) {
    require(eps > 0.0 && eps < 1.0, "prior_sample_size_exact: eps in (0,1)");
    require(beta > 0.0 && beta < 1.0, "prior_sample_size_exact: beta in (0,1)");
    require(h_bar >= 1, "prior_sample_size_exact: h_bar >= 1");

    auto feasible = [&](long n) { return binomial_tail(n, h_bar - 1, eps) <= beta; };

    long lo = h_bar; // smallest N with a defined tail at k = h_bar - 1
    if (feasible(lo))
        return lo;
    long hi = std::max<long>(2 * lo, 2);
    while (!feasible(hi)) {
        lo = hi;
        hi *= 2;
        if (hi > (1L << 40))
            throw std::runtime_error("prior_sample_size_exact: bracketing failed");
    }
    // invariant: !feasible(lo), feasible(hi)
    while (hi - lo > 1) {
        const long mid = lo + (hi - lo) / 2;
        if (feasible(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

long prior_sample_size_simple(double eps, double beta, int h_bar) {
    require(eps > 0.0 && eps < 1.0, "prior_sample_size_simple: eps in (0,1)");
    require(beta > 0.0 && beta < 1.0, "prior_sample_size_simple: beta in (0,1)");
    require(h_bar >= 1, "prior_sample_size_simple: h_bar >= 1");
    const double raw = 2.0 / eps * (std::log(1.0 / beta) + h_bar);
    return static_cast<long>(std::ceil(raw - 1e-12));
}

double wait_and_judge_epsilon(long n_scenarios, long k, double beta) {
    require(n_scenarios >= 1, "wait_and_judge_epsilon: N >= 1");
    require(k >= 0 && k <= n_scenarios, "wait_and_judge_epsilon: need 0 <= k <= N");
    require(beta > 0.0 && beta < 1.0, "wait_and_judge_epsilon: beta in (0,1)");

    if (k == n_scenarios)
        return 1.0;

    // log C(i,k) for i = k..N, built incrementally
    const long count = n_scenarios - k + 1;
    std::vector<long double> logc(count);
    logc[0] = 0.0L;
    for (long i = k + 1; i <= n_scenarios; ++i)
        logc[i - k] = logc[i - k - 1] + std::log(static_cast<long double>(i)) -
                      std::log(static_cast<long double>(i - k));

    const long double log_beta_term =
        std::log(static_cast<long double>(beta)) - std::log(static_cast<long double>(n_scenarios + 1));
    const long double log_cnk = logc[count - 1];

    // sign of (beta/(N+1)) * sum_{i=k}^{N} C(i,k) t^{i-k} - C(N,k) t^{N-k},
    // compared in log space
    auto log_gap = [&](double t) -> long double {
        const long double logt = std::log(static_cast<long double>(t));
        long double maxlog = -std::numeric_limits<long double>::infinity();
        for (long j = 0; j < count; ++j)
            maxlog = std::max(maxlog, logc[j] + static_cast<long double>(j) * logt);
        CompensatedSum s;
        for (long j = 0; j < count; ++j)
            s.add(std::exp(logc[j] + static_cast<long double>(j) * logt - maxlog));
        const long double log_lhs = log_beta_term + maxlog + std::log(s.value());
        const long double log_rhs = log_cnk + static_cast<long double>(n_scenarios - k) * logt;
        return log_lhs - log_rhs; // positive near t -> 0+, negative at t -> 1-
    };

    double lo = 1e-300, hi = 1.0 - 1e-16;
    // bisection well below the documented 1e-12 tolerance
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (log_gap(mid) > 0.0L)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double posterior_violation_bound(long n_hat, long v_hat, double rho) {
    require(n_hat >= 1, "posterior_violation_bound: N >= 1");
    require(v_hat >= 0 && v_hat <= n_hat, "posterior_violation_bound: need 0 <= V <= N");
    require(rho > 0.0 && rho < 1.0, "posterior_violation_bound: rho in (0,1)");

    if (v_hat == n_hat)
        return 1.0; // tail is identically 1

    double lo = 0.0, hi = 1.0; // tail(lo) >= rho > tail(hi)
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (binomial_tail(n_hat, v_hat, mid) >= rho)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

std::optional<long> discard_budget(long n_draws, int n_dim, double eps, double beta) {
    require(n_draws >= n_dim, "discard_budget: need N >= n");
    require(n_dim >= 1, "discard_budget: n >= 1");
    require(eps > 0.0 && eps < 1.0, "discard_budget: eps in (0,1)");
    require(beta > 0.0 && beta < 1.0, "discard_budget: beta in (0,1)");

    const double log_beta = std::log(beta);
    long best = -1;
    for (long k = 0; k + n_dim - 1 <= n_draws; ++k) {
        const double tail = binomial_tail(n_draws, k + n_dim - 1, eps);
        const double lhs = log_binomial_coefficient(k + n_dim - 1, k) +
                           (tail > 0.0 ? std::log(tail) : -std::numeric_limits<double>::infinity());
        if (lhs <= log_beta)
            best = k;
        else
            break; // the left side is strictly increasing in k
    }
    if (best < 0)
        return std::nullopt;
    return best;
}

long saa_feasibility_sample_size(double eps, double eps_inner, double gamma,
                                 double l_lipschitz, double diameter, int n_dim,
                                 double beta, std::optional<double> theta_opt) {
    require(eps > 0.0 && eps < 1.0, "saa_feasibility_sample_size: eps in (0,1)");
    require(eps_inner >= 0.0 && eps_inner < eps,
            "saa_feasibility_sample_size: need 0 <= eps_inner < eps");
    require(gamma > 0.0, "saa_feasibility_sample_size: gamma > 0");
    require(l_lipschitz > 0.0, "saa_feasibility_sample_size: L > 0");
    require(diameter > 0.0, "saa_feasibility_sample_size: D > 0");
    require(n_dim >= 1, "saa_feasibility_sample_size: n >= 1");
    require(beta > 0.0 && beta < 1.0, "saa_feasibility_sample_size: beta in (0,1)");

    const double theta = theta_opt.value_or((eps - eps_inner) / 2.0);
    require(theta > 0.0 && theta < eps - eps_inner,
            "saa_feasibility_sample_size: need 0 < theta < eps - eps_inner");

    const double denom = 2.0 * (eps - eps_inner - theta) * (eps - eps_inner - theta);
    const double grid = std::ceil(2.0 * l_lipschitz * diameter / gamma);
    const double inv_theta = std::ceil(1.0 / theta);
    const double raw =
        (std::log(1.0 / beta) + n_dim * std::log(grid) + std::log(inv_theta)) / denom;
    return static_cast<long>(std::ceil(raw - 1e-9));
}

long saa_lowerbound_sample_size(double eps, double eps_level, double delta) {
    require(eps_level > eps, "saa_lowerbound_sample_size: need eps_level > eps");
    require(delta > 0.0 && delta < 1.0, "saa_lowerbound_sample_size: delta in (0,1)");
    const double raw = std::log(1.0 / delta) / (2.0 * (eps_level - eps) * (eps_level - eps));
    return static_cast<long>(std::ceil(raw - 1e-12));
}

std::optional<int> order_stat_index(long m_batches, long n_per_batch, double eps,
                                    double delta) {
    require(m_batches >= 1 && n_per_batch >= 1, "order_stat_index: M, N >= 1");
    require(eps > 0.0 && eps < 1.0, "order_stat_index: eps in (0,1)");
    require(delta > 0.0 && delta < 1.0, "order_stat_index: delta in (0,1)");

    // success probability of a single batch: (1-eps)^N
    const double p = std::exp(static_cast<double>(n_per_batch) * std::log1p(-eps));
    int best = 0;
    for (long l = 1; l <= m_batches; ++l) {
        if (binomial_tail(m_batches, l - 1, p) <= delta)
            best = static_cast<int>(l); // sum is increasing in L: scan to first failure
        else
            break;
    }
    if (best == 0)
        return std::nullopt;
    return best;
}

std::optional<int> saa_order_stat_index(long k_batches, long n_per_batch, double eps,
                                        double eps_level, double delta,
                                        OrderStatDirection direction) {
    require(k_batches >= 1 && n_per_batch >= 1, "saa_order_stat_index: K, N >= 1");
    require(eps > 0.0 && eps < 1.0, "saa_order_stat_index: eps in (0,1)");
    require(eps_level >= 0.0 && eps_level < 1.0, "saa_order_stat_index: eps_level in [0,1)");
    require(delta > 0.0 && delta < 1.0, "saa_order_stat_index: delta in (0,1)");

    const long budget = static_cast<long>(std::floor(eps_level * n_per_batch + 1e-12));
    const double b = binomial_tail(n_per_batch, std::min(budget, n_per_batch), eps);

    int best = 0;
    for (long l = 1; l <= k_batches; ++l) {
        const double s = binomial_tail(k_batches, l - 1, b);
        const bool ok = direction == OrderStatDirection::AsPrinted ? (s >= delta) : (s <= delta);
        if (ok)
            best = static_cast<int>(l);
        else if (direction == OrderStatDirection::ConservativeLE)
            break; // increasing in L, no later L can pass
    }
    if (best == 0)
        return std::nullopt;
    return best;
}

} // namespace chancekit
