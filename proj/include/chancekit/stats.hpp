#ifndef CHANCEKIT_STATS_HPP
#define CHANCEKIT_STATS_HPP

#include <cmath>
#include <cstddef>
#include <vector>

namespace chancekit {

/// CDF of the standard normal distribution.
double normal_cdf(double x);

/// Quantile (inverse CDF) of the standard normal distribution.
///
/// Acklam's rational approximation (max relative error 1.15e-9) followed by
/// one Halley refinement against erfc, which brings the result to within a
/// few ulp. Requires p in (0,1).
double normal_quantile(double p);

/// log(n choose k) for 0 <= k <= n, exact-ish via incremental products.
double log_binomial_coefficient(long n, long k);

/// Numerically stable log(sum(exp(v))) over a vector of log-terms.
/// Entries of -inf are allowed and contribute nothing.
double log_sum_exp(const std::vector<double>& log_terms);

/// Neumaier-compensated running sum.
struct CompensatedSum {
    long double sum = 0.0L;
    long double comp = 0.0L;
    void add(long double v) {
        const long double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    long double value() const { return sum + comp; }
};

} // namespace chancekit

#endif
