#ifndef CHANCEKIT_EVALUATORS_HPP
#define CHANCEKIT_EVALUATORS_HPP

#include "chancekit/reformulate.hpp"

namespace chancekit {

/// Numeric support function max_{xi in uset} x'xi. Polytope sets are solved
/// as LPs; the ball-box intersection uses the clipped-scaling structure of
/// its maximizer with a bisection on the scaling. Returns +inf when a sign
/// condition of U4/U5 is violated.
double support_function(const UncertaintySetSpec& uset, const Eigen::VectorXd& x);

/// Direct numeric value of pi^which(x0, x). pi^4/pi^5 run a golden-section
/// minimization over mu; diagnostic companion to the constraint encodings.
double pi_value(int which, double x0, const Eigen::VectorXd& x, const PiContext& ctx);

/// min over t of t + (1/eps) pi^which(x0 - t, x) by golden-section (the
/// objective is convex in t).
double pi_bound_min_t(int which, double x0, const Eigen::VectorXd& x, double eps,
                      const PiContext& ctx);

} // namespace chancekit

#endif
