#include "chancekit/evaluators.hpp"

#include "chancekit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace chancekit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double golden_min(const std::function<double(double)>& f, double a, double b, int iters) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < iters; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        }
    }
    return std::min(f1, f2);
}

double polytope_support(const Polytope& w, const Eigen::VectorXd& x) {
    const int d = static_cast<int>(x.size());
    DeterministicProgram dp;
    for (int k = 0; k < d; ++k)
        dp.add_variable("xi" + std::to_string(k + 1), VarKind::Continuous, -kInf, kInf);
    for (int k = 0; k < d; ++k)
        dp.objective[k] = -x[k]; // maximize x'xi
    for (int r = 0; r < w.H.rows(); ++r) {
        std::vector<LinTerm> terms;
        for (int k = 0; k < d; ++k)
            if (w.H(r, k) != 0.0)
                terms.emplace_back(k, w.H(r, k));
        dp.add_row(std::move(terms), Relation::LessEqual, w.k[r]);
    }
    const SolveResult res = solve_lp(dp);
    if (res.status == SolveStatus::Unbounded)
        return kInf;
    if (res.status != SolveStatus::Optimal)
        throw std::runtime_error("polytope_support: support LP not solvable");
    return -res.objective;
}

double ball_box_support(double radius, const Eigen::VectorXd& x) {
    // maximizer has the form clip(lambda * x, [-1,1]); grow lambda until the
    // 2-norm budget binds or the box takes over entirely
    const double r = radius;
    auto clipped_norm = [&](double lambda) {
        double n2 = 0.0;
        for (int k = 0; k < x.size(); ++k) {
            const double v = std::clamp(lambda * x[k], -1.0, 1.0);
            n2 += v * v;
        }
        return std::sqrt(n2);
    };
    const double full_norm = std::sqrt(static_cast<double>((x.array() != 0.0).count()));
    if (full_norm <= r) // ball never binds: twin of the plain box
        return x.cwiseAbs().sum();
    double lo = 0.0, hi = 1.0;
    while (clipped_norm(hi) < r)
        hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (clipped_norm(mid) < r ? lo : hi) = mid;
    }
    const double lambda = 0.5 * (lo + hi);
    double val = 0.0;
    for (int k = 0; k < x.size(); ++k)
        val += x[k] * std::clamp(lambda * x[k], -1.0, 1.0);
    return val;
}

/// u_j = max(plus_j * x_j, -minus_j * x_j); +inf when a sign condition of an
/// infinite deviation is violated.
double deviation_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& plus,
                      const Eigen::VectorXd& minus) {
    double n2 = 0.0;
    for (int k = 0; k < x.size(); ++k) {
        double u;
        if (!std::isfinite(plus[k])) {
            if (x[k] > 0.0)
                return kInf;
            u = -minus[k] * x[k];
        } else if (!std::isfinite(minus[k])) {
            if (x[k] < 0.0)
                return kInf;
            u = plus[k] * x[k];
        } else {
            u = std::max(plus[k] * x[k], -minus[k] * x[k]);
        }
        n2 += u * u;
    }
    return std::sqrt(n2);
}

} // namespace

double support_function(const UncertaintySetSpec& uset, const Eigen::VectorXd& x) {
    uset.validate();
    if (x.size() != uset.d)
        throw std::invalid_argument("support_function: dimension mismatch");
    switch (uset.kind) {
    case UncertaintySetSpec::Kind::Box:
        return x.cwiseAbs().sum();
    case UncertaintySetSpec::Kind::Ball:
        return uset.radius * x.norm();
    case UncertaintySetSpec::Kind::BallBox:
        return ball_box_support(uset.radius, x);
    case UncertaintySetSpec::Kind::Budget:
        return uset.radius * x.cwiseAbs().maxCoeff();
    case UncertaintySetSpec::Kind::U1:
        return polytope_support(uset.w, x);
    case UncertaintySetSpec::Kind::U2:
        return polytope_support(uset.w, uset.scale * x);
    case UncertaintySetSpec::Kind::U3: {
        const Eigen::MatrixXd root = psd_sqrt(uset.sigma);
        return uset.radius * (root * x).norm();
    }
    case UncertaintySetSpec::Kind::U4:
        return uset.radius * deviation_norm(x, uset.devs.delta_plus, uset.devs.delta_minus);
    case UncertaintySetSpec::Kind::U5:
        return uset.radius * deviation_norm(-x, uset.devs.delta_plus, uset.devs.delta_minus);
    }
    throw std::logic_error("unreachable");
}

double pi_value(int which, double x0, const Eigen::VectorXd& x, const PiContext& ctx) {
    switch (which) {
    case 1: {
        if (!ctx.w)
            throw std::invalid_argument("pi_value: pi^1 needs W");
        return std::max(x0 + polytope_support(*ctx.w, x), 0.0);
    }
    case 2: {
        if (!ctx.w)
            throw std::invalid_argument("pi_value: pi^2 needs W");
        return x0 + std::max(-x0 + polytope_support(*ctx.w, -x), 0.0);
    }
    case 3: {
        if (!ctx.sigma)
            throw std::invalid_argument("pi_value: pi^3 needs Sigma");
        const double q = x.dot(*ctx.sigma * x);
        return 0.5 * (x0 + std::sqrt(x0 * x0 + q));
    }
    case 4: {
        if (!ctx.devs)
            throw std::invalid_argument("pi_value: pi^4 needs deviations");
        const double c = deviation_norm(x, ctx.devs->delta_plus, ctx.devs->delta_minus);
        if (std::isinf(c))
            return kInf;
        // inf over mu > 0 of (mu/e) exp(x0/mu + c^2/(2 mu^2)), on a log grid
        auto obj = [&](double logmu) {
            const double mu = std::exp(logmu);
            return std::log(mu) - 1.0 + x0 / mu + c * c / (2.0 * mu * mu);
        };
        const double best = golden_min(obj, std::log(1e-9), std::log(1e9), 200);
        return std::exp(best);
    }
    case 5: {
        if (!ctx.devs)
            throw std::invalid_argument("pi_value: pi^5 needs deviations");
        const double c = deviation_norm(-x, ctx.devs->delta_plus, ctx.devs->delta_minus);
        if (std::isinf(c))
            return kInf;
        auto obj = [&](double logmu) {
            const double mu = std::exp(logmu);
            return std::log(mu) - 1.0 - x0 / mu + c * c / (2.0 * mu * mu);
        };
        const double best = golden_min(obj, std::log(1e-9), std::log(1e9), 200);
        return x0 + std::exp(best);
    }
    default:
        throw std::invalid_argument("pi_value: which must lie in 1..5");
    }
}

double pi_bound_min_t(int which, double x0, const Eigen::VectorXd& x, double eps,
                      const PiContext& ctx) {
    if (eps <= 0.0 || eps >= 1.0)
        throw std::invalid_argument("pi_bound_min_t: eps must lie in (0,1)");
    auto obj = [&](double t) { return t + pi_value(which, x0 - t, x, ctx) / eps; };
    // generous bracket around the kink/stationary region
    double scale = 1.0 + std::abs(x0) + x.cwiseAbs().sum();
    if (ctx.sigma)
        scale += std::sqrt(std::max(x.dot(*ctx.sigma * x), 0.0));
    if (ctx.devs) {
        const double c = deviation_norm(x, ctx.devs->delta_plus, ctx.devs->delta_minus);
        if (std::isfinite(c))
            scale += c;
        const double c2 = deviation_norm(-x, ctx.devs->delta_plus, ctx.devs->delta_minus);
        if (std::isfinite(c2))
            scale += c2;
    }
    if (ctx.w) {
        const double s1 = polytope_support(*ctx.w, x);
        const double s2 = polytope_support(*ctx.w, -x);
        if (std::isfinite(s1))
            scale += std::abs(s1);
        if (std::isfinite(s2))
            scale += std::abs(s2);
    }
    const double b = 50.0 * scale / std::min(eps, 1.0 - eps);
    return golden_min(obj, -b, b, 300);
}

} // namespace chancekit
