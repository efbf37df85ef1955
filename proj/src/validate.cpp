#include "chancekit/validate.hpp"

#include "chancekit/certificates.hpp"
#include "chancekit/rng.hpp"
#include "chancekit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace chancekit {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond)
        throw std::invalid_argument(msg);
}

/// Run fn(trial) for trial = 0..count-1 across the configured thread budget.
void parallel_trials(int count, const std::function<void(int)>& fn) {
    const int threads = std::min(experiment_threads(), count);
    if (threads <= 1) {
        for (int t = 0; t < count; ++t)
            fn(t);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w]() {
            for (int t = w; t < count; t += threads)
                fn(t);
        });
    }
    for (std::thread& th : pool)
        th.join();
}

} // namespace

int experiment_threads() {
    const char* env = std::getenv("CHANCEKIT_THREADS");
    if (!env)
        return 1;
    const int v = std::atoi(env);
    return v >= 1 ? v : 1;
}

ViolationEstimate estimate_violation(const CCProgram& prog, const Eigen::VectorXd& x,
                                     const GeneratorSpec& gen, long n_hat,
                                     std::uint64_t seed) {
    require(n_hat >= 1, "estimate_violation: N_hat must be >= 1");
    const ScenarioSet fresh = draw_scenarios(gen, static_cast<int>(n_hat), seed);
    long violations = 0;
    for (int i = 0; i < fresh.size(); ++i)
        if (violation_indicator(prog, x, fresh.data.row(i).transpose()))
            ++violations;
    return ViolationEstimate{static_cast<double>(violations) / static_cast<double>(n_hat),
                             violations, n_hat};
}

// ---------------------------------------------------------------------------
// Coordinatewise family
// ---------------------------------------------------------------------------

CoordinatewiseFamily make_coordinatewise_family(const GeneratorSpec& gen, double eps) {
    gen.validate();
    const int n = gen.d;

    Eigen::VectorXd lo(n), hi(n);
    switch (gen.kind) {
    case GeneratorSpec::Kind::UniformBox:
        lo = gen.lo;
        hi = gen.hi;
        break;
    case GeneratorSpec::Kind::ScaledBernoulli:
        lo = Eigen::VectorXd::Constant(n, -1.0);
        hi = Eigen::VectorXd::Constant(n, 1.0);
        break;
    case GeneratorSpec::Kind::Gaussian:
        for (int k = 0; k < n; ++k) {
            const double s = std::sqrt(gen.sigma(k, k));
            lo[k] = gen.mu[k] - 10.0 * s;
            hi[k] = gen.mu[k] + 10.0 * s;
        }
        break;
    case GeneratorSpec::Kind::FiniteDiscrete:
        for (int k = 0; k < n; ++k) {
            lo[k] = gen.support.col(k).minCoeff();
            hi[k] = gen.support.col(k).maxCoeff();
        }
        break;
    }

    CCProgram prog;
    prog.n = n;
    prog.d = n;
    prog.m = n;
    prog.epsilon = eps;
    prog.objective_c = Eigen::VectorXd::Ones(n);
    prog.lower = lo;
    prog.upper = hi;
    prog.separable = true;
    prog.cc_rows.resize(n);
    for (int j = 0; j < n; ++j) {
        CCRow& row = prog.cc_rows[j];
        row.a0 = Eigen::VectorXd::Zero(n);
        row.a0[j] = -1.0; // f_j = xi_j - x_j
        row.b0 = 0.0;
        row.A = Eigen::MatrixXd::Zero(n, n);
        row.b = Eigen::VectorXd::Zero(n);
        row.b[j] = 1.0;
    }
    prog.validate();
    return CoordinatewiseFamily{std::move(prog), gen};
}

double family_violation(const CoordinatewiseFamily& family, const Eigen::VectorXd& x) {
    return 1.0 - family.gen.joint_cdf(x);
}

std::vector<double> violation_distribution_experiment(const CoordinatewiseFamily& family,
                                                      int n_scenarios, int trials,
                                                      std::uint64_t seed) {
    require(n_scenarios >= 1 && trials >= 1,
            "violation_distribution_experiment: need N >= 1 and trials >= 1");
    // fail fast if the family lacks a closed-form violation
    family.gen.joint_cdf(Eigen::VectorXd::Zero(family.gen.d));

    std::vector<double> out(trials);
    parallel_trials(trials, [&](int t) {
        const ScenarioSet scen =
            draw_scenarios(family.gen, n_scenarios, derive_seed(seed, t));
        const SolveResult res = solve_lp(scenario_problem(family.prog, scen));
        if (res.status != SolveStatus::Optimal)
            throw std::runtime_error("violation_distribution_experiment: trial not optimal");
        out[t] = family_violation(family, res.x.head(family.prog.n));
    });
    return out;
}

double empirical_tail(const std::vector<double>& values, double eps) {
    if (values.empty())
        return 0.0;
    long count = 0;
    for (double v : values)
        if (v > eps)
            ++count;
    return static_cast<double>(count) / static_cast<double>(values.size());
}

// ---------------------------------------------------------------------------
// Lower-bound experiments
// ---------------------------------------------------------------------------

LowerBoundOutcome lower_bound_experiment(const CCProgram& prog, const GeneratorSpec& gen,
                                         int m_batches, int n_per_batch, int order_index,
                                         double delta, std::uint64_t seed) {
    require(m_batches >= 1 && n_per_batch >= 1, "lower_bound_experiment: M, N >= 1");
    require(order_index >= 1 && order_index <= m_batches,
            "lower_bound_experiment: need 1 <= L <= M");
    const double p = std::exp(n_per_batch * std::log1p(-prog.epsilon));
    require(binomial_tail(m_batches, order_index - 1, p) <= delta,
            "lower_bound_experiment: (M, N, L) violate the order-statistics condition");

    std::vector<double> objectives(m_batches);
    parallel_trials(m_batches, [&](int j) {
        const ScenarioSet scen = draw_scenarios(gen, n_per_batch, derive_seed(seed, j));
        const SolveResult res = solve_lp(scenario_problem(prog, scen));
        if (res.status != SolveStatus::Optimal)
            throw std::runtime_error("lower_bound_experiment: batch not optimal");
        objectives[j] = res.objective;
    });
    std::sort(objectives.begin(), objectives.end());
    return LowerBoundOutcome{objectives[order_index - 1], std::move(objectives)};
}

LowerBoundOutcome saa_lower_bound_experiment(const CCProgram& prog, const GeneratorSpec& gen,
                                             int k_batches, int n_per_batch,
                                             double eps_level, int order_index, double delta,
                                             std::uint64_t seed) {
    require(k_batches >= 1 && n_per_batch >= 1, "saa_lower_bound_experiment: K, N >= 1");
    require(order_index >= 1 && order_index <= k_batches,
            "saa_lower_bound_experiment: need 1 <= L <= K");
    const long budget = static_cast<long>(std::floor(eps_level * n_per_batch + 1e-12));
    const double b = binomial_tail(n_per_batch, budget, prog.epsilon);
    require(binomial_tail(k_batches, order_index - 1, b) <= delta,
            "saa_lower_bound_experiment: (K, N, L) violate the order-statistics condition");

    std::vector<double> objectives(k_batches);
    parallel_trials(k_batches, [&](int j) {
        const ScenarioSet scen = draw_scenarios(gen, n_per_batch, derive_seed(seed, j));
        const SolveResult res = solve_milp(saa_bigm(prog, scen, eps_level));
        if (res.status != SolveStatus::Optimal)
            throw std::runtime_error("saa_lower_bound_experiment: batch not optimal");
        objectives[j] = res.objective;
    });
    std::sort(objectives.begin(), objectives.end());
    return LowerBoundOutcome{objectives[order_index - 1], std::move(objectives)};
}

// ---------------------------------------------------------------------------
// p-efficient points
// ---------------------------------------------------------------------------

std::vector<Eigen::VectorXd> p_efficient_points(const GeneratorSpec& finite_dist, double p) {
    finite_dist.validate();
    require(finite_dist.kind == GeneratorSpec::Kind::FiniteDiscrete,
            "p_efficient_points: finite support required");
    require(p > 0.0 && p <= 1.0, "p_efficient_points: p must lie in (0,1]");

    const int m = finite_dist.d;
    // distinct per-coordinate values, ascending
    std::vector<std::vector<double>> levels(m);
    for (int k = 0; k < m; ++k) {
        std::vector<double> vals;
        for (int i = 0; i < finite_dist.support.rows(); ++i)
            vals.push_back(finite_dist.support(i, k));
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        levels[k] = std::move(vals);
    }

    double grid_size = 1.0;
    for (const auto& l : levels)
        grid_size *= static_cast<double>(l.size());
    require(grid_size <= 2e6, "p_efficient_points: support grid too large to enumerate");

    // odometer over the grid, keep points with CDF >= p
    std::vector<Eigen::VectorXd> qualifying;
    std::vector<std::size_t> idx(m, 0);
    Eigen::VectorXd v(m);
    while (true) {
        for (int k = 0; k < m; ++k)
            v[k] = levels[k][idx[k]];
        if (finite_dist.joint_cdf(v) >= p - 1e-12)
            qualifying.push_back(v);
        int k = m - 1;
        while (k >= 0 && ++idx[k] == levels[k].size()) {
            idx[k] = 0;
            --k;
        }
        if (k < 0)
            break;
    }

    // minimal elements under the componentwise order
    std::vector<Eigen::VectorXd> minimal;
    for (const auto& cand : qualifying) {
        bool dominated = false;
        for (const auto& other : qualifying) {
            if (&other == &cand)
                continue;
            if ((other.array() <= cand.array() + 1e-12).all() &&
                (other.array() < cand.array() - 1e-12).any()) {
                dominated = true;
                break;
            }
        }
        if (!dominated)
            minimal.push_back(cand);
    }
    return minimal;
}

bool cone_union_contains(const std::vector<Eigen::VectorXd>& points,
                         const Eigen::VectorXd& y) {
    for (const auto& v : points)
        if ((y.array() >= v.array() - 1e-12).all())
            return true;
    return false;
}

void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
    os << "trial,N,objective,violation,support_count,method,wall_time_ms\n";
    for (const TrialRecord& r : records) {
        os << r.trial << ',' << r.n_scenarios << ',' << r.objective << ',' << r.violation
           << ',' << r.support_count << ',' << r.method << ',' << r.wall_time_ms << '\n';
    }
}

} // namespace chancekit
