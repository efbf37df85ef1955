#include "chancekit/model.hpp"

#include "chancekit/rng.hpp"
#include "chancekit/stats.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace chancekit {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond)
        throw std::invalid_argument(msg);
}

} // namespace

// ---------------------------------------------------------------------------
// GeneratorSpec
// ---------------------------------------------------------------------------

GeneratorSpec GeneratorSpec::gaussian(Eigen::VectorXd mu, Eigen::MatrixXd sigma) {
    GeneratorSpec g;
    g.kind = Kind::Gaussian;
    g.d = static_cast<int>(mu.size());
    g.mu = std::move(mu);
    g.sigma = std::move(sigma);
    g.validate();
    return g;
}

GeneratorSpec GeneratorSpec::uniform_box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
    GeneratorSpec g;
    g.kind = Kind::UniformBox;
    g.d = static_cast<int>(lo.size());
    g.lo = std::move(lo);
    g.hi = std::move(hi);
    g.validate();
    return g;
}

GeneratorSpec GeneratorSpec::scaled_bernoulli(int d) {
    GeneratorSpec g;
    g.kind = Kind::ScaledBernoulli;
    g.d = d;
    g.validate();
    return g;
}

GeneratorSpec GeneratorSpec::finite_discrete(Eigen::MatrixXd support, Eigen::VectorXd probs) {
    GeneratorSpec g;
    g.kind = Kind::FiniteDiscrete;
    g.d = static_cast<int>(support.cols());
    g.support = std::move(support);
    g.probs = std::move(probs);
    g.validate();
    return g;
}

void GeneratorSpec::validate() const {
    require(d >= 1, "GeneratorSpec: dimension must be >= 1");
    switch (kind) {
    case Kind::Gaussian: {
        require(mu.size() == d, "GeneratorSpec: mu length mismatch");
        require(sigma.rows() == d && sigma.cols() == d, "GeneratorSpec: Sigma shape mismatch");
        psd_sqrt(sigma); // throws if not PSD within tolerance
        break;
    }
    case Kind::UniformBox: {
        require(lo.size() == d && hi.size() == d, "GeneratorSpec: box bound length mismatch");
        for (int k = 0; k < d; ++k)
            require(hi[k] > lo[k], "GeneratorSpec: uniform_box requires hi > lo componentwise");
        break;
    }
    case Kind::ScaledBernoulli:
        break;
    case Kind::FiniteDiscrete: {
        require(support.cols() == d, "GeneratorSpec: support column count mismatch");
        require(support.rows() >= 1, "GeneratorSpec: empty support");
        require(probs.size() == support.rows(), "GeneratorSpec: probability count mismatch");
        double sum = 0.0;
        for (int i = 0; i < probs.size(); ++i) {
            require(probs[i] >= 0.0, "GeneratorSpec: negative probability");
            sum += probs[i];
        }
        require(std::abs(sum - 1.0) <= 1e-12, "GeneratorSpec: probabilities must sum to 1");
        break;
    }
    }
}

Eigen::VectorXd GeneratorSpec::mean() const {
    switch (kind) {
    case Kind::Gaussian:
        return mu;
    case Kind::UniformBox:
        return 0.5 * (lo + hi);
    case Kind::ScaledBernoulli:
        return Eigen::VectorXd::Zero(d);
    case Kind::FiniteDiscrete:
        return support.transpose() * probs;
    }
    throw std::logic_error("unreachable");
}

double GeneratorSpec::joint_cdf(const Eigen::VectorXd& v) const {
    require(v.size() == d, "joint_cdf: dimension mismatch");
    switch (kind) {
    case Kind::Gaussian: {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (i != j && std::abs(sigma(i, j)) > 1e-12)
                    throw std::invalid_argument(
                        "joint_cdf: Gaussian CDF available for diagonal covariance only");
        double p = 1.0;
        for (int k = 0; k < d; ++k)
            p *= coordinate_cdf(k, v[k]);
        return p;
    }
    case Kind::UniformBox:
    case Kind::ScaledBernoulli: {
        double p = 1.0;
        for (int k = 0; k < d; ++k)
            p *= coordinate_cdf(k, v[k]);
        return p;
    }
    case Kind::FiniteDiscrete: {
        double p = 0.0;
        for (int i = 0; i < support.rows(); ++i)
            if ((support.row(i).transpose().array() <= v.array()).all())
                p += probs[i];
        return p;
    }
    }
    throw std::logic_error("unreachable");
}

double GeneratorSpec::coordinate_cdf(int k, double v) const {
    require(k >= 0 && k < d, "coordinate_cdf: index out of range");
    switch (kind) {
    case Kind::Gaussian: {
        const double s = std::sqrt(sigma(k, k));
        if (s <= 0.0)
            return v >= mu[k] ? 1.0 : 0.0;
        return normal_cdf((v - mu[k]) / s);
    }
    case Kind::UniformBox: {
        if (v <= lo[k])
            return 0.0;
        if (v >= hi[k])
            return 1.0;
        return (v - lo[k]) / (hi[k] - lo[k]);
    }
    case Kind::ScaledBernoulli:
        if (v < -1.0)
            return 0.0;
        if (v < 1.0)
            return 0.5;
        return 1.0;
    case Kind::FiniteDiscrete: {
        double p = 0.0;
        for (int i = 0; i < support.rows(); ++i)
            if (support(i, k) <= v)
                p += probs[i];
        return p;
    }
    }
    throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// ScenarioSet / draw_scenarios
// ---------------------------------------------------------------------------

void ScenarioSet::validate() const {
    if (data.rows() < 1)
        throw std::invalid_argument("ScenarioSet: needs at least one scenario");
    if (!data.allFinite())
        throw std::invalid_argument("ScenarioSet: scenarios must be finite");
}

ScenarioSet draw_scenarios(const GeneratorSpec& gen, int n, std::uint64_t seed) {
    gen.validate();
    if (n < 1)
        throw std::invalid_argument("draw_scenarios: n must be >= 1");

    ScenarioSet out;
    out.data.resize(n, gen.d);
    out.seed = seed;
    Philox rng(seed);

    switch (gen.kind) {
    case GeneratorSpec::Kind::Gaussian: {
        const Eigen::MatrixXd root = psd_sqrt(gen.sigma);
        Eigen::VectorXd z(gen.d);
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < gen.d; ++k) {
                // inverse-CDF sampling keeps the stream layout flat
                double u = rng.next_double();
                if (u <= 0.0)
                    u = 0x1.0p-53;
                z[k] = normal_quantile(u);
            }
            out.data.row(i) = (gen.mu + root * z).transpose();
        }
        out.origin = "gaussian";
        break;
    }
    case GeneratorSpec::Kind::UniformBox: {
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < gen.d; ++k)
                out.data(i, k) = gen.lo[k] + rng.next_double() * (gen.hi[k] - gen.lo[k]);
        out.origin = "uniform_box";
        break;
    }
    case GeneratorSpec::Kind::ScaledBernoulli: {
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < gen.d; ++k)
                out.data(i, k) = rng.next_double() < 0.5 ? -1.0 : 1.0;
        out.origin = "scaled_bernoulli";
        break;
    }
    case GeneratorSpec::Kind::FiniteDiscrete: {
        const int npts = static_cast<int>(gen.support.rows());
        std::vector<double> cum(npts);
        double acc = 0.0;
        for (int i = 0; i < npts; ++i) {
            acc += gen.probs[i];
            cum[i] = acc;
        }
        cum[npts - 1] = 1.0;
        for (int i = 0; i < n; ++i) {
            const double u = rng.next_double();
            int idx = 0;
            while (idx + 1 < npts && u >= cum[idx])
                ++idx;
            out.data.row(i) = gen.support.row(idx);
        }
        out.origin = "finite_discrete";
        break;
    }
    }

    std::ostringstream os;
    os << out.origin << "(d=" << gen.d << ",N=" << n << ",seed=" << seed << ")";
    out.origin = os.str();
    out.validate();
    return out;
}

// ---------------------------------------------------------------------------
// CCProgram
// ---------------------------------------------------------------------------

void CCProgram::validate() const {
    require(n >= 1 && m >= 1 && d >= 1, "CCProgram: n, m, d must all be >= 1");
    require(epsilon > 0.0 && epsilon < 1.0, "CCProgram: epsilon must lie in (0,1)");
    require(objective_c.size() == n, "CCProgram: objective length mismatch");
    require(lower.size() == n && upper.size() == n, "CCProgram: bound length mismatch");
    for (int j = 0; j < n; ++j)
        require(lower[j] <= upper[j], "CCProgram: lower bound above upper bound");
    for (const DetRow& row : det_constraints)
        require(row.coeffs.size() == n, "CCProgram: det constraint length mismatch");
    require(static_cast<int>(cc_rows.size()) == m, "CCProgram: cc row count mismatch");
    for (const CCRow& row : cc_rows) {
        require(row.a0.size() == n, "CCProgram: cc row a0 length mismatch");
        require(row.b.size() == d, "CCProgram: cc row b length mismatch");
        require(row.A.rows() == d && row.A.cols() == n, "CCProgram: cc row A shape mismatch");
        if (separable)
            require(row.A.isZero(0.0), "CCProgram: separable flag requires every A == 0");
    }
}

InnerEvaluation evaluate_inner(const CCProgram& prog, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& xi) {
    require(x.size() == prog.n, "evaluate_inner: x dimension mismatch");
    require(xi.size() == prog.d, "evaluate_inner: xi dimension mismatch");
    InnerEvaluation ev;
    ev.rows.resize(prog.m);
    for (int i = 0; i < prog.m; ++i) {
        const CCRow& row = prog.cc_rows[i];
        ev.rows[i] = (row.a0 + row.A.transpose() * xi).dot(x) + row.b0 + row.b.dot(xi);
    }
    ev.fbar = ev.rows.maxCoeff();
    return ev;
}

bool violation_indicator(const CCProgram& prog, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& xi) {
    return evaluate_inner(prog, x, xi).fbar > 0.0;
}

// ---------------------------------------------------------------------------
// GaussianCC
// ---------------------------------------------------------------------------

void GaussianCC::validate() const {
    require(a.size() >= 1 && b.size() >= 1, "GaussianCC: empty dimensions");
    require(D.rows() == d() && D.cols() == n(), "GaussianCC: D shape mismatch");
    require(mu.size() == d(), "GaussianCC: mu length mismatch");
    require(sigma.rows() == d() && sigma.cols() == d(), "GaussianCC: Sigma shape mismatch");
    require(epsilon > 0.0 && epsilon <= 0.5, "GaussianCC: epsilon must lie in (0, 1/2]");
    psd_sqrt(sigma);
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& sigma) {
    if (sigma.rows() != sigma.cols())
        throw std::invalid_argument("psd_sqrt: matrix must be square");
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-9)
        throw std::invalid_argument("psd_sqrt: matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
    Eigen::VectorXd ev = es.eigenvalues();
    for (int i = 0; i < ev.size(); ++i) {
        if (ev[i] < -1e-9)
            throw std::invalid_argument("psd_sqrt: matrix has a negative eigenvalue");
        ev[i] = std::sqrt(std::max(ev[i], 0.0));
    }
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

} // namespace chancekit
