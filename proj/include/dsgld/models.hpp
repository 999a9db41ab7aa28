// models.hpp — per-agent potentials (quadratic toy, Bayesian linear and
// logistic regression), exact/stochastic gradient oracles, curvature
// constants, minimizers, and the Gaussian posterior for the linear case.
//
// Conventions: the global potential is f(x) = sum_i f_i(x); each agent's
// ridge/prior term is reg/(2N) * ||x||^2 so the terms sum to the full prior.
// Stochastic gradients subsample only the data term: with local sample count
// m and batch size b, g = (m/b) * sum_{s in batch} grad_s(x) + (reg/N) x,
// sampled with replacement, which keeps the estimator unbiased.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "dsgld/data.hpp"
#include "dsgld/errors.hpp"
#include "dsgld/rng.hpp"

namespace dsgld {

inline double sigmoid(double u) {
    if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
    const double e = std::exp(u);
    return e / (1.0 + e);
}

inline double log1p_exp(double u) {
    return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

struct AgentData {
    Eigen::MatrixXd features; // m x dim, intercept-augmented
    Eigen::VectorXd targets;  // length m
};

struct GaussianPosterior {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
};

enum class PotentialKind { QuadraticToy, LinearRegression, LogisticRegression };

struct ModelSpec {
    PotentialKind kind = PotentialKind::QuadraticToy;
    int dim = 0;
    int num_agents = 0;
    double reg = 0.0;          // prior precision (0 for the toy)
    double mu = 0.0;           // strong-convexity constant of each f_i
    double lips = 0.0;         // gradient Lipschitz constant of each f_i
    Eigen::VectorXd minimizer; // argmin of sum_i f_i
    std::vector<AgentData> agents;
    Eigen::MatrixXd toy_centers;          // N x dim, toy only
    GaussianPosterior posterior;          // filled when a closed form exists

    int local_count() const {
        if (kind == PotentialKind::QuadraticToy) return 0;
        return static_cast<int>(agents.front().targets.size());
    }

    bool has_posterior() const { return posterior.mean.size() > 0; }

    double local_potential(int agent, const Eigen::VectorXd& x) const {
        check_query(agent, x);
        switch (kind) {
        case PotentialKind::QuadraticToy:
            return 0.5 * (x - toy_centers.row(agent).transpose()).squaredNorm();
        case PotentialKind::LinearRegression: {
            const auto& a = agents[static_cast<std::size_t>(agent)];
            return 0.5 * (a.features * x - a.targets).squaredNorm() +
                   0.5 * reg / num_agents * x.squaredNorm();
        }
        case PotentialKind::LogisticRegression: {
            const auto& a = agents[static_cast<std::size_t>(agent)];
            const Eigen::VectorXd u = a.features * x;
            double v = 0.0;
            for (Eigen::Index s = 0; s < u.size(); ++s)
                v += log1p_exp(u[s]) - a.targets[s] * u[s];
            return v + 0.5 * reg / num_agents * x.squaredNorm();
        }
        }
        throw ModelError("unreachable potential kind");
    }

    Eigen::VectorXd exact_gradient(int agent, const Eigen::VectorXd& x) const {
        check_query(agent, x);
        switch (kind) {
        case PotentialKind::QuadraticToy:
            return x - toy_centers.row(agent).transpose();
        case PotentialKind::LinearRegression: {
            const auto& a = agents[static_cast<std::size_t>(agent)];
            return a.features.transpose() * (a.features * x - a.targets) +
                   (reg / num_agents) * x;
        }
        case PotentialKind::LogisticRegression: {
            const auto& a = agents[static_cast<std::size_t>(agent)];
            Eigen::VectorXd p = a.features * x;
            for (Eigen::Index s = 0; s < p.size(); ++s)
                p[s] = sigmoid(p[s]) - a.targets[s];
            return a.features.transpose() * p + (reg / num_agents) * x;
        }
        }
        throw ModelError("unreachable potential kind");
    }

    // Data-term gradient of one local sample (no prior contribution).
    Eigen::VectorXd sample_gradient(int agent, int sample, const Eigen::VectorXd& x) const {
        const auto& a = agents[static_cast<std::size_t>(agent)];
        const Eigen::VectorXd z = a.features.row(sample).transpose();
        const double u = z.dot(x);
        if (kind == PotentialKind::LinearRegression)
            return (u - a.targets[sample]) * z;
        return (sigmoid(u) - a.targets[sample]) * z;
    }

    Eigen::VectorXd sum_exact_gradient(const Eigen::VectorXd& x) const {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
        for (int i = 0; i < num_agents; ++i) g += exact_gradient(i, x);
        return g;
    }

  private:
    void check_query(int agent, const Eigen::VectorXd& x) const {
        if (agent < 0 || agent >= num_agents)
            throw ModelError("agent index " + std::to_string(agent) + " out of range");
        if (x.size() != dim)
            throw ModelError("parameter dimension " + std::to_string(x.size()) +
                             " does not match model dimension " + std::to_string(dim));
    }
};

// Unbiased minibatch gradient estimate (with-replacement indices from rng).
inline Eigen::VectorXd stochastic_gradient(const ModelSpec& model, int agent,
                                           const Eigen::VectorXd& x, int batch,
                                           CounterRng& rng) {
    if (model.kind == PotentialKind::QuadraticToy)
        return model.exact_gradient(agent, x); // no data term to subsample
    const int m = model.local_count();
    if (batch < 1 || batch > m)
        throw ModelError("batch size " + std::to_string(batch) +
                         " outside [1, " + std::to_string(m) + "]");
    Eigen::VectorXd g = Eigen::VectorXd::Zero(model.dim);
    for (int b = 0; b < batch; ++b) {
        const int s = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(m)));
        g += model.sample_gradient(agent, s, x);
    }
    g *= static_cast<double>(m) / batch;
    g += (model.reg / model.num_agents) * x;
    return g;
}

namespace detail {
inline std::vector<AgentData> split_by_partition(const Dataset& data, const Partition& part) {
    std::vector<AgentData> agents;
    agents.reserve(part.agent_rows.size());
    for (const auto& rows : part.agent_rows) {
        AgentData a;
        a.features = take_rows(data.features, rows);
        a.targets = take_rows(data.targets, rows);
        agents.push_back(std::move(a));
    }
    return agents;
}

struct CurvatureRange {
    double min_eig = 0.0;
    double max_eig = 0.0;
};

inline CurvatureRange gram_eig_range(const std::vector<AgentData>& agents) {
    CurvatureRange r{std::numeric_limits<double>::infinity(), 0.0};
    for (const auto& a : agents) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.features.transpose() *
                                                          a.features);
        if (es.info() != Eigen::Success) throw ModelError("gram eigensolve failed");
        r.min_eig = std::min(r.min_eig, std::max(0.0, es.eigenvalues().minCoeff()));
        r.max_eig = std::max(r.max_eig, es.eigenvalues().maxCoeff());
    }
    return r;
}
} // namespace detail

// Gaussian posterior of ridge regression with unit observation noise:
// precision Z^T Z + lam I, mean its solve against Z^T y.
inline GaussianPosterior gaussian_posterior(const Eigen::MatrixXd& features,
                                            const Eigen::VectorXd& targets, double lam) {
    if (features.rows() != targets.size())
        throw ModelError("feature/target row mismatch");
    const Eigen::MatrixXd precision =
        features.transpose() * features +
        lam * Eigen::MatrixXd::Identity(features.cols(), features.cols());
    Eigen::LLT<Eigen::MatrixXd> llt(precision);
    if (llt.info() != Eigen::Success)
        throw ModelError("posterior precision is not positive definite");
    GaussianPosterior p;
    p.covariance = llt.solve(Eigen::MatrixXd::Identity(precision.rows(), precision.cols()));
    p.covariance = 0.5 * (p.covariance + p.covariance.transpose()).eval();
    p.mean = llt.solve(features.transpose() * targets);
    return p;
}

// f_i(x) = 0.5 ||x - c_i||^2; global target N(mean(c), I/N).
inline ModelSpec gaussian_toy_model(const Eigen::MatrixXd& centers) {
    if (centers.rows() < 1 || centers.cols() < 1)
        throw ModelError("need at least one agent and one dimension");
    ModelSpec m;
    m.kind = PotentialKind::QuadraticToy;
    m.num_agents = static_cast<int>(centers.rows());
    m.dim = static_cast<int>(centers.cols());
    m.toy_centers = centers;
    m.mu = 1.0;
    m.lips = 1.0;
    m.minimizer = centers.colwise().mean().transpose();
    m.posterior.mean = m.minimizer;
    m.posterior.covariance =
        Eigen::MatrixXd::Identity(m.dim, m.dim) / static_cast<double>(m.num_agents);
    return m;
}

inline ModelSpec linear_regression_model(const Dataset& data, const Partition& part,
                                         double lam) {
    if (data.kind != TaskKind::Regression) throw ModelError("expected regression data");
    if (!(lam > 0.0)) throw ModelError("prior precision lam must be positive");
    data.validate();
    ModelSpec m;
    m.kind = PotentialKind::LinearRegression;
    m.num_agents = part.num_agents();
    m.dim = data.param_dim();
    m.reg = lam;
    m.agents = detail::split_by_partition(data, part);
    const auto range = detail::gram_eig_range(m.agents);
    m.mu = range.min_eig + lam / m.num_agents;
    m.lips = range.max_eig + lam / m.num_agents;
    m.posterior = gaussian_posterior(data.features, data.targets, lam);
    m.minimizer = m.posterior.mean;
    return m;
}

inline ModelSpec logistic_regression_model(const Dataset& data, const Partition& part,
                                           double lam) {
    if (data.kind != TaskKind::BinaryClassification)
        throw ModelError("expected binary classification data");
    if (!(lam > 0.0)) throw ModelError("prior precision lam must be positive");
    data.validate();
    ModelSpec m;
    m.kind = PotentialKind::LogisticRegression;
    m.num_agents = part.num_agents();
    m.dim = data.param_dim();
    m.reg = lam;
    m.agents = detail::split_by_partition(data, part);
    const auto range = detail::gram_eig_range(m.agents);
    m.mu = lam / m.num_agents;                       // data term is only convex
    m.lips = 0.25 * range.max_eig + lam / m.num_agents;
    // Damped Newton on the full negative log-posterior.
    Eigen::VectorXd x = Eigen::VectorXd::Zero(m.dim);
    const Eigen::MatrixXd& z = data.features;
    for (int it = 0; it < 200; ++it) {
        Eigen::VectorXd p = z * x;
        Eigen::VectorXd s(p.size()), w(p.size());
        for (Eigen::Index r = 0; r < p.size(); ++r) {
            const double sg = sigmoid(p[r]);
            s[r] = sg - data.targets[r];
            w[r] = sg * (1.0 - sg);
        }
        const Eigen::VectorXd grad = z.transpose() * s + lam * x;
        if (grad.norm() <= 1e-11 * std::max(1.0, x.norm())) break;
        const Eigen::MatrixXd hess =
            z.transpose() * w.asDiagonal() * z +
            lam * Eigen::MatrixXd::Identity(m.dim, m.dim);
        const Eigen::VectorXd step = hess.ldlt().solve(grad);
        double t = 1.0;
        auto value = [&](const Eigen::VectorXd& v) {
            const Eigen::VectorXd u = z * v;
            double total = 0.5 * lam * v.squaredNorm();
            for (Eigen::Index r = 0; r < u.size(); ++r)
                total += log1p_exp(u[r]) - data.targets[r] * u[r];
            return total;
        };
        const double f0 = value(x);
        while (t > 1e-8 && value(x - t * step) > f0 - 1e-4 * t * grad.dot(step)) t *= 0.5;
        x -= t * step;
    }
    m.minimizer = x;
    return m;
}

// Empirical gradient-noise bound: largest Monte-Carlo mean of
// ||g_batch - grad f_i||^2 over agents and probe points (origin and the
// minimizer), inflated by a 1.5x safety factor; returns its square root.
inline double estimate_noise_bound(const ModelSpec& model, int batch, int num_draws,
                                   std::uint64_t seed) {
    if (model.kind == PotentialKind::QuadraticToy) return 0.0;
    if (num_draws < 2) throw ModelError("need at least two probe draws");
    std::vector<Eigen::VectorXd> points{Eigen::VectorXd::Zero(model.dim), model.minimizer};
    double worst = 0.0;
    for (std::size_t p = 0; p < points.size(); ++p) {
        for (int i = 0; i < model.num_agents; ++i) {
            const Eigen::VectorXd exact = model.exact_gradient(i, points[p]);
            double acc = 0.0;
            CounterRng rng(StreamKey{seed, p, static_cast<std::uint64_t>(i), 0,
                                     Purpose::NoiseProbe});
            for (int t = 0; t < num_draws; ++t)
                acc += (stochastic_gradient(model, i, points[p], batch, rng) - exact)
                           .squaredNorm();
            worst = std::max(worst, acc / num_draws);
        }
    }
    return std::sqrt(1.5 * worst);
}

} // namespace dsgld
