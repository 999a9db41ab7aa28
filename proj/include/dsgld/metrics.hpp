// metrics.hpp — 2-Wasserstein distance between Gaussians, streaming
// cross-trial moment estimation, consensus error, and classification accuracy.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "dsgld/errors.hpp"
#include "dsgld/linalg.hpp"
#include "dsgld/models.hpp"

namespace dsgld {

// W2(N(m1,S1), N(m2,S2)). The Bures term is evaluated in its aligned-factor
// form min_W ||S1^{1/2} - S2^{1/2} W||_F over orthogonal W (optimum W = UV^T
// from the SVD of S2^{1/2} S1^{1/2}), which equals the usual cross-term trace
// for PSD inputs but avoids the trace cancellation that floors the distance
// near zero at sqrt(machine epsilon). Covariances must be symmetric to 1e-8.
inline double gaussian_w2(const Eigen::VectorXd& m1, const Eigen::MatrixXd& s1,
                          const Eigen::VectorXd& m2, const Eigen::MatrixXd& s2) {
    if (m1.size() != m2.size() || s1.rows() != m1.size() || s2.rows() != m2.size() ||
        s1.rows() != s1.cols() || s2.rows() != s2.cols())
        throw MetricError("dimension mismatch in gaussian_w2");
    if (max_abs_asymmetry(s1) > 1e-8 || max_abs_asymmetry(s2) > 1e-8)
        throw MetricError("covariance asymmetry exceeds 1e-8");
    const Eigen::MatrixXd a = psd_sqrt(s1);
    const Eigen::MatrixXd b = psd_sqrt(s2);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(b * a,
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::MatrixXd aligned = b * (svd.matrixU() * svd.matrixV().transpose());
    const double bures_sq = (a - aligned).squaredNorm();
    return std::sqrt((m1 - m2).squaredNorm() + bures_sq);
}

inline double gaussian_w2(const GaussianPosterior& a, const GaussianPosterior& b) {
    return gaussian_w2(a.mean, a.covariance, b.mean, b.covariance);
}

struct MomentEstimate {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance; // unbiased, symmetrized, eigenvalues clamped >= 0
    long long count = 0;
};

// Streaming per-(snapshot, agent) moment accumulator over trials. Uses the
// vector Welford update so full sample storage is never needed; partial
// accumulators from worker threads merge exactly (Chan's formula) in a fixed
// order, keeping results independent of thread scheduling.
class TrialEnsemble {
  public:
    TrialEnsemble() = default;
    TrialEnsemble(std::vector<long long> iterations, int num_agents, int dim)
        : iterations_(std::move(iterations)), num_agents_(num_agents), dim_(dim) {
        const std::size_t cells = iterations_.size() * static_cast<std::size_t>(num_agents);
        count_.assign(cells, 0);
        mean_.assign(cells, Eigen::VectorXd::Zero(dim));
        m2_.assign(cells, Eigen::MatrixXd::Zero(dim, dim));
    }

    const std::vector<long long>& iterations() const { return iterations_; }
    int num_agents() const { return num_agents_; }
    int dim() const { return dim_; }
    int num_slots() const { return static_cast<int>(iterations_.size()); }

    void add(int slot, int agent, const Eigen::VectorXd& x) {
        auto& n = count_[cell(slot, agent)];
        auto& mean = mean_[cell(slot, agent)];
        auto& m2 = m2_[cell(slot, agent)];
        ++n;
        const Eigen::VectorXd delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2.noalias() += delta * (x - mean).transpose();
    }

    void merge(const TrialEnsemble& other) {
        if (other.num_agents_ != num_agents_ || other.dim_ != dim_ ||
            other.iterations_ != iterations_)
            throw MetricError("merging incompatible ensembles");
        for (std::size_t c = 0; c < count_.size(); ++c) {
            const long long na = count_[c], nb = other.count_[c];
            if (nb == 0) continue;
            if (na == 0) {
                count_[c] = nb;
                mean_[c] = other.mean_[c];
                m2_[c] = other.m2_[c];
                continue;
            }
            const long long n = na + nb;
            const Eigen::VectorXd delta = other.mean_[c] - mean_[c];
            mean_[c] += delta * (static_cast<double>(nb) / n);
            m2_[c] += other.m2_[c] +
                      delta * delta.transpose() *
                          (static_cast<double>(na) * static_cast<double>(nb) / n);
            count_[c] = n;
        }
    }

    MomentEstimate moments(int slot, int agent) const {
        const auto c = cell(slot, agent);
        if (count_[c] < 2)
            throw MetricError("need at least two trials for moment estimation");
        MomentEstimate e;
        e.count = count_[c];
        e.mean = mean_[c];
        e.covariance = project_psd(m2_[c] / static_cast<double>(count_[c] - 1));
        return e;
    }

  private:
    std::size_t cell(int slot, int agent) const {
        if (slot < 0 || slot >= num_slots() || agent < 0 || agent >= num_agents_)
            throw MetricError("ensemble cell out of range");
        return static_cast<std::size_t>(slot) * static_cast<std::size_t>(num_agents_) +
               static_cast<std::size_t>(agent);
    }

    std::vector<long long> iterations_;
    int num_agents_ = 0;
    int dim_ = 0;
    std::vector<long long> count_;
    std::vector<Eigen::VectorXd> mean_;
    std::vector<Eigen::MatrixXd> m2_;
};

inline MomentEstimate ensemble_moments(const TrialEnsemble& e, int slot, int agent) {
    return e.moments(slot, agent);
}

// Per-agent W2-to-posterior over recorded snapshots, with cross-agent mean and
// sample standard deviation per snapshot.
struct W2Curve {
    std::vector<long long> iterations;
    Eigen::MatrixXd values; // num_slots x num_agents
    Eigen::VectorXd mean;
    Eigen::VectorXd std_dev;
};

inline W2Curve w2_to_posterior_curve(const TrialEnsemble& e,
                                     const GaussianPosterior& target) {
    W2Curve c;
    c.iterations = e.iterations();
    const int slots = e.num_slots();
    const int agents = e.num_agents();
    c.values.resize(slots, agents);
    c.mean.resize(slots);
    c.std_dev.resize(slots);
    for (int s = 0; s < slots; ++s) {
        for (int a = 0; a < agents; ++a) {
            const MomentEstimate m = e.moments(s, a);
            c.values(s, a) = gaussian_w2(m.mean, m.covariance, target.mean,
                                         target.covariance);
        }
        c.mean[s] = c.values.row(s).mean();
        if (agents > 1) {
            const double var =
                (c.values.row(s).array() - c.mean[s]).square().sum() / (agents - 1);
            c.std_dev[s] = std::sqrt(var);
        } else {
            c.std_dev[s] = 0.0;
        }
    }
    return c;
}

// sqrt(sum_i ||x_i - xbar||^2) for stacked iterates (rows are agents).
inline double consensus_error(const Eigen::MatrixXd& x) {
    if (x.rows() < 1) throw MetricError("empty iterate matrix");
    const Eigen::RowVectorXd mean = x.colwise().mean();
    return (x.rowwise() - mean).norm();
}

// Fraction of correct sign predictions: predict 1 iff z^T x >= 0.
inline double accuracy(const Eigen::VectorXd& params, const Dataset& data) {
    if (data.rows() == 0) throw MetricError("empty evaluation dataset");
    if (data.kind != TaskKind::BinaryClassification)
        throw MetricError("accuracy needs binary labels");
    if (params.size() != data.param_dim())
        throw MetricError("parameter dimension mismatch in accuracy");
    int correct = 0;
    for (int i = 0; i < data.rows(); ++i) {
        const double pred = data.features.row(i).dot(params) >= 0.0 ? 1.0 : 0.0;
        if (pred == data.targets[i]) ++correct;
    }
    return static_cast<double>(correct) / data.rows();
}

// Exact sampler for a Gaussian posterior (baseline pipelines).
inline Eigen::VectorXd sample_gaussian(const GaussianPosterior& p, CounterRng& rng) {
    const Eigen::MatrixXd root = psd_sqrt(p.covariance);
    Eigen::VectorXd z(p.mean.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
    return p.mean + root * z;
}

} // namespace dsgld
