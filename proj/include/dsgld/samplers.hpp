// samplers.hpp — decentralized Langevin samplers over mixing-matrix schedules:
// a gradient-tracking variant, a plain gossip variant, and a centralized
// averaged-noise reference chain, plus the trial runner that records
// trajectories and provenance stream hashes.
//
// Update rules (rows of x are agent iterates, W the current mixing matrix):
//   tracking:  x+ = W x - eta * y + sqrt(2 eta) w,
//              y+ = W y + g(x+) - g_cache,   g_cache+ = g(x+),
//              initialized with y0 = g_cache0 = g(x0);
//   gossip:    x+ = W x - eta * g(x) + sqrt(2 eta) w;
//   reference: x+ = x - (eta/N) sum_i grad f_i(x) + sqrt(2 eta) wbar,
//              wbar the average of the same N per-agent draws.
//
// Randomness is addressed, never streamed: the Langevin draw for the update
// into iterate k+1 uses key (trial, agent, k+1, Langevin); minibatch indices
// for a gradient evaluated at iterate k use key (trial, agent, k, Minibatch).
// Both samplers therefore consume one shared noise/index stream, which is what
// makes paired comparisons meaningful and N=1 runs coincide exactly.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "dsgld/errors.hpp"
#include "dsgld/io.hpp"
#include "dsgld/models.hpp"
#include "dsgld/network.hpp"
#include "dsgld/rng.hpp"

namespace dsgld {

enum class SamplerKind { DigingSgld, DeSgld, UlaReference };

inline std::string sampler_name(SamplerKind k) {
    switch (k) {
    case SamplerKind::DigingSgld: return "diging_sgld";
    case SamplerKind::DeSgld: return "de_sgld";
    case SamplerKind::UlaReference: return "ula_reference";
    }
    return "unknown";
}

enum class GradientMode { Exact, Minibatch };

struct SamplerConfig {
    double eta = 0.01;
    long long iterations = 100;
    GradientMode gradient_mode = GradientMode::Exact;
    int batch = 1;
    bool langevin_noise = true;
    bool stochastic_y_init = false; // tracker init uses the minibatch oracle
    double init_scale = 1.0;        // x0 ~ N(0, init_scale^2 I) per agent
    long long thin = 1;             // snapshot stride (0 and K always recorded)
    bool record_trackers = false;

    void validate(const ModelSpec& model) const {
        if (!(eta >= 0.0) || !std::isfinite(eta)) throw StateError("eta must be finite and >= 0");
        if (iterations < 0) throw StateError("iterations must be >= 0");
        if (thin < 1) throw StateError("thin must be >= 1");
        if (gradient_mode == GradientMode::Minibatch &&
            model.kind != PotentialKind::QuadraticToy) {
            if (batch < 1 || batch > model.local_count())
                throw StateError("batch outside [1, local sample count]");
        }
    }
};

// Identifies one trial's noise universe.
struct RunContext {
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;
};

struct NetworkState {
    Eigen::MatrixXd x;          // N x dim
    Eigen::MatrixXd y;          // N x dim tracker (tracking sampler only)
    Eigen::MatrixXd grad_cache; // gradient estimates used at the current x
    long long iteration = 0;
};

namespace detail {
inline Eigen::MatrixXd gaussian_block(int agents, int dim, const RunContext& ctx,
                                      std::uint64_t iteration, Purpose purpose,
                                      StreamHash* hash) {
    Eigen::MatrixXd w(agents, dim);
    for (int i = 0; i < agents; ++i) {
        CounterRng rng(StreamKey{ctx.seed, ctx.trial, static_cast<std::uint64_t>(i),
                                 iteration, purpose});
        for (int j = 0; j < dim; ++j) {
            w(i, j) = rng.normal();
            if (hash) hash->update(w(i, j));
        }
    }
    return w;
}

// Gradient estimates for all agents at the stacked iterate, addressed by the
// iterate's index so every sampler draws the same minibatch there.
inline Eigen::MatrixXd gradient_block(const ModelSpec& model, const Eigen::MatrixXd& x,
                                      const SamplerConfig& cfg, const RunContext& ctx,
                                      std::uint64_t iterate_index) {
    Eigen::MatrixXd g(x.rows(), x.cols());
    for (int i = 0; i < x.rows(); ++i) {
        const Eigen::VectorXd xi = x.row(i).transpose();
        if (cfg.gradient_mode == GradientMode::Exact ||
            model.kind == PotentialKind::QuadraticToy) {
            g.row(i) = model.exact_gradient(i, xi).transpose();
        } else {
            CounterRng rng(StreamKey{ctx.seed, ctx.trial, static_cast<std::uint64_t>(i),
                                     iterate_index, Purpose::Minibatch});
            g.row(i) = stochastic_gradient(model, i, xi, cfg.batch, rng).transpose();
        }
    }
    return g;
}

inline void check_shapes(const NetworkState& s, const Eigen::MatrixXd& w,
                         const ModelSpec& model) {
    if (s.x.rows() != model.num_agents || s.x.cols() != model.dim)
        throw StateError("state shape does not match model");
    if (w.rows() != model.num_agents || w.cols() != model.num_agents)
        throw StateError("mixing matrix size does not match agent count");
}
} // namespace detail

inline NetworkState init_network_state(const ModelSpec& model, const SamplerConfig& cfg,
                                       const RunContext& ctx) {
    cfg.validate(model);
    NetworkState s;
    s.x = cfg.init_scale *
          detail::gaussian_block(model.num_agents, model.dim, ctx, 0, Purpose::AgentInit,
                                 nullptr);
    const bool stochastic_init =
        cfg.stochastic_y_init && cfg.gradient_mode == GradientMode::Minibatch;
    SamplerConfig init_cfg = cfg;
    if (!stochastic_init) init_cfg.gradient_mode = GradientMode::Exact;
    s.grad_cache = detail::gradient_block(model, s.x, init_cfg, ctx, 0);
    s.y = s.grad_cache;
    s.iteration = 0;
    return s;
}

// One gradient-tracking update. The tracker mean stays equal to the mean of
// the cached gradient estimates by construction.
inline void diging_sgld_step(NetworkState& s, const Eigen::MatrixXd& w,
                             const ModelSpec& model, const SamplerConfig& cfg,
                             const RunContext& ctx, StreamHash* noise_hash = nullptr) {
    detail::check_shapes(s, w, model);
    const auto next = static_cast<std::uint64_t>(s.iteration + 1);
    Eigen::MatrixXd xn = w * s.x - cfg.eta * s.y;
    if (cfg.langevin_noise)
        xn += std::sqrt(2.0 * cfg.eta) * detail::gaussian_block(model.num_agents, model.dim,
                                                                ctx, next, Purpose::Langevin,
                                                                noise_hash);
    const Eigen::MatrixXd gn = detail::gradient_block(model, xn, cfg, ctx, next);
    s.y = (w * s.y + gn - s.grad_cache).eval();
    s.x = std::move(xn);
    s.grad_cache = gn;
    ++s.iteration;
}

// One gossip update without tracking.
inline void de_sgld_step(NetworkState& s, const Eigen::MatrixXd& w, const ModelSpec& model,
                         const SamplerConfig& cfg, const RunContext& ctx,
                         StreamHash* noise_hash = nullptr) {
    detail::check_shapes(s, w, model);
    const auto here = static_cast<std::uint64_t>(s.iteration);
    const Eigen::MatrixXd g = detail::gradient_block(model, s.x, cfg, ctx, here);
    Eigen::MatrixXd xn = w * s.x - cfg.eta * g;
    if (cfg.langevin_noise)
        xn += std::sqrt(2.0 * cfg.eta) *
              detail::gaussian_block(model.num_agents, model.dim, ctx, here + 1,
                                     Purpose::Langevin, noise_hash);
    s.x = std::move(xn);
    s.grad_cache = g;
    ++s.iteration;
}

// Largest admissible stepsize for the averaged reference chain.
inline double ula_max_stepsize(const ModelSpec& model) {
    return 2.0 * model.num_agents / (model.mu + model.lips);
}

// One centralized reference update with the noise averaged over the same
// per-agent draws the decentralized samplers consume.
inline Eigen::VectorXd ula_reference_step(const Eigen::VectorXd& x, const ModelSpec& model,
                                          double eta, const RunContext& ctx,
                                          long long iteration,
                                          StreamHash* noise_hash = nullptr,
                                          bool langevin_noise = true) {
    if (x.size() != model.dim) throw StateError("state dimension does not match model");
    Eigen::VectorXd xn =
        x - (eta / model.num_agents) * model.sum_exact_gradient(x);
    if (langevin_noise) {
        const Eigen::MatrixXd w = detail::gaussian_block(
            model.num_agents, model.dim, ctx, static_cast<std::uint64_t>(iteration + 1),
            Purpose::Langevin, noise_hash);
        xn += std::sqrt(2.0 * eta) * w.colwise().mean().transpose();
    }
    return xn;
}

struct Trajectory {
    SamplerKind kind = SamplerKind::DigingSgld;
    double eta = 0.0;
    long long total_iterations = 0;
    std::vector<long long> iterations;     // recorded snapshot indices
    std::vector<Eigen::MatrixXd> states;   // rows are agents (one row for the reference)
    std::vector<Eigen::MatrixXd> trackers; // filled when record_trackers is set
    std::uint64_t langevin_hash = 0;
    std::uint64_t minibatch_hash = 0;
};

namespace detail {
// Hash of the shared per-iterate minibatch index stream over iterates 0..K.
// Computed from the key schedule itself so every sampler configured on the
// same trial reports the same value.
inline std::uint64_t minibatch_stream_hash(const ModelSpec& model, const SamplerConfig& cfg,
                                           const RunContext& ctx) {
    if (cfg.gradient_mode != GradientMode::Minibatch ||
        model.kind == PotentialKind::QuadraticToy)
        return 0;
    StreamHash h;
    const auto m = static_cast<std::uint64_t>(model.local_count());
    for (long long k = 0; k <= cfg.iterations; ++k)
        for (int i = 0; i < model.num_agents; ++i) {
            CounterRng rng(StreamKey{ctx.seed, ctx.trial, static_cast<std::uint64_t>(i),
                                     static_cast<std::uint64_t>(k), Purpose::Minibatch});
            for (int b = 0; b < cfg.batch; ++b) h.update(rng.uniform_index(m));
        }
    return h.digest();
}
} // namespace detail

// Runs one trial of the chosen sampler over the schedule.
inline Trajectory run(SamplerKind kind, const GraphSchedule& schedule,
                      const ModelSpec& model, const SamplerConfig& cfg,
                      const RunContext& ctx) {
    cfg.validate(model);
    if (schedule.num_agents != model.num_agents)
        throw StateError("schedule and model disagree on agent count");
    if (kind == SamplerKind::UlaReference && cfg.eta > ula_max_stepsize(model))
        throw StateError("reference-chain stepsize " + std::to_string(cfg.eta) +
                         " exceeds admissible bound " +
                         std::to_string(ula_max_stepsize(model)));

    Trajectory traj;
    traj.kind = kind;
    traj.eta = cfg.eta;
    traj.total_iterations = cfg.iterations;
    traj.minibatch_hash = detail::minibatch_stream_hash(model, cfg, ctx);
    StreamHash noise_hash;

    auto want_snapshot = [&](long long k) {
        return k == 0 || k == cfg.iterations || k % cfg.thin == 0;
    };

    if (kind == SamplerKind::UlaReference) {
        const Eigen::MatrixXd inits =
            cfg.init_scale * detail::gaussian_block(model.num_agents, model.dim, ctx, 0,
                                                    Purpose::AgentInit, nullptr);
        Eigen::VectorXd x = inits.colwise().mean().transpose();
        for (long long k = 0; k <= cfg.iterations; ++k) {
            if (want_snapshot(k)) {
                traj.iterations.push_back(k);
                traj.states.push_back(x.transpose());
            }
            if (k < cfg.iterations)
                x = ula_reference_step(x, model, cfg.eta, ctx, k, &noise_hash,
                                       cfg.langevin_noise);
        }
    } else {
        NetworkState s = init_network_state(model, cfg, ctx);
        for (long long k = 0; k <= cfg.iterations; ++k) {
            if (want_snapshot(k)) {
                traj.iterations.push_back(k);
                traj.states.push_back(s.x);
                if (cfg.record_trackers && kind == SamplerKind::DigingSgld)
                    traj.trackers.push_back(s.y);
            }
            if (k < cfg.iterations) {
                if (kind == SamplerKind::DigingSgld)
                    diging_sgld_step(s, schedule.at(k), model, cfg, ctx, &noise_hash);
                else
                    de_sgld_step(s, schedule.at(k), model, cfg, ctx, &noise_hash);
            }
        }
    }
    traj.langevin_hash = cfg.langevin_noise ? noise_hash.digest() : 0;
    return traj;
}

// CSV export: trial, iteration, agent, coordinate, value.
inline void trajectory_to_csv(const Trajectory& traj, std::uint64_t trial,
                              std::ostream& out) {
    for (std::size_t s = 0; s < traj.states.size(); ++s)
        for (Eigen::Index a = 0; a < traj.states[s].rows(); ++a)
            for (Eigen::Index c = 0; c < traj.states[s].cols(); ++c)
                out << trial << ',' << traj.iterations[s] << ',' << a << ',' << c << ','
                    << format_double(traj.states[s](a, c)) << '\n';
}

} // namespace dsgld
