// theory.hpp — numerical evaluation of the convergence-bound constants for the
// gradient-tracking Langevin sampler over windowed mixing schedules.
//
// The bound machinery couples four recursion gains (gamma1..gamma4) with six
// forcing terms (omega terms); when the gain product is below one, the coupled
// recursions yield a steady forcing level D and three error envelopes
//   e1(k): centralized reference chain to the target law,
//   e2(k): network average to the reference chain,
//   e3(k): per-agent spread around the network average,
// so e1+e2 bounds the averaged iterate's distance to the target and
// e1+e2+e3 bounds the mean per-agent distance.
//
// A closed-form parameter schedule (lemma_bound_params) proposes a stepsize
// ceiling eta_bar, a weight-decay parameter lambda(eta), and a corner value
// lambda_lower; an accuracy schedule (corollary_schedule) turns a target
// accuracy epsilon into a stepsize eta_star and an iteration count k_star.
// Every formula is evaluated verbatim; validity flags report when a
// precondition (gain product < 1, positive radicands, delta > 0) fails rather
// than silently propagating infinities.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"

#include "dsgld/errors.hpp"
#include "dsgld/metrics.hpp"
#include "dsgld/models.hpp"
#include "dsgld/network.hpp"
#include "dsgld/samplers.hpp"

namespace dsgld {

// Monte-Carlo estimates of the initial-segment statistics the forcing terms
// need: stacked-iterate norm, distance of the initial average to the
// minimizer, and the consensus norms of iterates and trackers over the first
// window. All norms are L2 norms of the stacked agent block, estimated as
// sqrt(mean of squared norms) across trials; standard errors use the delta
// method.
struct InitStats {
    double x0_norm = 0.0;          // E^{1/2} ||x(0)||^2, stacked over agents
    double xbar0_minus_opt = 0.0;  // E^{1/2} ||xbar(0) - x*||^2
    std::vector<double> consensus_x; // t = 0..B-1: E^{1/2} ||x(t) - mean||^2
    std::vector<double> consensus_y;
    double x0_norm_se = 0.0;
    double xbar0_minus_opt_se = 0.0;
    std::vector<double> consensus_x_se;
    std::vector<double> consensus_y_se;
    int trials = 0;
};

struct TheoryInputs {
    double mu = 1.0;
    double lips = 1.0;
    int num_agents = 1;
    int dim = 1;
    double sigma = 0.0;   // gradient-noise second-moment bound
    double delta = 0.5;   // windowed mixing contraction factor
    int window = 1;       // window length B
    double eta = 0.01;
    double lambda_param = 0.9;
    double alpha = 1.0;
    double beta = 1.0;
    InitStats init;

    double kappa() const { return lips / mu; }

    void validate() const {
        auto finite_pos = [](double v, const char* name) {
            if (!std::isfinite(v) || v <= 0.0)
                throw DomainError(std::string(name) + " must be finite and positive");
        };
        finite_pos(mu, "mu");
        finite_pos(lips, "lips");
        finite_pos(eta, "eta");
        finite_pos(alpha, "alpha");
        finite_pos(beta, "beta");
        if (lips < mu) throw DomainError("lips must be >= mu");
        if (num_agents < 1) throw DomainError("num_agents must be >= 1");
        if (dim < 1) throw DomainError("dim must be >= 1");
        if (window < 1) throw DomainError("window must be >= 1");
        if (!(sigma >= 0.0) || !std::isfinite(sigma))
            throw DomainError("sigma must be finite and >= 0");
        if (!(delta >= 0.0) || delta >= 1.0)
            throw DomainError("delta must lie in [0,1)");
        if (!(lambda_param < 1.0))
            throw DomainError("lambda must be < 1");
        const double floor = std::pow(delta, 1.0 / window);
        if (!(lambda_param > floor))
            throw DomainError("lambda must exceed delta^(1/window); got lambda=" +
                              std::to_string(lambda_param) + " floor=" +
                              std::to_string(floor));
        if (static_cast<int>(init.consensus_x.size()) < window ||
            static_cast<int>(init.consensus_y.size()) < window)
            throw DomainError("init stats must cover the first window of iterations");
    }
};

namespace detail {
// (a^k - b^k)/(a - b) with the removable singularity at a = b evaluated as the
// limit k * rho^(k-1).
inline double geometric_difference_ratio(double a, double b, long long k) {
    if (k <= 0) return 0.0;
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    if (std::abs(a - b) <= 1e-12 * scale) {
        const double rho = 0.5 * (a + b);
        return static_cast<double>(k) * std::pow(rho, static_cast<double>(k - 1));
    }
    return (std::pow(a, static_cast<double>(k)) - std::pow(b, static_cast<double>(k))) /
           (a - b);
}
} // namespace detail

struct TheoryReport {
    // Echo of the inputs the envelopes need.
    double mu = 0, lips = 0, eta = 0, sigma = 0, delta = 0, lambda_param = 0;
    int num_agents = 1, dim = 1, window = 1;
    double x0_norm = 0, xbar0_minus_opt = 0;

    // Recursion gains and forcing terms.
    double gamma1 = 0, gamma2 = 0, gamma3 = 0, gamma4 = 0;
    double omega_tilde1 = 0, omega_hat1 = 0;
    double omega_tilde3 = 0, omega_hat3 = 0;
    double omega_tilde4 = 0, omega_hat4 = 0;
    double contraction = 0; // gamma1*gamma2*gamma3*gamma4
    double d_value = 0;     // steady forcing level
    bool d_defined = false; // contraction in (0,1)

    // Feasibility conditions for the bound to apply.
    bool cond_lambda_floor = false; // sqrt(1 - eta*mu*beta/(beta+1)) <= lambda
    bool cond_eta_cap = false;      // eta <= 1/((1+alpha)*lips)
    bool cond_contraction = false;  // contraction in (0,1)
    bool feasible = false;

    // Conditioning diagnostics: the gains blow up as lambda^B approaches delta.
    double lambda_pow_b_minus_delta = 0;
    double one_minus_contraction = 0;
    bool envelopes_defined = false; // delta > 0 required by e2/e3

    // Envelope e1: geometric decay of the reference chain plus its stepsize
    // floor.
    double e1(long long k) const {
        const double n = static_cast<double>(num_agents);
        return std::pow(1.0 - mu * eta, static_cast<double>(k)) *
                   (xbar0_minus_opt + std::sqrt(2.0 * dim / (mu * n))) +
               1.65 * (lips / mu) * std::sqrt(eta * dim / n);
    }

    // Envelope e2: gap between the network average and the reference chain.
    double e2(long long k) const {
        if (!(delta > 0.0)) return std::numeric_limits<double>::infinity();
        const double n = static_cast<double>(num_agents);
        const double half = 1.0 - eta * lips / 2.0;
        const double inv_delta = 1.0 / delta;
        const double d_b1 = std::pow(delta, 1.0 / window);
        const double d_b2 = std::pow(delta, 2.0 / window);
        const double bracket1 = eta / (mu * half) +
                                std::pow(1.0 + eta * lips, 2) / (mu * mu * half * half);
        const double bracket2 =
            3.0 * lips * lips * d_value * d_value * eta * inv_delta * inv_delta /
                (n * (1.0 - d_b1) * (1.0 - d_b1)) +
            6.0 * dim * lips * lips * inv_delta * inv_delta / (1.0 - d_b2);
        const double tail = std::sqrt(eta) * sigma / std::sqrt(mu * half * n);
        const double ratio =
            detail::geometric_difference_ratio(d_b2, 1.0 - eta * mu * half, k);
        const double transient = std::sqrt(std::max(0.0, ratio)) *
                                 (std::sqrt(3.0) * lips * inv_delta / std::sqrt(n)) *
                                 d_b1 * x0_norm;
        return std::sqrt(eta) * std::sqrt(bracket1) * std::sqrt(bracket2) + tail +
               transient;
    }

    // Envelope e3: per-agent spread around the network average.
    double e3(long long k) const {
        if (!(delta > 0.0)) return std::numeric_limits<double>::infinity();
        const double n = static_cast<double>(num_agents);
        const double inv_delta = 1.0 / delta;
        const double d_b1 = std::pow(delta, 1.0 / window);
        const double d_b2 = std::pow(delta, 2.0 / window);
        return std::sqrt(3.0) * inv_delta *
                   std::pow(delta, static_cast<double>(k) / window) * x0_norm /
                   std::sqrt(n) +
               std::sqrt(3.0) * d_value * eta * inv_delta / (std::sqrt(n) * (1.0 - d_b1)) +
               std::sqrt(6.0 * dim * eta) * inv_delta / std::sqrt(1.0 - d_b2);
    }
};

inline TheoryReport evaluate_constants(const TheoryInputs& in) {
    in.validate();
    TheoryReport r;
    r.mu = in.mu;
    r.lips = in.lips;
    r.eta = in.eta;
    r.sigma = in.sigma;
    r.delta = in.delta;
    r.lambda_param = in.lambda_param;
    r.num_agents = in.num_agents;
    r.dim = in.dim;
    r.window = in.window;
    r.x0_norm = in.init.x0_norm;
    r.xbar0_minus_opt = in.init.xbar0_minus_opt;

    const double lam = in.lambda_param;
    const double lam_b = std::pow(lam, static_cast<double>(in.window));
    const double gap = lam_b - in.delta; // positive by validation
    const double n = static_cast<double>(in.num_agents);
    const double root_n = std::sqrt(n);
    const double mix = std::sqrt(in.lips * (1.0 + in.alpha) / (in.mu * in.alpha) + in.beta);

    r.gamma1 = lam * (1.0 - lam_b) / (gap * (1.0 - lam));
    r.gamma2 = in.lips * (1.0 + 1.0 / lam);
    r.gamma3 = 1.0 + (root_n / lam) * mix;
    r.gamma4 = in.eta * (1.0 - lam_b) / (gap * (1.0 - lam));
    r.contraction = r.gamma1 * r.gamma2 * r.gamma3 * r.gamma4;

    const double window_factor = lam_b / gap;
    double sum_y = 0.0, sum_x = 0.0;
    for (int t = 1; t <= in.window; ++t) {
        const double w = std::pow(lam, static_cast<double>(1 - t));
        sum_y += w * in.init.consensus_y[static_cast<std::size_t>(t - 1)];
        sum_x += w * in.init.consensus_x[static_cast<std::size_t>(t - 1)];
    }
    r.omega_tilde1 = window_factor * sum_y;
    r.omega_hat1 = window_factor * 2.0 * in.window * in.sigma * root_n;
    r.omega_tilde3 = 2.0 * root_n * in.init.xbar0_minus_opt;
    r.omega_hat3 =
        (root_n / lam) * mix * (1.0 / in.mu) * (in.sigma + std::sqrt(2.0 * in.dim / in.eta));
    r.omega_tilde4 = window_factor * sum_x;
    r.omega_hat4 = window_factor * in.window * std::sqrt(2.0 * in.eta * n * in.dim);

    const double om1 = r.omega_tilde1 + r.omega_hat1;
    const double om3 = r.omega_tilde3 + r.omega_hat3;
    const double om4 = r.omega_tilde4 + r.omega_hat4;
    const double denom = 1.0 - r.contraction;
    const double num_tracker = r.gamma1 * r.gamma2 * r.gamma3 * om4 +
                               r.gamma1 * r.gamma2 * om3 + om1;
    const double num_gradient = r.gamma3 * r.gamma4 * om1 + r.gamma3 * om4 + om3;
    r.d_value = std::sqrt(2.0 * std::pow(num_tracker / denom, 2) +
                          (4.0 * in.lips * in.lips / n) *
                              std::pow(num_gradient / denom, 2) +
                          4.0 * in.sigma * in.sigma / n);
    r.d_defined = r.contraction > 0.0 && r.contraction < 1.0;

    r.cond_lambda_floor =
        std::sqrt(1.0 - in.eta * in.mu * in.beta / (in.beta + 1.0)) <= lam && lam < 1.0;
    r.cond_eta_cap = in.eta <= 1.0 / ((1.0 + in.alpha) * in.lips);
    r.cond_contraction = r.d_defined;
    r.feasible = r.cond_lambda_floor && r.cond_eta_cap && r.cond_contraction;

    r.lambda_pow_b_minus_delta = gap;
    r.one_minus_contraction = denom;
    r.envelopes_defined = in.delta > 0.0;
    return r;
}

// Closed-form parameter schedule: stepsize ceiling, piecewise weight-decay
// parameter, and its corner value in three algebraically equivalent forms.
struct LemmaParams {
    double mu = 0, lips = 0, kappa = 0;
    int num_agents = 1, window = 1;
    double delta = 0;
    double j1 = 0;
    double eta_bar = 0;   // stepsize ceiling
    double check_eta = 0; // branch switch point of lambda(eta)
    double alpha = 1.0;
    double beta = 0;      // 2 * lips / mu
    double lambda_lower_a = 0, lambda_lower_b = 0, lambda_lower_c = 0;
    // Largest stepsize at which the second branch still stays below one; the
    // schedule's own ceiling eta_bar exceeds it, so lambda(eta) >= 1 on
    // (eta_linear_limit, eta_bar] and the feasibility conditions fail there.
    double eta_linear_limit = 0;

    double lambda_lower() const { return lambda_lower_c; }

    double lambda_of_eta(double eta) const {
        if (!(eta > 0.0) || eta > eta_bar)
            throw DomainError("eta outside (0, eta_bar]");
        if (eta <= check_eta)
            return std::pow(1.0 - eta * mu / 1.5, 1.0 / (2.0 * window));
        return std::pow(std::sqrt(eta * mu * j1 / 1.5) + delta, 1.0 / window);
    }
};

inline LemmaParams lemma_bound_params(double mu, double lips, int num_agents, int window,
                                      double delta) {
    if (!(mu > 0.0) || !(lips >= mu) || num_agents < 1 || window < 1)
        throw DomainError("invalid model constants for parameter schedule");
    if (!(delta >= 0.0) || delta >= 1.0) throw DomainError("delta must lie in [0,1)");
    LemmaParams p;
    p.mu = mu;
    p.lips = lips;
    p.kappa = lips / mu;
    p.num_agents = num_agents;
    p.window = window;
    p.delta = delta;
    const double n = static_cast<double>(num_agents);
    p.j1 = 3.0 * p.kappa * window * window * (1.0 + 4.0 * std::sqrt(n) * std::sqrt(p.kappa));
    p.eta_bar = 3.0 * (1.0 - delta * delta) / (mu * p.j1);
    p.alpha = 1.0;
    p.beta = 2.0 * lips / mu;

    const double root = std::sqrt(p.j1 * p.j1 + (1.0 - delta * delta) * p.j1);
    const double j1p1 = p.j1 + 1.0;
    p.check_eta = 1.5 * std::pow(root - delta * p.j1, 2) / (mu * p.j1 * j1p1 * j1p1);
    p.lambda_lower_a = std::pow(
        1.0 - std::pow(root - delta * p.j1, 2) / (p.j1 * j1p1 * j1p1), 1.0 / (2.0 * window));
    p.lambda_lower_b =
        std::pow(std::sqrt(p.check_eta * mu * p.j1 / 1.5) + delta, 1.0 / window);
    p.lambda_lower_c = std::pow((root + delta) / j1p1, 1.0 / window);
    p.eta_linear_limit = 1.5 * (1.0 - delta) * (1.0 - delta) / (mu * p.j1);
    return p;
}

// D evaluated at the schedule corner (lambda_lower, eta_bar), scaled by
// sqrt(eta_bar). Valid only when the corner's gain product stays below one;
// the returned report carries the flag.
struct SteadyBoundResult {
    TheoryReport corner;
    double dbar = 0.0;
    bool valid = false;
};

inline SteadyBoundResult steady_forcing_bound(const LemmaParams& p, int dim, double sigma,
                                              const InitStats& init) {
    TheoryInputs in;
    in.mu = p.mu;
    in.lips = p.lips;
    in.num_agents = p.num_agents;
    in.dim = dim;
    in.sigma = sigma;
    in.delta = p.delta;
    in.window = p.window;
    in.eta = p.eta_bar;
    in.lambda_param = p.lambda_lower();
    in.alpha = p.alpha;
    in.beta = p.beta;
    in.init = init;
    SteadyBoundResult r;
    r.corner = evaluate_constants(in);
    r.dbar = r.corner.d_value * std::sqrt(p.eta_bar);
    r.valid = r.corner.d_defined;
    return r;
}

// Accuracy schedule: constants, noise-limited stepsize, and iteration count
// for a target accuracy epsilon.
struct CorollarySchedule {
    double cbar1 = 0, cbar2 = 0, cbar3 = 0, cbar4 = 0;
    double eta_noise = 0;
    double eta_star = 0;
    long long k_star = 0;
    double log_factor = 3.0; // 4.0 behind the alternate-constant flag
    bool cbar2_defined = false;
    bool dbar_valid = false;
};

inline CorollarySchedule corollary_schedule(const LemmaParams& p, int dim, double sigma,
                                            const InitStats& init, double epsilon,
                                            bool statement_log_factor = false) {
    if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
    if (!(p.delta > 0.0))
        throw DomainError("accuracy schedule requires delta > 0");
    const SteadyBoundResult sb = steady_forcing_bound(p, dim, sigma, init);
    const double n = static_cast<double>(p.num_agents);
    const double inv_delta = 1.0 / p.delta;
    const double d_b1 = std::pow(p.delta, 1.0 / p.window);
    const double d_b2 = std::pow(p.delta, 2.0 / p.window);

    CorollarySchedule s;
    s.dbar_valid = sb.valid;
    s.cbar1 = init.xbar0_minus_opt + std::sqrt(2.0 * dim / (p.mu * n));
    const double radicand = 1.0 - p.eta_bar * p.mu / 1.5 - d_b2;
    s.cbar2_defined = radicand > 0.0;
    s.cbar2 = s.cbar2_defined
                  ? (1.0 / std::sqrt(radicand)) *
                            (std::sqrt(3.0) * p.lips * inv_delta / std::sqrt(n)) * d_b1 *
                            init.x0_norm +
                        (std::sqrt(3.0) * inv_delta / std::sqrt(n)) * init.x0_norm
                  : std::numeric_limits<double>::infinity();
    const double spread_term =
        std::sqrt(6.0 * dim * p.lips * p.lips * inv_delta * inv_delta / (1.0 - d_b2));
    const double track_term = std::sqrt(3.0 * p.lips * p.lips * inv_delta * inv_delta /
                                        (n * (1.0 - d_b1) * (1.0 - d_b1)));
    s.cbar3 = 1.65 * (p.lips / p.mu) * std::sqrt(static_cast<double>(dim) / n) +
              std::sqrt(6.0 * dim) * inv_delta / std::sqrt(1.0 - d_b2) +
              2.0 * sigma / std::sqrt(3.0 * p.mu * n) + (2.0 / p.mu) * spread_term +
              std::sqrt(3.0) * inv_delta * sb.dbar / (std::sqrt(n) * (1.0 - d_b1)) +
              (2.0 * sb.dbar / p.mu) * track_term;
    s.cbar4 = (2.0 / std::sqrt(3.0 * p.mu)) * spread_term +
              (2.0 / std::sqrt(3.0 * p.mu)) * track_term * sb.dbar;
    s.eta_noise = std::min(epsilon * epsilon / (9.0 * s.cbar3 * s.cbar3),
                           epsilon / (3.0 * s.cbar4));
    s.eta_star = std::min(p.eta_bar, s.eta_noise);
    s.log_factor = statement_log_factor ? 4.0 : 3.0;
    const double k_real = (3.0 / (p.mu * s.eta_star)) *
                          std::log(s.log_factor * (s.cbar1 + s.cbar2) / epsilon);
    constexpr double k_cap = 9.0e18; // stay inside long long range
    s.k_star = static_cast<long long>(std::ceil(std::clamp(k_real, 0.0, k_cap)));
    return s;
}

inline double gibbs_second_moment_bound(double mu, int dim, int num_agents) {
    if (!(mu > 0.0) || dim < 1 || num_agents < 1)
        throw DomainError("gibbs bound requires positive mu, dim, agents");
    return 2.0 * dim / (num_agents * mu);
}

// Runs fresh short trials of the tracking sampler to estimate the
// initial-segment statistics the forcing terms depend on.
inline InitStats estimate_init_stats(const GraphSchedule& schedule, const ModelSpec& model,
                                     const SamplerConfig& cfg, int trials,
                                     std::uint64_t seed = 1234) {
    if (trials < 30) throw DomainError("init-stats estimation needs at least 30 trials");
    const int window = std::max(1, schedule.window);
    InitStats st;
    st.trials = trials;
    std::vector<double> sq_x0(static_cast<std::size_t>(trials));
    std::vector<double> sq_bar(static_cast<std::size_t>(trials));
    std::vector<std::vector<double>> sq_cx(
        static_cast<std::size_t>(window), std::vector<double>(static_cast<std::size_t>(trials)));
    std::vector<std::vector<double>> sq_cy = sq_cx;
    const Eigen::VectorXd opt = model.minimizer;

    for (int t = 0; t < trials; ++t) {
        RunContext ctx{seed, static_cast<std::uint64_t>(t)};
        NetworkState s = init_network_state(model, cfg, ctx);
        sq_x0[static_cast<std::size_t>(t)] = s.x.squaredNorm();
        const Eigen::VectorXd bar = s.x.colwise().mean().transpose();
        sq_bar[static_cast<std::size_t>(t)] = (bar - opt).squaredNorm();
        for (int b = 0; b < window; ++b) {
            const double cx = consensus_error(s.x);
            const double cy = consensus_error(s.y);
            sq_cx[static_cast<std::size_t>(b)][static_cast<std::size_t>(t)] = cx * cx;
            sq_cy[static_cast<std::size_t>(b)][static_cast<std::size_t>(t)] = cy * cy;
            if (b + 1 < window) diging_sgld_step(s, schedule.at(b), model, cfg, ctx);
        }
    }

    auto l2_of = [&](const std::vector<double>& sq, double& value, double& se) {
        double mean = 0.0;
        for (double v : sq) mean += v;
        mean /= static_cast<double>(sq.size());
        double var = 0.0;
        for (double v : sq) var += (v - mean) * (v - mean);
        var /= std::max<std::size_t>(1, sq.size() - 1);
        const double mean_se = std::sqrt(var / static_cast<double>(sq.size()));
        value = std::sqrt(std::max(0.0, mean));
        se = value > 0.0 ? mean_se / (2.0 * value) : std::sqrt(mean_se);
    };

    l2_of(sq_x0, st.x0_norm, st.x0_norm_se);
    l2_of(sq_bar, st.xbar0_minus_opt, st.xbar0_minus_opt_se);
    st.consensus_x.resize(static_cast<std::size_t>(window));
    st.consensus_y.resize(static_cast<std::size_t>(window));
    st.consensus_x_se.resize(static_cast<std::size_t>(window));
    st.consensus_y_se.resize(static_cast<std::size_t>(window));
    for (int b = 0; b < window; ++b) {
        l2_of(sq_cx[static_cast<std::size_t>(b)], st.consensus_x[static_cast<std::size_t>(b)],
              st.consensus_x_se[static_cast<std::size_t>(b)]);
        l2_of(sq_cy[static_cast<std::size_t>(b)], st.consensus_y[static_cast<std::size_t>(b)],
              st.consensus_y_se[static_cast<std::size_t>(b)]);
    }
    return st;
}

inline nlohmann::json theory_report_to_json(const TheoryReport& r) {
    nlohmann::json j;
    j["inputs"] = {{"mu", r.mu},       {"lips", r.lips},   {"eta", r.eta},
                   {"sigma", r.sigma}, {"delta", r.delta}, {"lambda", r.lambda_param},
                   {"num_agents", r.num_agents}, {"dim", r.dim}, {"window", r.window}};
    j["gains"] = {{"gamma1", r.gamma1},
                  {"gamma2", r.gamma2},
                  {"gamma3", r.gamma3},
                  {"gamma4", r.gamma4},
                  {"contraction", r.contraction}};
    j["forcings"] = {{"omega_tilde1", r.omega_tilde1}, {"omega_hat1", r.omega_hat1},
                     {"omega_tilde3", r.omega_tilde3}, {"omega_hat3", r.omega_hat3},
                     {"omega_tilde4", r.omega_tilde4}, {"omega_hat4", r.omega_hat4}};
    j["steady_forcing"] = {{"d", r.d_value}, {"defined", r.d_defined}};
    j["feasibility"] = {{"lambda_floor", r.cond_lambda_floor},
                        {"eta_cap", r.cond_eta_cap},
                        {"contraction", r.cond_contraction},
                        {"feasible", r.feasible}};
    j["conditioning"] = {{"lambda_pow_b_minus_delta", r.lambda_pow_b_minus_delta},
                         {"one_minus_contraction", r.one_minus_contraction},
                         {"envelopes_defined", r.envelopes_defined}};
    nlohmann::json env = nlohmann::json::array();
    for (long long k : {0LL, 10LL, 100LL, 1000LL}) {
        env.push_back({{"k", k}, {"e1", r.e1(k)}, {"e2", r.e2(k)}, {"e3", r.e3(k)}});
    }
    j["envelopes"] = env;
    return j;
}

} // namespace dsgld
