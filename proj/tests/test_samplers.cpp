// Sampler update rules: hand-recomputed two-agent step, tracking identity,
// single-agent degeneracy, paired noise streams, noise-off convergence,
// snapshot recording, and stepsize admissibility.
#include "catch2/catch_amalgamated.hpp"
#include "dsgld/dsgld.hpp"

#include <cmath>
#include <cstring>

using namespace dsgld;

namespace {
bool same_bits(double a, double b) {
    std::uint64_t ua, ub;
    std::memcpy(&ua, &a, sizeof ua);
    std::memcpy(&ub, &b, sizeof ub);
    return ua == ub;
}

struct LinregFixture {
    ModelSpec model;
    GraphSchedule schedule;
};

LinregFixture barbell_linreg(int agents, int rows, int dim, std::uint64_t seed,
                             int period = 5) {
    const LinearSynthesis syn = synth_linear(rows, dim, 0.5, 1.0, seed);
    const Partition part = partition(syn.data, agents, seed);
    return {linear_regression_model(syn.data, part, 0.5),
            barbell_schedule(agents, period, seed)};
}
} // namespace

TEST_CASE("two-agent tracking step equals an independent scalar recomputation") {
    // Quadratic toy with centers 1 and 3, uniform averaging matrix, stepsize
    // 0.1, no injected noise, trackers seeded with the exact gradients at the
    // all-zeros start.
    Eigen::MatrixXd centers(2, 1);
    centers << 1.0, 3.0;
    const ModelSpec model = gaussian_toy_model(centers);

    SamplerConfig cfg;
    cfg.eta = 0.1;
    cfg.langevin_noise = false;

    Eigen::MatrixXd w(2, 2);
    w << 0.5, 0.5, 0.5, 0.5;

    NetworkState s;
    s.x = Eigen::MatrixXd::Zero(2, 1);
    s.y.resize(2, 1);
    s.y << -1.0, -3.0;
    s.grad_cache = s.y;
    s.iteration = 0;

    const RunContext ctx{0, 0};
    diging_sgld_step(s, w, model, cfg, ctx);

    // Independent plain-double recomputation of the same update.
    const double eta = 0.1;
    const double x0[2] = {0.0, 0.0};
    const double y0[2] = {-1.0, -3.0};
    double x1[2], g1[2], y1[2];
    for (int i = 0; i < 2; ++i) x1[i] = (0.5 * x0[0] + 0.5 * x0[1]) - eta * y0[i];
    for (int i = 0; i < 2; ++i) g1[i] = x1[i] - centers(i, 0);
    for (int i = 0; i < 2; ++i) y1[i] = (0.5 * y0[0] + 0.5 * y0[1]) + g1[i] - y0[i];

    REQUIRE(same_bits(s.x(0, 0), x1[0]));
    REQUIRE(same_bits(s.x(1, 0), x1[1]));
    REQUIRE(same_bits(s.y(0, 0), y1[0]));
    REQUIRE(same_bits(s.y(1, 0), y1[1]));
    CHECK(s.iteration == 1);

    // Displayed values: x = (0.1, 0.3), y = (-1.9, -1.7) to full precision.
    CHECK(std::abs(s.x(0, 0) - 0.1) <= 1e-15);
    CHECK(std::abs(s.x(1, 0) - 0.3) <= 1e-15);
    CHECK(std::abs(s.y(0, 0) + 1.9) <= 1e-15);
    CHECK(std::abs(s.y(1, 0) + 1.7) <= 1e-15);

    // Tracker mean equals the gradient-sum average after one step.
    const double ybar = 0.5 * (s.y(0, 0) + s.y(1, 0));
    const double gbar = 0.5 * ((s.x(0, 0) - 1.0) + (s.x(1, 0) - 3.0));
    CHECK(std::abs(ybar - gbar) <= 1e-15);
    CHECK(std::abs(ybar + 1.8) <= 1e-15);
}

TEST_CASE("single-agent runs collapse to one ordinary Langevin chain") {
    const GraphSchedule sched = static_complete_schedule(1);

    SECTION("quadratic toy, exact gradients") {
        Eigen::MatrixXd centers(1, 3);
        centers << 0.3, -1.2, 2.0;
        const ModelSpec toy = gaussian_toy_model(centers);
        SamplerConfig sc;
        sc.eta = 0.05;
        sc.iterations = 50;
        sc.thin = 1;
        const RunContext ctx{99, 0};
        const Trajectory a = run(SamplerKind::DigingSgld, sched, toy, sc, ctx);
        const Trajectory b = run(SamplerKind::DeSgld, sched, toy, sc, ctx);
        const Trajectory c = run(SamplerKind::UlaReference, sched, toy, sc, ctx);
        REQUIRE(a.states.size() == b.states.size());
        REQUIRE(a.states.size() == c.states.size());
        for (std::size_t s = 0; s < a.states.size(); ++s) {
            CHECK((a.states[s] - b.states[s]).cwiseAbs().maxCoeff() <= 1e-12);
            CHECK((a.states[s] - c.states[s]).cwiseAbs().maxCoeff() <= 1e-12);
        }
        CHECK(a.langevin_hash == b.langevin_hash);
        CHECK(a.langevin_hash == c.langevin_hash);
    }

    SECTION("regression, minibatch gradients with stochastic tracker init") {
        const LinearSynthesis syn = synth_linear(10, 3, 0.1, 1.0, 2718);
        const Partition part = partition(syn.data, 1, 2718);
        const ModelSpec model = linear_regression_model(syn.data, part, 0.1);
        SamplerConfig sc;
        sc.eta = 0.002;
        sc.iterations = 50;
        sc.thin = 1;
        sc.gradient_mode = GradientMode::Minibatch;
        sc.batch = 2;
        sc.stochastic_y_init = true;
        const RunContext ctx{99, 0};
        const Trajectory a = run(SamplerKind::DigingSgld, sched, model, sc, ctx);
        const Trajectory b = run(SamplerKind::DeSgld, sched, model, sc, ctx);
        for (std::size_t s = 0; s < a.states.size(); ++s)
            CHECK((a.states[s] - b.states[s]).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(a.minibatch_hash == b.minibatch_hash);
        CHECK(a.minibatch_hash != 0);
    }
}

TEST_CASE("tracker mean equals the mean cached gradient estimate throughout") {
    const LinregFixture fx = barbell_linreg(6, 30, 3, 404);

    SECTION("exact gradients") {
        SamplerConfig sc;
        sc.eta = 0.01;
        const RunContext ctx{7, 0};
        NetworkState s = init_network_state(fx.model, sc, ctx);
        for (long long k = 0; k < 120; ++k) {
            diging_sgld_step(s, fx.schedule.at(k), fx.model, sc, ctx);
            const Eigen::VectorXd ybar = s.y.colwise().mean().transpose();
            Eigen::VectorXd gbar = Eigen::VectorXd::Zero(fx.model.dim);
            for (int a = 0; a < fx.model.num_agents; ++a)
                gbar += fx.model.exact_gradient(a, s.x.row(a).transpose());
            gbar /= fx.model.num_agents;
            REQUIRE((ybar - gbar).norm() <= 1e-12 * (1.0 + ybar.norm()));
        }
    }

    SECTION("minibatch gradients track the cached estimates") {
        SamplerConfig sc;
        sc.eta = 0.01;
        sc.gradient_mode = GradientMode::Minibatch;
        sc.batch = 1;
        const RunContext ctx{8, 0};
        NetworkState s = init_network_state(fx.model, sc, ctx);
        for (long long k = 0; k < 120; ++k) {
            diging_sgld_step(s, fx.schedule.at(k), fx.model, sc, ctx);
            const Eigen::VectorXd ybar = s.y.colwise().mean().transpose();
            const Eigen::VectorXd cbar = s.grad_cache.colwise().mean().transpose();
            REQUIRE((ybar - cbar).norm() <= 1e-12 * (1.0 + ybar.norm()));
        }
    }
}

TEST_CASE("samplers on one trial share noise and minibatch streams") {
    const LinregFixture fx = barbell_linreg(4, 20, 2, 512);
    SamplerConfig sc;
    sc.eta = 0.005;
    sc.iterations = 40;
    sc.gradient_mode = GradientMode::Minibatch;
    sc.batch = 2;
    const RunContext ctx{31, 4};
    const Trajectory a = run(SamplerKind::DigingSgld, fx.schedule, fx.model, sc, ctx);
    const Trajectory b = run(SamplerKind::DeSgld, fx.schedule, fx.model, sc, ctx);
    const Trajectory c = run(SamplerKind::UlaReference, fx.schedule, fx.model, sc, ctx);
    CHECK(a.langevin_hash == b.langevin_hash);
    CHECK(a.langevin_hash == c.langevin_hash);
    CHECK(a.langevin_hash != 0);
    CHECK(a.minibatch_hash == b.minibatch_hash);
    CHECK(a.minibatch_hash != 0);

    // A different trial draws a different noise universe.
    const Trajectory d = run(SamplerKind::DigingSgld, fx.schedule, fx.model, sc,
                             RunContext{31, 5});
    CHECK(d.langevin_hash != a.langevin_hash);

    // Exact mode consumes no minibatch stream.
    SamplerConfig exact = sc;
    exact.gradient_mode = GradientMode::Exact;
    const Trajectory e = run(SamplerKind::DigingSgld, fx.schedule, fx.model, exact, ctx);
    CHECK(e.minibatch_hash == 0);

    // Noise off reports a zero noise hash.
    SamplerConfig quiet = exact;
    quiet.langevin_noise = false;
    const Trajectory f = run(SamplerKind::DigingSgld, fx.schedule, fx.model, quiet, ctx);
    CHECK(f.langevin_hash == 0);
}

TEST_CASE("noise-off tracking converges on time-varying graphs where plain gossip stalls") {
    const LinregFixture fx = barbell_linreg(4, 20, 2, 606);
    SamplerConfig sc;
    sc.eta = 0.2 / fx.model.lips;
    // Enough iterations for the linear rate (1 - eta * mu) to push the
    // tracking iterates far below the acceptance threshold.
    sc.iterations = static_cast<long long>(std::ceil(30.0 / (sc.eta * fx.model.mu)));
    sc.thin = sc.iterations;
    sc.langevin_noise = false;
    const RunContext ctx{1, 0};

    auto final_residual = [&](SamplerKind kind) {
        const Trajectory t = run(kind, fx.schedule, fx.model, sc, ctx);
        double worst = 0.0;
        for (int a = 0; a < fx.model.num_agents; ++a)
            worst = std::max(worst, (t.states.back().row(a).transpose() -
                                     fx.model.minimizer)
                                        .norm());
        return worst;
    };

    const double tracking = final_residual(SamplerKind::DigingSgld);
    const double plain = final_residual(SamplerKind::DeSgld);
    CHECK(tracking <= 1e-8);
    // Plain gossip's fixed point is biased by gradient heterogeneity.
    CHECK(plain >= 10.0 * std::max(tracking, 1e-12));
}

TEST_CASE("zero stepsize with noise off reduces to averaging consensus") {
    Eigen::MatrixXd centers(4, 2);
    centers << 1, 0, -1, 2, 3, 1, 0, -2;
    const ModelSpec toy = gaussian_toy_model(centers);
    const GraphSchedule sched = barbell_schedule(4, 5, 13);
    SamplerConfig sc;
    sc.eta = 0.0;
    sc.langevin_noise = false;
    const RunContext ctx{3, 0};
    NetworkState s = init_network_state(toy, sc, ctx);
    const Eigen::RowVectorXd mean0 = s.x.colwise().mean();
    for (long long k = 0; k < 200; ++k) de_sgld_step(s, sched.at(k), toy, sc, ctx);
    // Doubly stochastic mixing preserves the average and contracts the spread.
    CHECK((s.x.colwise().mean() - mean0).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(consensus_error(s.x) <= 1e-10);
}

TEST_CASE("snapshot recorder honors thinning and always keeps the endpoints") {
    Eigen::MatrixXd centers(2, 1);
    centers << 0.0, 1.0;
    const ModelSpec toy = gaussian_toy_model(centers);
    const GraphSchedule sched = static_complete_schedule(2);
    SamplerConfig sc;
    sc.eta = 0.01;
    sc.iterations = 10;
    sc.thin = 4;
    sc.record_trackers = true;
    const Trajectory t = run(SamplerKind::DigingSgld, sched, toy, sc, RunContext{2, 0});
    CHECK(t.iterations == std::vector<long long>{0, 4, 8, 10});
    CHECK(t.states.size() == 4);
    CHECK(t.trackers.size() == 4); // trackers recorded alongside the states
    CHECK(t.total_iterations == 10);
    REQUIRE(t.states.front().rows() == 2);

    SamplerConfig dense = sc;
    dense.thin = 1;
    dense.record_trackers = false;
    const Trajectory u = run(SamplerKind::DeSgld, sched, toy, dense, RunContext{2, 0});
    CHECK(u.states.size() == 11);
    CHECK(u.trackers.empty());

    const Trajectory v = run(SamplerKind::UlaReference, sched, toy, dense, RunContext{2, 0});
    REQUIRE(v.states.front().rows() == 1); // reference chain is a single iterate
}

TEST_CASE("reference chain rejects inadmissible stepsizes") {
    Eigen::MatrixXd centers(3, 1);
    centers << 0.0, 1.0, 2.0;
    const ModelSpec toy = gaussian_toy_model(centers);
    const GraphSchedule sched = static_complete_schedule(3);
    const double cap = ula_max_stepsize(toy);
    CHECK(cap == 3.0); // 2N/(mu + lips) with mu = lips = 1

    SamplerConfig sc;
    sc.iterations = 3;
    sc.eta = cap * (1.0 + 1e-9);
    CHECK_THROWS_AS(run(SamplerKind::UlaReference, sched, toy, sc, RunContext{0, 0}),
                    StateError);
    sc.eta = cap;
    CHECK_NOTHROW(run(SamplerKind::UlaReference, sched, toy, sc, RunContext{0, 0}));
    // The decentralized samplers are not subject to the reference-chain cap.
    CHECK_NOTHROW(run(SamplerKind::DigingSgld, sched, toy, sc, RunContext{0, 0}));
}

TEST_CASE("sampler configuration and shape validation") {
    const LinregFixture fx = barbell_linreg(4, 20, 2, 777);
    SamplerConfig sc;

    sc.eta = -0.1;
    CHECK_THROWS_AS(sc.validate(fx.model), StateError);
    sc.eta = 0.01;
    sc.iterations = -1;
    CHECK_THROWS_AS(sc.validate(fx.model), StateError);
    sc.iterations = 10;
    sc.thin = 0;
    CHECK_THROWS_AS(sc.validate(fx.model), StateError);
    sc.thin = 1;
    sc.gradient_mode = GradientMode::Minibatch;
    sc.batch = 0;
    CHECK_THROWS_AS(sc.validate(fx.model), StateError);
    sc.batch = fx.model.local_count() + 1;
    CHECK_THROWS_AS(sc.validate(fx.model), StateError);
    sc.batch = 1;
    CHECK_NOTHROW(sc.validate(fx.model));

    // Schedule and model must agree on the agent count.
    const GraphSchedule wrong = barbell_schedule(6, 3, 0);
    CHECK_THROWS_AS(run(SamplerKind::DigingSgld, wrong, fx.model, sc, RunContext{0, 0}),
                    StateError);

    // Step functions validate the state block shape.
    NetworkState bad;
    bad.x = Eigen::MatrixXd::Zero(3, 2);
    bad.y = bad.x;
    bad.grad_cache = bad.x;
    SamplerConfig plain;
    CHECK_THROWS_AS(diging_sgld_step(bad, fx.schedule.at(0), fx.model, plain,
                                     RunContext{0, 0}),
                    StateError);
    CHECK_THROWS_AS(ula_reference_step(Eigen::VectorXd::Zero(5), fx.model, 0.01,
                                       RunContext{0, 0}, 0),
                    StateError);
}

TEST_CASE("tracker initialization uses exact gradients unless told otherwise") {
    const LinregFixture fx = barbell_linreg(4, 20, 2, 888);
    SamplerConfig sc;
    sc.gradient_mode = GradientMode::Minibatch;
    sc.batch = 1;
    const RunContext ctx{17, 2};

    NetworkState plain = init_network_state(fx.model, sc, ctx);
    for (int a = 0; a < fx.model.num_agents; ++a) {
        const Eigen::VectorXd g = fx.model.exact_gradient(a, plain.x.row(a).transpose());
        REQUIRE((plain.y.row(a).transpose() - g).norm() == 0.0);
    }
    CHECK((plain.y - plain.grad_cache).cwiseAbs().maxCoeff() == 0.0);

    SamplerConfig noisy = sc;
    noisy.stochastic_y_init = true;
    NetworkState stoch = init_network_state(fx.model, noisy, ctx);
    CHECK((stoch.x - plain.x).cwiseAbs().maxCoeff() == 0.0); // same iterate draw
    CHECK((stoch.y - plain.y).cwiseAbs().maxCoeff() > 0.0);  // different tracker seed
}
