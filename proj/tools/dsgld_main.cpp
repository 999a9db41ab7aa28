// dsgld — command-line front end for the decentralized Langevin sampling
// library. Subcommands:
//   run            execute an experiment described by a JSON config
//   reproduce      run one of the pinned experiment presets
//   tune           grid-search the stepsize for each configured sampler
//   theory-report  evaluate the convergence-bound constants as JSON
// Exit code is 0 only when the run's invariant self-checks pass.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dsgld/dsgld.hpp"

namespace {

dsgld::ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw dsgld::HarnessError("cannot open config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw dsgld::HarnessError("config parse error in " + path + ": " + e.what());
    }
    return dsgld::config_from_json(j);
}

void print_run_summary(const dsgld::RunArtifact& artifact) {
    std::cout << "artifacts written to " << artifact.directory << '\n';
    for (const auto& r : artifact.results)
        std::cout << "  " << dsgld::sampler_name(r.kind) << "  eta=" << r.eta
                  << "  final=" << r.curve.mean.back() << (r.finite ? "" : "  NON-FINITE")
                  << '\n';
    std::cout << "self-checks " << (artifact.self_checks_passed ? "passed" : "FAILED")
              << '\n';
}

int do_run(const std::string& config_path) {
    const auto artifact = dsgld::run_experiment(load_config(config_path));
    print_run_summary(artifact);
    return artifact.self_checks_passed ? 0 : 1;
}

int do_reproduce(const std::string& figure, const std::string& data_path) {
    const auto artifact = dsgld::reproduce(figure, data_path);
    print_run_summary(artifact);
    return artifact.self_checks_passed ? 0 : 1;
}

int do_tune(const std::string& config_path, const std::vector<double>& grid,
            int tune_trials) {
    const auto config = load_config(config_path);
    const auto results = dsgld::tune_stepsize(config, grid, tune_trials);
    for (const auto& res : results) {
        std::cout << dsgld::sampler_name(res.kind) << ": best eta " << res.best_eta
                  << '\n';
        for (const auto& pt : res.points)
            std::cout << "  eta=" << pt.eta << "  final="
                      << (pt.finite ? std::to_string(pt.final_metric) : "diverged")
                      << (pt.theory_feasible ? "" : "  [outside stepsize ceiling]") << '\n';
    }
    return 0;
}

int do_theory_report(const std::string& config_path, double epsilon, bool has_epsilon,
                     int stat_trials) {
    const auto config = load_config(config_path);
    const auto built = dsgld::build_experiment(config);
    const auto diag =
        dsgld::spectral_diagnostics(built.schedule, built.schedule.window);

    const auto lemma =
        dsgld::lemma_bound_params(built.model.mu, built.model.lips,
                                  built.model.num_agents, built.schedule.window,
                                  diag.delta);

    // The closed-form schedule's weight parameter reaches 1 strictly below
    // eta_bar (see eta_linear_limit in the emitted JSON); keep the report's
    // stepsize inside the range where lambda(eta) < 1 so the constants are
    // well defined.
    dsgld::SamplerConfig warm;
    warm.eta = std::min({config.samplers.front().eta, lemma.eta_bar,
                         0.999 * lemma.eta_linear_limit});
    warm.iterations = built.schedule.window;
    warm.gradient_mode = config.gradient_mode;
    warm.batch = config.batch;
    warm.init_scale = config.init_scale;
    const auto init = dsgld::estimate_init_stats(built.schedule, built.model, warm,
                                                 stat_trials, config.base_seed + 1);
    double sigma = 0.0;
    if (config.gradient_mode == dsgld::GradientMode::Minibatch)
        sigma = dsgld::estimate_noise_bound(built.model, config.batch, 2000,
                                            config.base_seed + 2);

    dsgld::TheoryInputs in;
    in.mu = built.model.mu;
    in.lips = built.model.lips;
    in.num_agents = built.model.num_agents;
    in.dim = built.model.dim;
    in.sigma = sigma;
    in.delta = diag.delta;
    in.window = built.schedule.window;
    in.eta = warm.eta;
    in.alpha = lemma.alpha;
    in.beta = lemma.beta;
    in.lambda_param = lemma.lambda_of_eta(warm.eta);
    in.init = init;

    nlohmann::json j = dsgld::theory_report_to_json(dsgld::evaluate_constants(in));
    j["schedule"] = {{"generator", built.schedule.generator},
                     {"delta", diag.delta},
                     {"window", built.schedule.window},
                     {"spectral_gap", diag.gap}};
    j["parameter_schedule"] = {{"j1", lemma.j1},
                               {"eta_bar", lemma.eta_bar},
                               {"check_eta", lemma.check_eta},
                               {"eta_linear_limit", lemma.eta_linear_limit},
                               {"lambda_lower", lemma.lambda_lower()},
                               {"alpha", lemma.alpha},
                               {"beta", lemma.beta}};
    const auto steady = dsgld::steady_forcing_bound(lemma, built.model.dim, sigma, init);
    j["steady_forcing_ceiling"] = {{"dbar", steady.dbar}, {"valid", steady.valid}};
    if (has_epsilon) {
        const auto sched =
            dsgld::corollary_schedule(lemma, built.model.dim, sigma, init, epsilon);
        j["accuracy_schedule"] = {{"epsilon", epsilon},
                                  {"cbar1", sched.cbar1},
                                  {"cbar2", sched.cbar2},
                                  {"cbar3", sched.cbar3},
                                  {"cbar4", sched.cbar4},
                                  {"eta_noise", sched.eta_noise},
                                  {"eta_star", sched.eta_star},
                                  {"k_star", sched.k_star},
                                  {"cbar2_defined", sched.cbar2_defined},
                                  {"dbar_valid", sched.dbar_valid}};
    }
    std::cout << j.dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"decentralized gradient-tracking Langevin sampling toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "execute an experiment from a JSON config");
    run_cmd->add_option("--config", config_path, "experiment config JSON")->required();

    std::string figure;
    std::string data_path;
    auto* rep_cmd = app.add_subcommand("reproduce", "run a pinned experiment preset");
    rep_cmd->add_option("figure", figure, "fig2a|fig2b|fig2c|fig3a|fig3b|fig3c")
        ->required();
    rep_cmd->add_option("--data", data_path, "CSV path for the real-data preset");

    std::string tune_config;
    std::vector<double> grid;
    int tune_trials = 25;
    auto* tune_cmd = app.add_subcommand("tune", "grid-search stepsizes");
    tune_cmd->add_option("--config", tune_config, "experiment config JSON")->required();
    tune_cmd->add_option("--grid", grid, "stepsize grid values")->required();
    tune_cmd->add_option("--trials", tune_trials, "trials per grid point");

    std::string theory_config;
    double epsilon = 0.0;
    int stat_trials = 200;
    auto* theory_cmd =
        app.add_subcommand("theory-report", "evaluate convergence-bound constants");
    theory_cmd->add_option("--config", theory_config, "experiment config JSON")
        ->required();
    auto* eps_opt =
        theory_cmd->add_option("--epsilon", epsilon, "target accuracy for the schedule");
    theory_cmd->add_option("--stat-trials", stat_trials,
                           "trials for initial-statistics estimation");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return do_run(config_path);
        if (rep_cmd->parsed()) return do_reproduce(figure, data_path);
        if (tune_cmd->parsed()) return do_tune(tune_config, grid, tune_trials);
        if (theory_cmd->parsed())
            return do_theory_report(theory_config, epsilon, eps_opt->count() > 0,
                                    stat_trials);
    } catch (const dsgld::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
