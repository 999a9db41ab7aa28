// harness.hpp — experiment orchestration: JSON configuration, multi-trial
// parallel execution with deterministic accumulation, metric CSV/JSON/SVG
// artifacts, a stepsize grid tuner, and pinned reproduction presets.
//
// Determinism contract: every random draw is keyed by (base_seed, trial, ...)
// so trial results are independent of scheduling. Trials are accumulated in
// fixed-size chunks merged in chunk order, which makes the emitted artifacts
// byte-identical across reruns and across worker-thread counts.
#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "dsgld/data.hpp"
#include "dsgld/errors.hpp"
#include "dsgld/metrics.hpp"
#include "dsgld/models.hpp"
#include "dsgld/network.hpp"
#include "dsgld/samplers.hpp"
#include "dsgld/svg.hpp"
#include "dsgld/theory.hpp"

namespace dsgld {

// ---------------------------------------------------------------------------
// Configuration

struct GraphSpec {
    std::string kind = "barbell"; // barbell | lollipop | complete
    int num_agents = 20;
    int period = 50; // distinct schedule entries before the pattern repeats
    int branch_lo = 3, branch_hi = 4, attach = 3; // lollipop shape parameters
    std::uint64_t seed = 7;
    double eps_hat = 1e-6;

    GraphSchedule build() const {
        if (kind == "barbell") return barbell_schedule(num_agents, period, seed, eps_hat);
        if (kind == "lollipop")
            return lollipop_schedule(num_agents, {branch_lo, branch_hi}, attach, period,
                                     seed, eps_hat);
        if (kind == "complete") return static_complete_schedule(num_agents, eps_hat);
        throw HarnessError("unknown graph kind '" + kind + "'");
    }
};

struct DataSpec {
    std::string kind = "linreg"; // linreg | logreg_synth | logreg_csv
    int total = 100;             // rows generated (linreg) or pooled (logreg_synth)
    int dim = 5;                 // raw feature dimension (intercept appended)
    double lambda_reg = 0.1;
    double noise_var = 1.0;    // linreg response noise
    double train_ratio = 0.7;  // logreg_synth split
    std::uint64_t seed = 2024;
    std::string csv_path;          // logreg_csv source table
    double csv_train_ratio = 0.1;  // logreg_csv split
    int csv_target_train = 30;     // logreg_csv balanced train size
};

struct SamplerSetting {
    SamplerKind kind = SamplerKind::DigingSgld;
    double eta = 0.01;
};

struct ExperimentConfig {
    std::string name = "experiment";
    GraphSpec graph;
    DataSpec data;
    std::vector<SamplerSetting> samplers = {{SamplerKind::DigingSgld, 0.01},
                                            {SamplerKind::DeSgld, 0.01}};
    long long iterations = 100;
    int trials = 200;
    std::uint64_t base_seed = 42;
    GradientMode gradient_mode = GradientMode::Exact;
    int batch = 1;
    bool stochastic_y_init = false;
    long long thin = 1;
    double init_scale = 1.0;
    int threads = 0; // 0 = hardware concurrency
    std::string output_dir = "out";
    bool emit_svg = true;

    bool is_accuracy_experiment() const {
        return data.kind == "logreg_synth" || data.kind == "logreg_csv";
    }

    void validate() const {
        if (samplers.empty()) throw HarnessError("no samplers configured");
        for (const auto& s : samplers)
            if (!(s.eta > 0.0)) throw HarnessError("per-sampler eta must be positive");
        if (iterations < 1) throw HarnessError("iterations must be >= 1");
        if (trials < 1) throw HarnessError("trials must be >= 1");
        if (thin < 1) throw HarnessError("thin must be >= 1");
        if (data.kind != "linreg" && data.kind != "logreg_synth" &&
            data.kind != "logreg_csv")
            throw HarnessError("unknown data kind '" + data.kind + "'");
    }
};

inline SamplerKind sampler_from_name(const std::string& name) {
    if (name == "diging_sgld" || name == "diging") return SamplerKind::DigingSgld;
    if (name == "de_sgld") return SamplerKind::DeSgld;
    if (name == "ula_reference" || name == "ula") return SamplerKind::UlaReference;
    throw HarnessError("unknown sampler '" + name + "'");
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["name"] = c.name;
    j["graph"] = {{"kind", c.graph.kind},       {"num_agents", c.graph.num_agents},
                  {"period", c.graph.period},   {"branch_lo", c.graph.branch_lo},
                  {"branch_hi", c.graph.branch_hi}, {"attach", c.graph.attach},
                  {"seed", c.graph.seed},       {"eps_hat", c.graph.eps_hat}};
    j["data"] = {{"kind", c.data.kind},
                 {"total", c.data.total},
                 {"dim", c.data.dim},
                 {"lambda_reg", c.data.lambda_reg},
                 {"noise_var", c.data.noise_var},
                 {"train_ratio", c.data.train_ratio},
                 {"seed", c.data.seed},
                 {"csv_path", c.data.csv_path},
                 {"csv_train_ratio", c.data.csv_train_ratio},
                 {"csv_target_train", c.data.csv_target_train}};
    nlohmann::json samplers = nlohmann::json::array();
    for (const auto& s : c.samplers)
        samplers.push_back({{"kind", sampler_name(s.kind)}, {"eta", s.eta}});
    j["samplers"] = samplers;
    j["iterations"] = c.iterations;
    j["trials"] = c.trials;
    j["base_seed"] = c.base_seed;
    j["gradient_mode"] = c.gradient_mode == GradientMode::Exact ? "exact" : "minibatch";
    j["batch"] = c.batch;
    j["stochastic_y_init"] = c.stochastic_y_init;
    j["thin"] = c.thin;
    j["init_scale"] = c.init_scale;
    j["threads"] = c.threads;
    j["output_dir"] = c.output_dir;
    j["emit_svg"] = c.emit_svg;
    return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    try {
        c.name = j.value("name", c.name);
        if (j.contains("graph")) {
            const auto& g = j.at("graph");
            c.graph.kind = g.value("kind", c.graph.kind);
            c.graph.num_agents = g.value("num_agents", c.graph.num_agents);
            c.graph.period = g.value("period", c.graph.period);
            c.graph.branch_lo = g.value("branch_lo", c.graph.branch_lo);
            c.graph.branch_hi = g.value("branch_hi", c.graph.branch_hi);
            c.graph.attach = g.value("attach", c.graph.attach);
            c.graph.seed = g.value("seed", c.graph.seed);
            c.graph.eps_hat = g.value("eps_hat", c.graph.eps_hat);
        }
        if (j.contains("data")) {
            const auto& d = j.at("data");
            c.data.kind = d.value("kind", c.data.kind);
            c.data.total = d.value("total", c.data.total);
            c.data.dim = d.value("dim", c.data.dim);
            c.data.lambda_reg = d.value("lambda_reg", c.data.lambda_reg);
            c.data.noise_var = d.value("noise_var", c.data.noise_var);
            c.data.train_ratio = d.value("train_ratio", c.data.train_ratio);
            c.data.seed = d.value("seed", c.data.seed);
            c.data.csv_path = d.value("csv_path", c.data.csv_path);
            c.data.csv_train_ratio = d.value("csv_train_ratio", c.data.csv_train_ratio);
            c.data.csv_target_train = d.value("csv_target_train", c.data.csv_target_train);
        }
        if (j.contains("samplers")) {
            c.samplers.clear();
            for (const auto& s : j.at("samplers"))
                c.samplers.push_back(
                    {sampler_from_name(s.at("kind").get<std::string>()),
                     s.at("eta").get<double>()});
        }
        c.iterations = j.value("iterations", c.iterations);
        c.trials = j.value("trials", c.trials);
        c.base_seed = j.value("base_seed", c.base_seed);
        const std::string gm = j.value("gradient_mode", std::string("exact"));
        if (gm == "exact")
            c.gradient_mode = GradientMode::Exact;
        else if (gm == "minibatch")
            c.gradient_mode = GradientMode::Minibatch;
        else
            throw HarnessError("unknown gradient_mode '" + gm + "'");
        c.batch = j.value("batch", c.batch);
        c.stochastic_y_init = j.value("stochastic_y_init", c.stochastic_y_init);
        c.thin = j.value("thin", c.thin);
        c.init_scale = j.value("init_scale", c.init_scale);
        c.threads = j.value("threads", c.threads);
        c.output_dir = j.value("output_dir", c.output_dir);
        c.emit_svg = j.value("emit_svg", c.emit_svg);
    } catch (const nlohmann::json::exception& e) {
        throw HarnessError(std::string("bad configuration: ") + e.what());
    }
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// Experiment assembly

struct BuiltExperiment {
    GraphSchedule schedule;
    ModelSpec model;
    Dataset test; // held-out rows for accuracy experiments
};

inline BuiltExperiment build_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    BuiltExperiment b;
    b.schedule = cfg.graph.build();
    if (cfg.data.kind == "linreg") {
        const LinearSynthesis syn = synth_linear(cfg.data.total, cfg.data.dim,
                                                 cfg.data.lambda_reg, cfg.data.noise_var,
                                                 cfg.data.seed);
        const Partition part = partition(syn.data, cfg.graph.num_agents, cfg.data.seed);
        b.model = linear_regression_model(syn.data, part, cfg.data.lambda_reg);
    } else if (cfg.data.kind == "logreg_synth") {
        const LogisticSynthesis syn =
            synth_logistic(cfg.data.total, cfg.data.dim, cfg.data.lambda_reg,
                           cfg.data.train_ratio, cfg.data.seed);
        const Partition part = partition(syn.train, cfg.graph.num_agents, cfg.data.seed);
        b.model = logistic_regression_model(syn.train, part, cfg.data.lambda_reg);
        b.test = syn.test;
    } else {
        if (cfg.data.csv_path.empty())
            throw DataError("csv experiments need a dataset path");
        const CsvSplit split = load_real_csv(cfg.data.csv_path, cfg.data.csv_train_ratio,
                                             cfg.data.csv_target_train, cfg.data.seed);
        const Partition part = partition(split.train, cfg.graph.num_agents, cfg.data.seed);
        b.model = logistic_regression_model(split.train, part, cfg.data.lambda_reg);
        b.test = split.test;
    }
    return b;
}

// ---------------------------------------------------------------------------
// Per-sampler metric computation

struct MetricCurve {
    std::vector<long long> iterations;
    std::vector<double> mean;    // cross-agent mean per snapshot
    std::vector<double> std_dev; // cross-agent sample std per snapshot
    Eigen::MatrixXd per_agent;   // snapshots x agents
};

struct SamplerRunResult {
    SamplerKind kind = SamplerKind::DigingSgld;
    double eta = 0.0;
    MetricCurve curve;
    std::uint64_t langevin_hash = 0;  // trial hashes folded in trial order
    std::uint64_t minibatch_hash = 0;
    bool finite = true;
};

namespace detail {
inline SamplerConfig sampler_config_of(const ExperimentConfig& cfg, double eta) {
    SamplerConfig sc;
    sc.eta = eta;
    sc.iterations = cfg.iterations;
    sc.gradient_mode = cfg.gradient_mode;
    sc.batch = cfg.batch;
    sc.stochastic_y_init = cfg.stochastic_y_init;
    sc.thin = cfg.thin;
    sc.init_scale = cfg.init_scale;
    return sc;
}

// Fixed chunking, independent of the worker-thread count, so merged results
// never depend on scheduling.
inline std::vector<std::pair<int, int>> trial_chunks(int trials) {
    const int chunks = std::min(trials, 16);
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<std::size_t>(chunks));
    for (int c = 0; c < chunks; ++c) {
        const int lo = static_cast<int>(static_cast<long long>(trials) * c / chunks);
        const int hi = static_cast<int>(static_cast<long long>(trials) * (c + 1) / chunks);
        if (hi > lo) out.emplace_back(lo, hi);
    }
    return out;
}

template <typename Fn>
inline void parallel_chunks(const std::vector<std::pair<int, int>>& chunks, int threads,
                            Fn&& body) {
    int hw = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    hw = std::min<int>(hw, static_cast<int>(chunks.size()));
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(chunks.size());
    auto worker = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= chunks.size()) return;
            try {
                body(c, chunks[c].first, chunks[c].second);
            } catch (...) {
                errors[c] = std::current_exception();
            }
        }
    };
    if (hw == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(hw));
        for (int t = 0; t < hw; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (std::size_t c = 0; c < errors.size(); ++c)
        if (errors[c]) {
            try {
                std::rethrow_exception(errors[c]);
            } catch (const std::exception& e) {
                throw HarnessError("trials " + std::to_string(chunks[c].first) + ".." +
                                   std::to_string(chunks[c].second - 1) + " failed: " +
                                   e.what());
            }
        }
}

inline std::uint64_t fold_hashes(const std::vector<std::uint64_t>& hs) {
    StreamHash h;
    for (std::uint64_t v : hs) h.update(v);
    return h.digest();
}
} // namespace detail

// Runs all trials of one sampler and reduces them to the experiment's metric
// curve (posterior W2 for regression, held-out accuracy for classification).
inline SamplerRunResult compute_sampler_metrics(const BuiltExperiment& built,
                                                const ExperimentConfig& cfg,
                                                const SamplerSetting& setting) {
    const SamplerConfig sc = detail::sampler_config_of(cfg, setting.eta);
    sc.validate(built.model);
    const auto chunks = detail::trial_chunks(cfg.trials);

    // Snapshot axis comes from a dry schedule of the recorder.
    std::vector<long long> slots;
    for (long long k = 0; k <= cfg.iterations; ++k)
        if (k == 0 || k == cfg.iterations || k % cfg.thin == 0) slots.push_back(k);
    const int agent_rows =
        setting.kind == SamplerKind::UlaReference ? 1 : built.model.num_agents;

    SamplerRunResult out;
    out.kind = setting.kind;
    out.eta = setting.eta;
    std::vector<std::uint64_t> noise_hashes(static_cast<std::size_t>(cfg.trials));
    std::vector<std::uint64_t> batch_hashes(static_cast<std::size_t>(cfg.trials));

    const bool accuracy_mode = cfg.is_accuracy_experiment();
    std::vector<TrialEnsemble> moment_chunks;
    std::vector<Eigen::MatrixXd> accuracy_chunks; // per chunk: slots x agents sums
    if (accuracy_mode)
        accuracy_chunks.assign(chunks.size(),
                               Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(slots.size()),
                                                     agent_rows));
    else
        moment_chunks.assign(chunks.size(),
                             TrialEnsemble(slots, agent_rows, built.model.dim));

    auto body = [&](std::size_t chunk, int lo, int hi) {
        try {
            for (int t = lo; t < hi; ++t) {
                const RunContext ctx{cfg.base_seed, static_cast<std::uint64_t>(t)};
                const Trajectory traj =
                    run(setting.kind, built.schedule, built.model, sc, ctx);
                noise_hashes[static_cast<std::size_t>(t)] = traj.langevin_hash;
                batch_hashes[static_cast<std::size_t>(t)] = traj.minibatch_hash;
                for (std::size_t s = 0; s < traj.states.size(); ++s) {
                    for (int a = 0; a < agent_rows; ++a) {
                        if (accuracy_mode) {
                            accuracy_chunks[chunk](static_cast<Eigen::Index>(s), a) +=
                                accuracy(traj.states[s].row(a).transpose(), built.test);
                        } else {
                            moment_chunks[chunk].add(static_cast<int>(s), a,
                                                     traj.states[s].row(a).transpose());
                        }
                    }
                }
            }
        } catch (const Error& e) {
            throw HarnessError(sampler_name(setting.kind) + ": " + e.what());
        }
    };
    detail::parallel_chunks(chunks, cfg.threads, body);

    out.langevin_hash = detail::fold_hashes(noise_hashes);
    out.minibatch_hash = detail::fold_hashes(batch_hashes);

    MetricCurve& curve = out.curve;
    curve.iterations = slots;
    curve.per_agent.resize(static_cast<Eigen::Index>(slots.size()), agent_rows);
    if (accuracy_mode) {
        Eigen::MatrixXd total = accuracy_chunks.front();
        for (std::size_t c = 1; c < accuracy_chunks.size(); ++c)
            total += accuracy_chunks[c];
        curve.per_agent = total / static_cast<double>(cfg.trials);
    } else {
        TrialEnsemble merged = std::move(moment_chunks.front());
        for (std::size_t c = 1; c < moment_chunks.size(); ++c)
            merged.merge(moment_chunks[c]);
        if (!built.model.has_posterior())
            throw HarnessError("moment experiment needs a closed-form target");
        const W2Curve w2 = w2_to_posterior_curve(merged, built.model.posterior);
        curve.per_agent = w2.values;
    }
    curve.mean.resize(slots.size());
    curve.std_dev.resize(slots.size());
    for (std::size_t s = 0; s < slots.size(); ++s) {
        const auto row = curve.per_agent.row(static_cast<Eigen::Index>(s));
        const double m = row.mean();
        curve.mean[s] = m;
        curve.std_dev[s] =
            agent_rows > 1
                ? std::sqrt((row.array() - m).square().sum() / (agent_rows - 1))
                : 0.0;
        if (!std::isfinite(m)) out.finite = false;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Artifacts

struct RunArtifact {
    std::string directory;
    nlohmann::json provenance;
    std::vector<SamplerRunResult> results;
    bool self_checks_passed = false;
};

namespace detail {
inline std::filesystem::path resolve_output_dir(const std::string& dir) {
    std::filesystem::path p(dir);
    if (p.is_relative()) {
        if (const char* root = std::getenv("DSGLD_OUT_ROOT")) p = std::filesystem::path(root) / p;
    }
    return p;
}

inline void write_metric_csvs(const std::filesystem::path& dir,
                              const SamplerRunResult& r) {
    {
        std::ofstream out(dir / ("metrics_" + sampler_name(r.kind) + ".csv"));
        if (!out) throw HarnessError("cannot write metric csv");
        out << "iteration,mean,std\n";
        for (std::size_t s = 0; s < r.curve.iterations.size(); ++s)
            out << r.curve.iterations[s] << ',' << format_double(r.curve.mean[s]) << ','
                << format_double(r.curve.std_dev[s]) << '\n';
    }
    {
        std::ofstream out(dir / ("agents_" + sampler_name(r.kind) + ".csv"));
        if (!out) throw HarnessError("cannot write per-agent csv");
        out << "iteration,agent,value\n";
        for (std::size_t s = 0; s < r.curve.iterations.size(); ++s)
            for (Eigen::Index a = 0; a < r.curve.per_agent.cols(); ++a)
                out << r.curve.iterations[s] << ',' << a << ','
                    << format_double(r.curve.per_agent(static_cast<Eigen::Index>(s), a))
                    << '\n';
    }
}
} // namespace detail

inline RunArtifact run_experiment(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    cfg.validate();
    const BuiltExperiment built = build_experiment(cfg);

    RunArtifact artifact;
    for (const auto& setting : cfg.samplers)
        artifact.results.push_back(compute_sampler_metrics(built, cfg, setting));

    // Self-checks: finite curves; paired streams across samplers; single-trial
    // determinism probe.
    bool finite_ok = true;
    for (const auto& r : artifact.results) finite_ok = finite_ok && r.finite;
    bool paired_ok = true;
    for (std::size_t i = 1; i < artifact.results.size(); ++i) {
        paired_ok = paired_ok &&
                    artifact.results[i].langevin_hash == artifact.results[0].langevin_hash;
        paired_ok = paired_ok && artifact.results[i].minibatch_hash ==
                                     artifact.results[0].minibatch_hash;
    }
    bool determinism_ok = true;
    {
        // Re-run the first trial twice and require identical noise hashes.
        const auto& setting = cfg.samplers.front();
        const SamplerConfig sc = detail::sampler_config_of(cfg, setting.eta);
        const auto once =
            run(setting.kind, built.schedule, built.model, sc, RunContext{cfg.base_seed, 0});
        const auto again =
            run(setting.kind, built.schedule, built.model, sc, RunContext{cfg.base_seed, 0});
        determinism_ok = once.langevin_hash == again.langevin_hash &&
                         once.minibatch_hash == again.minibatch_hash;
    }
    artifact.self_checks_passed = finite_ok && paired_ok && determinism_ok;

    const std::filesystem::path dir = detail::resolve_output_dir(cfg.output_dir);
    std::filesystem::create_directories(dir);
    artifact.directory = dir.string();
    for (const auto& r : artifact.results) detail::write_metric_csvs(dir, r);

    if (cfg.emit_svg) {
        std::filesystem::create_directories(dir / "plots");
        std::vector<PlotSeries> series;
        for (const auto& r : artifact.results) {
            PlotSeries s;
            s.label = sampler_name(r.kind);
            for (std::size_t i = 0; i < r.curve.iterations.size(); ++i) {
                s.x.push_back(static_cast<double>(r.curve.iterations[i]));
                s.y.push_back(r.curve.mean[i]);
                s.band.push_back(r.curve.std_dev[i]);
            }
            series.push_back(std::move(s));
        }
        const bool acc = cfg.is_accuracy_experiment();
        write_line_plot((dir / "plots" / (acc ? "accuracy.svg" : "w2.svg")).string(),
                        cfg.name, "iteration",
                        acc ? "test accuracy" : "posterior W2 distance", series, !acc);
    }

    nlohmann::json prov;
    prov["config"] = config_to_json(cfg);
    prov["schedule_hash"] = built.schedule.content_hash();
    prov["model"] = {{"dim", built.model.dim},
                     {"num_agents", built.model.num_agents},
                     {"mu", built.model.mu},
                     {"lips", built.model.lips}};
    nlohmann::json per_sampler = nlohmann::json::array();
    for (const auto& r : artifact.results)
        per_sampler.push_back({{"sampler", sampler_name(r.kind)},
                               {"eta", r.eta},
                               {"langevin_hash", r.langevin_hash},
                               {"minibatch_hash", r.minibatch_hash},
                               {"final_mean", r.curve.mean.back()},
                               {"finite", r.finite}});
    prov["results"] = per_sampler;
    prov["self_checks"] = {{"finite", finite_ok},
                           {"paired_streams", paired_ok},
                           {"determinism_probe", determinism_ok}};
    prov["runtime_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    prov["library"] = {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                     std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                     std::to_string(EIGEN_MINOR_VERSION)}};
    artifact.provenance = prov;
    std::ofstream pf(dir / "provenance.json");
    if (!pf) throw HarnessError("cannot write provenance.json");
    pf << prov.dump(2) << '\n';
    return artifact;
}

// ---------------------------------------------------------------------------
// Stepsize tuner

struct TunePoint {
    double eta = 0.0;
    double final_metric = 0.0;
    bool finite = false;
    bool theory_feasible = false; // eta within the closed-form stepsize ceiling
};

struct TuneResult {
    SamplerKind kind = SamplerKind::DigingSgld;
    double best_eta = 0.0;
    std::vector<TunePoint> points;
};

inline std::vector<TuneResult> tune_stepsize(const ExperimentConfig& base,
                                             const std::vector<double>& grid,
                                             int tune_trials = 0) {
    if (grid.empty()) throw HarnessError("empty stepsize grid");
    ExperimentConfig cfg = base;
    if (tune_trials > 0) cfg.trials = tune_trials;
    cfg.emit_svg = false;
    const BuiltExperiment built = build_experiment(cfg);
    const bool maximize = cfg.is_accuracy_experiment();

    double eta_bar = std::numeric_limits<double>::infinity();
    try {
        const SpectralDiagnostics diag =
            spectral_diagnostics(built.schedule, built.schedule.window);
        eta_bar = lemma_bound_params(built.model.mu, built.model.lips,
                                     built.model.num_agents, built.schedule.window,
                                     diag.delta)
                      .eta_bar;
    } catch (const Error&) {
        // Theory flag stays permissive when the diagnostics cannot run.
    }

    std::vector<double> sorted = grid;
    std::sort(sorted.begin(), sorted.end());
    std::vector<TuneResult> out;
    for (const auto& setting : cfg.samplers) {
        TuneResult res;
        res.kind = setting.kind;
        bool any = false;
        double best = 0.0;
        for (double eta : sorted) {
            TunePoint pt;
            pt.eta = eta;
            pt.theory_feasible = eta <= eta_bar;
            try {
                const SamplerRunResult r =
                    compute_sampler_metrics(built, cfg, {setting.kind, eta});
                pt.final_metric = r.curve.mean.back();
                pt.finite = r.finite && std::isfinite(pt.final_metric);
            } catch (const Error&) {
                pt.finite = false;
                pt.final_metric = std::numeric_limits<double>::quiet_NaN();
            }
            if (pt.finite) {
                const bool better =
                    !any || (maximize ? pt.final_metric > best : pt.final_metric < best);
                if (better) {
                    best = pt.final_metric;
                    res.best_eta = eta;
                    any = true;
                }
            }
            res.points.push_back(pt);
        }
        if (!any)
            throw HarnessError("every stepsize in the grid failed for " +
                               sampler_name(setting.kind));
        out.push_back(std::move(res));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pinned reproduction presets

inline ExperimentConfig reproduction_config(const std::string& figure_id,
                                            const std::string& data_path = "") {
    ExperimentConfig c;
    c.trials = 200;
    c.iterations = 100;
    c.base_seed = 20240817;
    c.graph.num_agents = 20;
    c.graph.period = 50; // topology pattern repeats every 50 iterations
    c.graph.seed = 7;
    if (figure_id == "fig2a" || figure_id == "fig2b" || figure_id == "fig2c") {
        c.data = DataSpec{};
        c.data.kind = "linreg";
        c.data.total = 100;
        c.data.dim = 5;
        c.data.lambda_reg = 0.1;
        c.data.noise_var = 1.0;
        c.data.seed = 314159;
        c.graph.kind = figure_id == "fig2c" ? "lollipop" : "barbell";
        // Stepsizes below were grid-tuned to minimize the mean distance metric
        // at the final iteration, separately per sampler (200 trials).
        if (figure_id == "fig2b") {
            c.gradient_mode = GradientMode::Minibatch;
            c.batch = 3;
            c.samplers = {{SamplerKind::DigingSgld, 0.010}, {SamplerKind::DeSgld, 0.012}};
        } else {
            c.gradient_mode = GradientMode::Exact;
            c.batch = 5;
            c.samplers = {{SamplerKind::DigingSgld, 0.011}, {SamplerKind::DeSgld, 0.012}};
        }
        c.name = "bayesian linear regression, " + c.graph.kind + " network";
    } else if (figure_id == "fig3a" || figure_id == "fig3b") {
        c.data.kind = "logreg_synth";
        c.data.total = 600;
        c.data.dim = 5;
        c.data.lambda_reg = 0.1;
        c.data.train_ratio = 0.7;
        c.data.seed = 81; // balanced train split lands on 380 rows = 19 per agent
        c.graph.kind = figure_id == "fig3b" ? "lollipop" : "barbell";
        c.gradient_mode = GradientMode::Minibatch;
        c.batch = 1;
        // Grid-tuned to maximize mean final accuracy, separately per sampler.
        if (figure_id == "fig3b")
            c.samplers = {{SamplerKind::DigingSgld, 0.02}, {SamplerKind::DeSgld, 0.04}};
        else
            c.samplers = {{SamplerKind::DigingSgld, 0.01}, {SamplerKind::DeSgld, 0.04}};
        c.name = "bayesian logistic regression, " + c.graph.kind + " network";
    } else if (figure_id == "fig3c") {
        if (data_path.empty())
            throw DataError("fig3c needs --data <csv> with the diagnostic table");
        c.data.kind = "logreg_csv";
        c.data.csv_path = data_path;
        c.data.csv_train_ratio = 0.1;
        c.data.csv_target_train = 30;
        c.data.lambda_reg = 0.3;
        c.data.seed = 97;
        c.graph.kind = "barbell";
        c.graph.num_agents = 30;
        c.gradient_mode = GradientMode::Minibatch;
        c.batch = 1;
        // Nominal stepsizes; tune against the supplied CSV with the `tune` command.
        c.samplers = {{SamplerKind::DigingSgld, 0.02}, {SamplerKind::DeSgld, 0.02}};
        c.name = "bayesian logistic regression, real data, barbell network";
    } else {
        throw HarnessError("unknown figure id '" + figure_id +
                           "' (expected fig2a|fig2b|fig2c|fig3a|fig3b|fig3c)");
    }
    c.output_dir = "reproduce_" + figure_id;
    return c;
}

inline RunArtifact reproduce(const std::string& figure_id,
                             const std::string& data_path = "") {
    return run_experiment(reproduction_config(figure_id, data_path));
}

} // namespace dsgld
