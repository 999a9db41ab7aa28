// Experiment harness: configuration serialization, artifact determinism
// across thread counts, the stepsize tuner, reproduction presets, and output
// directory resolution.
#include "catch2/catch_amalgamated.hpp"
#include "dsgld/dsgld.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace dsgld;
using Catch::Matchers::ContainsSubstring;

namespace {
ExperimentConfig small_linreg_config(const std::string& out_dir) {
    ExperimentConfig c;
    c.name = "small linear regression";
    c.graph.kind = "barbell";
    c.graph.num_agents = 4;
    c.graph.period = 3;
    c.graph.seed = 11;
    c.data.kind = "linreg";
    c.data.total = 40;
    c.data.dim = 2;
    c.data.lambda_reg = 0.2;
    c.data.seed = 1001;
    c.iterations = 20;
    c.trials = 8;
    c.thin = 5;
    c.threads = 1;
    c.output_dir = out_dir;
    return c;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
    const std::filesystem::path p = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(p);
    return p;
}
} // namespace

TEST_CASE("configuration serializes and parses losslessly") {
    ExperimentConfig c;
    c.name = "roundtrip";
    c.graph.kind = "lollipop";
    c.graph.num_agents = 8;
    c.graph.period = 9;
    c.graph.branch_lo = 2;
    c.graph.branch_hi = 3;
    c.graph.attach = 2;
    c.graph.seed = 55;
    c.graph.eps_hat = 1e-5;
    c.data.kind = "logreg_synth";
    c.data.total = 200;
    c.data.dim = 4;
    c.data.lambda_reg = 0.7;
    c.data.noise_var = 2.0;
    c.data.train_ratio = 0.6;
    c.data.seed = 99;
    c.data.csv_path = "somewhere.csv";
    c.data.csv_train_ratio = 0.2;
    c.data.csv_target_train = 44;
    c.samplers = {{SamplerKind::UlaReference, 0.003}, {SamplerKind::DigingSgld, 0.04}};
    c.iterations = 321;
    c.trials = 17;
    c.base_seed = 777;
    c.gradient_mode = GradientMode::Minibatch;
    c.batch = 2;
    c.stochastic_y_init = true;
    c.thin = 3;
    c.init_scale = 0.5;
    c.threads = 2;
    c.output_dir = "elsewhere";
    c.emit_svg = false;

    const ExperimentConfig d = config_from_json(config_to_json(c));
    CHECK(d.name == c.name);
    CHECK(d.graph.kind == c.graph.kind);
    CHECK(d.graph.num_agents == c.graph.num_agents);
    CHECK(d.graph.period == c.graph.period);
    CHECK(d.graph.branch_lo == c.graph.branch_lo);
    CHECK(d.graph.branch_hi == c.graph.branch_hi);
    CHECK(d.graph.attach == c.graph.attach);
    CHECK(d.graph.seed == c.graph.seed);
    CHECK(d.graph.eps_hat == c.graph.eps_hat);
    CHECK(d.data.kind == c.data.kind);
    CHECK(d.data.total == c.data.total);
    CHECK(d.data.dim == c.data.dim);
    CHECK(d.data.lambda_reg == c.data.lambda_reg);
    CHECK(d.data.noise_var == c.data.noise_var);
    CHECK(d.data.train_ratio == c.data.train_ratio);
    CHECK(d.data.seed == c.data.seed);
    CHECK(d.data.csv_path == c.data.csv_path);
    CHECK(d.data.csv_train_ratio == c.data.csv_train_ratio);
    CHECK(d.data.csv_target_train == c.data.csv_target_train);
    REQUIRE(d.samplers.size() == 2);
    CHECK(d.samplers[0].kind == SamplerKind::UlaReference);
    CHECK(d.samplers[0].eta == 0.003);
    CHECK(d.samplers[1].kind == SamplerKind::DigingSgld);
    CHECK(d.samplers[1].eta == 0.04);
    CHECK(d.iterations == c.iterations);
    CHECK(d.trials == c.trials);
    CHECK(d.base_seed == c.base_seed);
    CHECK(d.gradient_mode == GradientMode::Minibatch);
    CHECK(d.batch == c.batch);
    CHECK(d.stochastic_y_init == c.stochastic_y_init);
    CHECK(d.thin == c.thin);
    CHECK(d.init_scale == c.init_scale);
    CHECK(d.threads == c.threads);
    CHECK(d.output_dir == c.output_dir);
    CHECK(d.emit_svg == c.emit_svg);
}

TEST_CASE("missing configuration fields fall back to defaults") {
    const ExperimentConfig d = config_from_json(nlohmann::json::object());
    const ExperimentConfig ref;
    CHECK(d.name == ref.name);
    CHECK(d.graph.kind == ref.graph.kind);
    CHECK(d.graph.num_agents == ref.graph.num_agents);
    CHECK(d.data.kind == ref.data.kind);
    CHECK(d.iterations == ref.iterations);
    CHECK(d.trials == ref.trials);
    CHECK(d.gradient_mode == GradientMode::Exact);
    REQUIRE(d.samplers.size() == 2);
    CHECK(d.samplers[0].kind == SamplerKind::DigingSgld);
}

TEST_CASE("configuration errors are reported as harness errors") {
    nlohmann::json j;
    j["gradient_mode"] = "sideways";
    CHECK_THROWS_AS(config_from_json(j), HarnessError);

    nlohmann::json k;
    k["samplers"] = {{{"kind", "unheard_of"}, {"eta", 0.1}}};
    CHECK_THROWS_WITH(config_from_json(k), ContainsSubstring("unknown sampler"));

    nlohmann::json broken;
    broken["iterations"] = "twelve";
    CHECK_THROWS_WITH(config_from_json(broken), ContainsSubstring("bad configuration"));

    ExperimentConfig c = small_linreg_config("unused");
    c.samplers = {{SamplerKind::DigingSgld, 0.0}};
    CHECK_THROWS_WITH(c.validate(), ContainsSubstring("eta must be positive"));
    c = small_linreg_config("unused");
    c.samplers.clear();
    CHECK_THROWS_AS(c.validate(), HarnessError);
    c = small_linreg_config("unused");
    c.data.kind = "tabular";
    CHECK_THROWS_WITH(c.validate(), ContainsSubstring("unknown data kind"));
    c = small_linreg_config("unused");
    c.iterations = 0;
    CHECK_THROWS_AS(c.validate(), HarnessError);
    c = small_linreg_config("unused");
    c.trials = 0;
    CHECK_THROWS_AS(c.validate(), HarnessError);
    c = small_linreg_config("unused");
    c.thin = 0;
    CHECK_THROWS_AS(c.validate(), HarnessError);
}

TEST_CASE("sampler names round-trip and reject unknowns") {
    CHECK(sampler_from_name("diging_sgld") == SamplerKind::DigingSgld);
    CHECK(sampler_from_name("diging") == SamplerKind::DigingSgld);
    CHECK(sampler_from_name("de_sgld") == SamplerKind::DeSgld);
    CHECK(sampler_from_name("ula_reference") == SamplerKind::UlaReference);
    CHECK(sampler_from_name("ula") == SamplerKind::UlaReference);
    CHECK(sampler_from_name(sampler_name(SamplerKind::DeSgld)) == SamplerKind::DeSgld);
    CHECK_THROWS_WITH(sampler_from_name("metropolis"),
                      ContainsSubstring("unknown sampler"));
}

TEST_CASE("experiment artifacts are identical across thread counts") {
    const auto dir1 = fresh_dir("dsgld_harness_t1");
    const auto dir2 = fresh_dir("dsgld_harness_t2");

    ExperimentConfig c1 = small_linreg_config(dir1.string());
    c1.threads = 1;
    ExperimentConfig c2 = small_linreg_config(dir2.string());
    c2.threads = 2;

    const RunArtifact a1 = run_experiment(c1);
    const RunArtifact a2 = run_experiment(c2);
    CHECK(a1.self_checks_passed);
    CHECK(a2.self_checks_passed);
    REQUIRE(a1.results.size() == 2);

    for (const char* f : {"metrics_diging_sgld.csv", "metrics_de_sgld.csv",
                          "agents_diging_sgld.csv", "agents_de_sgld.csv"}) {
        INFO(f);
        CHECK(slurp(dir1 / f) == slurp(dir2 / f));
    }
    CHECK(std::filesystem::exists(dir1 / "plots" / "w2.svg"));
    CHECK(std::filesystem::exists(dir1 / "provenance.json"));

    // Provenance echoes the configuration and the paired-stream check.
    const nlohmann::json prov = nlohmann::json::parse(slurp(dir1 / "provenance.json"));
    CHECK(prov["config"]["trials"] == 8);
    CHECK(prov["self_checks"]["paired_streams"] == true);
    CHECK(prov["results"].size() == 2);
    CHECK(prov["results"][0]["langevin_hash"] == prov["results"][1]["langevin_hash"]);

    // The recorded curve respects the thinning contract: 0,5,10,15,20.
    const std::vector<long long> want{0, 5, 10, 15, 20};
    CHECK(a1.results[0].curve.iterations == want);

    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
}

TEST_CASE("distance metrics need at least two trials") {
    ExperimentConfig c = small_linreg_config(fresh_dir("dsgld_harness_one").string());
    c.trials = 1;
    CHECK_THROWS_AS(run_experiment(c), MetricError);
}

TEST_CASE("stepsize tuner picks the best finite grid point") {
    ExperimentConfig base = small_linreg_config("unused_tuner_dir");
    base.iterations = 100;
    base.thin = 100;

    const std::vector<TuneResult> results =
        tune_stepsize(base, {0.004, 50.0, 0.002}, 6);
    REQUIRE(results.size() == 2);
    for (const auto& res : results) {
        REQUIRE(res.points.size() == 3);
        // Points come back sorted by stepsize.
        CHECK(res.points[0].eta == 0.002);
        CHECK(res.points[1].eta == 0.004);
        CHECK(res.points[2].eta == 50.0);
        // The huge stepsize diverges and is excluded from selection.
        CHECK_FALSE(res.points[2].finite);
        CHECK(std::isnan(res.points[2].final_metric));
        REQUIRE(res.points[0].finite);
        REQUIRE(res.points[1].finite);
        // Under this short horizon the larger stable stepsize mixes faster.
        CHECK(res.points[1].final_metric < res.points[0].final_metric);
        CHECK(res.best_eta == 0.004);
        // The closed-form feasibility flag is monotone along the grid.
        for (std::size_t i = 1; i < res.points.size(); ++i)
            CHECK((res.points[i - 1].theory_feasible || !res.points[i].theory_feasible));
    }

    CHECK_THROWS_WITH(tune_stepsize(base, {}, 4), ContainsSubstring("empty stepsize grid"));
    CHECK_THROWS_WITH(tune_stepsize(base, {1e9}, 4),
                      ContainsSubstring("every stepsize in the grid failed"));
}

TEST_CASE("reproduction presets pin the published experiment shapes") {
    const ExperimentConfig a = reproduction_config("fig2a");
    CHECK(a.graph.kind == "barbell");
    CHECK(a.graph.num_agents == 20);
    CHECK(a.graph.period == 50);
    CHECK(a.data.kind == "linreg");
    CHECK(a.data.total == 100);
    CHECK(a.data.dim == 5);
    CHECK(a.data.seed == 314159);
    CHECK(a.gradient_mode == GradientMode::Exact);
    CHECK(a.iterations == 100);
    CHECK(a.trials == 200);
    REQUIRE(a.samplers.size() == 2);
    CHECK(a.samplers[0].kind == SamplerKind::DigingSgld);
    CHECK(a.samplers[0].eta == 0.011);
    CHECK(a.samplers[1].eta == 0.012);
    CHECK(a.output_dir == "reproduce_fig2a");

    const ExperimentConfig b = reproduction_config("fig2b");
    CHECK(b.gradient_mode == GradientMode::Minibatch);
    CHECK(b.batch == 3);

    const ExperimentConfig c = reproduction_config("fig2c");
    CHECK(c.graph.kind == "lollipop");

    const ExperimentConfig d = reproduction_config("fig3a");
    CHECK(d.data.kind == "logreg_synth");
    CHECK(d.data.total == 600);
    CHECK(d.data.seed == 81);
    CHECK(d.batch == 1);
    CHECK(d.gradient_mode == GradientMode::Minibatch);
    CHECK(d.samplers[0].eta == 0.01);
    CHECK(d.samplers[1].eta == 0.04);

    const ExperimentConfig e = reproduction_config("fig3b");
    CHECK(e.graph.kind == "lollipop");
    CHECK(e.samplers[0].eta == 0.02);

    const ExperimentConfig f = reproduction_config("fig3c", "table.csv");
    CHECK(f.data.kind == "logreg_csv");
    CHECK(f.data.csv_path == "table.csv");
    CHECK(f.graph.num_agents == 30);
    CHECK(f.data.lambda_reg == 0.3);

    CHECK_THROWS_AS(reproduction_config("fig3c"), DataError);
    CHECK_THROWS_WITH(reproduction_config("fig7q"),
                      ContainsSubstring("unknown figure id"));
}

TEST_CASE("accuracy experiments produce curves inside the unit interval") {
    const auto dir = fresh_dir("dsgld_fig3a_smoke");
    ExperimentConfig c = reproduction_config("fig3a");
    c.trials = 2;
    c.iterations = 5;
    c.thin = 1;
    c.threads = 1;
    c.output_dir = dir.string();

    const RunArtifact art = run_experiment(c);
    CHECK(art.self_checks_passed);
    REQUIRE(art.results.size() == 2);
    for (const auto& r : art.results) {
        REQUIRE(r.curve.mean.size() == 6);
        for (double v : r.curve.mean) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        CHECK(r.finite);
        CHECK(r.minibatch_hash != 0);
    }
    CHECK(std::filesystem::exists(dir / "metrics_diging_sgld.csv"));
    CHECK(std::filesystem::exists(dir / "plots" / "accuracy.svg"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("relative output directories honor the output root override") {
    const auto root = fresh_dir("dsgld_root_override");
    REQUIRE(setenv("DSGLD_OUT_ROOT", root.c_str(), 1) == 0);

    const std::filesystem::path resolved = detail::resolve_output_dir("nested/out");
    CHECK(resolved == root / "nested" / "out");

    ExperimentConfig c = small_linreg_config("nested/out");
    const RunArtifact art = run_experiment(c);
    CHECK(std::filesystem::path(art.directory) == root / "nested" / "out");
    CHECK(std::filesystem::exists(root / "nested" / "out" / "provenance.json"));

    REQUIRE(unsetenv("DSGLD_OUT_ROOT") == 0);
    // Absolute directories are used verbatim regardless of the root.
    CHECK(detail::resolve_output_dir("/tmp/abs_dir") ==
          std::filesystem::path("/tmp/abs_dir"));
    std::filesystem::remove_all(root);
}
