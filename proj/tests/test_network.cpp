// Graphs, Metropolis mixing matrices, periodic schedules, spectral
// diagnostics, and the JSON round trip.
#include "catch2/catch_amalgamated.hpp"
#include "dsgld/dsgld.hpp"

#include <cmath>

using namespace dsgld;

TEST_CASE("topology normalizes edges and rejects malformed input") {
    Topology t(4, {{2, 1}, {1, 2}, {0, 3}});
    REQUIRE(t.edges.size() == 2); // duplicate collapsed, endpoints ordered
    CHECK(t.edges[0] == std::make_pair(0, 3));
    CHECK(t.edges[1] == std::make_pair(1, 2));

    CHECK_THROWS_AS(Topology(3, {{1, 1}}), ConstructionError);
    CHECK_THROWS_AS(Topology(3, {{0, 3}}), ConstructionError);
    CHECK_THROWS_AS(Topology(0, {}), ConstructionError);
}

TEST_CASE("connectivity detection") {
    CHECK(Topology(1, {}).is_connected());
    CHECK_FALSE(Topology(2, {}).is_connected());
    CHECK(Topology(3, {{0, 1}, {1, 2}}).is_connected());
    CHECK_FALSE(Topology(4, {{0, 1}, {2, 3}}).is_connected());
    CHECK(complete_topology(6).is_connected());
    CHECK(complete_topology(6).edges.size() == 15);
}

TEST_CASE("metropolis weights on a path match the closed form") {
    const double eps_hat = 1e-6;
    const Topology path(3, {{0, 1}, {1, 2}});
    const Eigen::MatrixXd w = metropolis_weights(path, eps_hat);
    const double off = 1.0 / (2.0 + eps_hat);
    CHECK(w(0, 1) == off);
    CHECK(w(1, 0) == off);
    CHECK(w(1, 2) == off);
    CHECK(w(0, 2) == 0.0);
    CHECK(w(0, 0) == 1.0 - off);
    CHECK(w(1, 1) == 1.0 - 2.0 * off);

    const Eigen::MatrixXd k2 = metropolis_weights(complete_topology(2), eps_hat);
    CHECK(k2(0, 1) == 1.0 / (1.0 + eps_hat));

    CHECK_THROWS_AS(metropolis_weights(Topology(2, {})), ConstructionError);
    CHECK_THROWS_AS(metropolis_weights(path, 0.0), ConstructionError);
}

TEST_CASE("mixing-matrix report flags violations") {
    const Topology path(3, {{0, 1}, {1, 2}});
    Eigen::MatrixXd w = metropolis_weights(path);
    CHECK(check_mixing_matrix(w, path).ok(1e-12));

    Eigen::MatrixXd bad_sym = w;
    bad_sym(0, 1) += 1e-6;
    CHECK_FALSE(check_mixing_matrix(bad_sym, path).ok(1e-12));

    Eigen::MatrixXd bad_sparsity = w;
    bad_sparsity(0, 2) = bad_sparsity(2, 0) = 0.1;
    bad_sparsity(0, 0) -= 0.1;
    bad_sparsity(2, 2) -= 0.1;
    CHECK_FALSE(check_mixing_matrix(bad_sparsity, path).sparsity_matches);

    CHECK_THROWS_AS(check_mixing_matrix(Eigen::MatrixXd::Identity(2, 2), path),
                    ConstructionError);
}

TEST_CASE("barbell schedule entries are two bridged cliques") {
    const int n = 10, period = 5;
    const GraphSchedule s = barbell_schedule(n, period, 99);
    REQUIRE(s.period == period);
    REQUIRE(s.window == period);
    REQUIRE(static_cast<int>(s.topologies.size()) == period);
    const int half = n / 2;
    for (const auto& t : s.topologies) {
        // 2 * C(5,2) clique edges plus exactly one bridge.
        REQUIRE(static_cast<int>(t.edges.size()) == half * (half - 1) + 1);
        int crossing = 0;
        for (auto [a, b] : t.edges)
            if (a < half && b >= half) ++crossing;
        CHECK(crossing == 1);
        CHECK(t.is_connected());
    }
    CHECK_THROWS_AS(barbell_schedule(7, 5, 0), ConstructionError);
    CHECK_THROWS_AS(barbell_schedule(2, 5, 0), ConstructionError);
    CHECK_THROWS_AS(barbell_schedule(10, 0, 0), ConstructionError);
}

TEST_CASE("lollipop schedule shape") {
    const int n = 12, attach = 3, period = 6;
    const GraphSchedule s = lollipop_schedule(n, {3, 4}, attach, period, 4242);
    REQUIRE(static_cast<int>(s.topologies.size()) == period);
    for (const auto& t : s.topologies) {
        CHECK(t.is_connected());
        // Terminal branch agent: one path edge plus the random attachments.
        CHECK(t.degrees()[0] == attach + 1);
        // The path occupies the smallest indices, so edge (0,1) must exist.
        CHECK(std::find(t.edges.begin(), t.edges.end(), std::make_pair(0, 1)) !=
              t.edges.end());
    }
    CHECK_THROWS_AS(lollipop_schedule(12, {0, 4}, 3, 5, 0), ConstructionError);
    CHECK_THROWS_AS(lollipop_schedule(12, {4, 3}, 3, 5, 0), ConstructionError);
    CHECK_THROWS_AS(lollipop_schedule(6, {4, 4}, 3, 5, 0), ConstructionError);
}

TEST_CASE("schedule entries satisfy the mixing invariants") {
    const GraphSchedule barbell = barbell_schedule(20, 50, 7);
    const GraphSchedule lolli = lollipop_schedule(20, {3, 4}, 3, 50, 7);
    for (const auto* s : {&barbell, &lolli})
        for (int k = 0; k < s->period; ++k) {
            const MixingReport r =
                check_mixing_matrix(s->matrices[static_cast<std::size_t>(k)],
                                    s->topologies[static_cast<std::size_t>(k)]);
            REQUIRE(r.ok(1e-12));
        }
}

TEST_CASE("schedule indexing wraps modulo the period") {
    const GraphSchedule s = barbell_schedule(6, 4, 17);
    CHECK(s.at(0) == s.at(4));
    CHECK(s.at(3) == s.at(7));
    CHECK(s.at(-1) == s.at(3));
    CHECK(&s.topology_at(5) == &s.topology_at(1));

    const GraphSchedule c = static_complete_schedule(5);
    CHECK(c.period == 1);
    CHECK(c.window == 1);
    CHECK(c.at(123) == c.at(0));
}

TEST_CASE("windowed spectral contraction is below one and improves with the window") {
    const GraphSchedule s = barbell_schedule(10, 5, 31);
    const SpectralDiagnostics d1 = spectral_diagnostics(s, 1);
    const SpectralDiagnostics dp = spectral_diagnostics(s, s.period);
    REQUIRE(static_cast<int>(d1.delta_per_entry.size()) == s.period);
    CHECK(d1.delta < 1.0);
    CHECK(dp.delta < d1.delta);
    CHECK(dp.gap == 1.0 - dp.delta);
    CHECK_THROWS_AS(spectral_diagnostics(s, 0), ConstructionError);
}

TEST_CASE("schedule JSON round trip rebuilds matrices bitwise") {
    const GraphSchedule s = lollipop_schedule(10, {3, 4}, 2, 4, 2024);
    const GraphSchedule back = schedule_from_json(schedule_to_json(s));
    REQUIRE(back.period == s.period);
    CHECK(back.generator == s.generator);
    CHECK(back.window == s.window);
    CHECK(back.seed == s.seed);
    CHECK(back.eps_hat == s.eps_hat);
    CHECK(back.content_hash() == s.content_hash());
    for (int k = 0; k < s.period; ++k) {
        REQUIRE(back.topologies[static_cast<std::size_t>(k)].edges ==
                s.topologies[static_cast<std::size_t>(k)].edges);
        REQUIRE((back.matrices[static_cast<std::size_t>(k)].array() ==
                 s.matrices[static_cast<std::size_t>(k)].array())
                    .all());
    }

    nlohmann::json bad = schedule_to_json(s);
    bad["period"] = s.period + 1;
    CHECK_THROWS_AS(schedule_from_json(bad), ConstructionError);
}
