// network.hpp — agent interaction graphs, Metropolis mixing matrices,
// time-varying schedules, and spectral mixing diagnostics.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dsgld/errors.hpp"
#include "dsgld/linalg.hpp"
#include "dsgld/rng.hpp"

namespace dsgld {

// Undirected simple graph on agents 0..num_agents-1. Edges are stored
// normalized (i < j), sorted, and deduplicated.
struct Topology {
    int num_agents = 0;
    std::vector<std::pair<int, int>> edges;

    Topology() = default;
    Topology(int n, std::vector<std::pair<int, int>> raw_edges) : num_agents(n) {
        if (n <= 0) throw ConstructionError("topology needs at least one agent");
        edges.reserve(raw_edges.size());
        for (auto [a, b] : raw_edges) {
            if (a == b) throw ConstructionError("self-loop on agent " + std::to_string(a));
            if (a < 0 || b < 0 || a >= n || b >= n)
                throw ConstructionError("edge endpoint out of range");
            edges.emplace_back(std::min(a, b), std::max(a, b));
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    }

    std::vector<int> degrees() const {
        std::vector<int> deg(static_cast<std::size_t>(num_agents), 0);
        for (auto [a, b] : edges) {
            ++deg[static_cast<std::size_t>(a)];
            ++deg[static_cast<std::size_t>(b)];
        }
        return deg;
    }

    std::vector<std::vector<int>> adjacency() const {
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(num_agents));
        for (auto [a, b] : edges) {
            adj[static_cast<std::size_t>(a)].push_back(b);
            adj[static_cast<std::size_t>(b)].push_back(a);
        }
        return adj;
    }

    bool is_connected() const {
        if (num_agents == 1) return true;
        const auto adj = adjacency();
        std::vector<char> seen(static_cast<std::size_t>(num_agents), 0);
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        int reached = 1;
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (int v : adj[static_cast<std::size_t>(u)]) {
                if (!seen[static_cast<std::size_t>(v)]) {
                    seen[static_cast<std::size_t>(v)] = 1;
                    ++reached;
                    q.push(v);
                }
            }
        }
        return reached == num_agents;
    }
};

inline Topology complete_topology(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return Topology(n, std::move(e));
}

// Metropolis constant-edge-weight rule. Degrees exclude self. The small
// eps_hat keeps every diagonal entry strictly positive so each matrix mixes
// aperiodically.
inline Eigen::MatrixXd metropolis_weights(const Topology& topo, double eps_hat = 1e-6) {
    if (!(eps_hat > 0.0)) throw ConstructionError("eps_hat must be positive");
    if (!topo.is_connected()) throw ConstructionError("graph is disconnected");
    const int n = topo.num_agents;
    const auto deg = topo.degrees();
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (auto [a, b] : topo.edges) {
        const double v =
            1.0 / (static_cast<double>(std::max(deg[static_cast<std::size_t>(a)],
                                                deg[static_cast<std::size_t>(b)])) +
                   eps_hat);
        w(a, b) = v;
        w(b, a) = v;
    }
    for (int i = 0; i < n; ++i) w(i, i) = 1.0 - w.row(i).sum();
    return w;
}

// Invariant diagnostics for a mixing matrix against its topology.
struct MixingReport {
    double max_asymmetry = 0.0;
    double max_row_sum_error = 0.0;
    double min_entry = 0.0;
    double max_entry = 0.0;
    bool sparsity_matches = true;

    bool ok(double tol) const {
        return max_asymmetry <= tol && max_row_sum_error <= tol && min_entry >= -tol &&
               max_entry <= 1.0 + tol && sparsity_matches;
    }
};

inline MixingReport check_mixing_matrix(const Eigen::MatrixXd& w, const Topology& topo) {
    MixingReport r;
    const int n = topo.num_agents;
    if (w.rows() != n || w.cols() != n)
        throw ConstructionError("mixing matrix size does not match topology");
    r.max_asymmetry = max_abs_asymmetry(w);
    r.max_row_sum_error = (w.rowwise().sum().array() - 1.0).abs().maxCoeff();
    r.min_entry = w.minCoeff();
    r.max_entry = w.maxCoeff();
    Eigen::MatrixXi has_edge = Eigen::MatrixXi::Zero(n, n);
    for (auto [a, b] : topo.edges) has_edge(a, b) = has_edge(b, a) = 1;
    for (int i = 0; i < n && r.sparsity_matches; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const bool nonzero = w(i, j) != 0.0;
            if (nonzero != (has_edge(i, j) == 1)) {
                r.sparsity_matches = false;
                break;
            }
        }
    return r;
}

// Periodic schedule of (topology, mixing matrix) entries. at(k) wraps modulo
// the period, so any iteration index addresses a well-defined matrix.
struct GraphSchedule {
    std::string generator;
    int num_agents = 0;
    int period = 0;
    int window = 1; // analysis window B used by default in diagnostics
    std::uint64_t seed = 0;
    double eps_hat = 1e-6;
    std::vector<Topology> topologies;
    std::vector<Eigen::MatrixXd> matrices;

    const Eigen::MatrixXd& at(long long k) const {
        const long long p = period;
        return matrices[static_cast<std::size_t>(((k % p) + p) % p)];
    }
    const Topology& topology_at(long long k) const {
        const long long p = period;
        return topologies[static_cast<std::size_t>(((k % p) + p) % p)];
    }

    std::uint64_t content_hash() const {
        StreamHash h;
        h.update(static_cast<std::uint64_t>(num_agents));
        h.update(static_cast<std::uint64_t>(period));
        h.update(eps_hat);
        for (const auto& t : topologies)
            for (auto [a, b] : t.edges) {
                h.update(static_cast<std::uint64_t>(a));
                h.update(static_cast<std::uint64_t>(b));
            }
        return h.digest();
    }
};

namespace detail {
inline GraphSchedule finish_schedule(std::string name, int n, int period, int window,
                                     std::uint64_t seed, double eps_hat,
                                     std::vector<Topology> topologies) {
    GraphSchedule s;
    s.generator = std::move(name);
    s.num_agents = n;
    s.period = period;
    s.window = window;
    s.seed = seed;
    s.eps_hat = eps_hat;
    s.matrices.reserve(topologies.size());
    for (const auto& t : topologies) s.matrices.push_back(metropolis_weights(t, eps_hat));
    s.topologies = std::move(topologies);
    return s;
}
} // namespace detail

// Two same-size cliques joined by one uniformly random cross edge, redrawn for
// every period entry.
inline GraphSchedule barbell_schedule(int n, int period, std::uint64_t seed,
                                      double eps_hat = 1e-6) {
    if (n < 4 || n % 2 != 0)
        throw ConstructionError("barbell needs an even agent count >= 4");
    if (period < 1) throw ConstructionError("period must be >= 1");
    const int half = n / 2;
    std::vector<Topology> topologies;
    topologies.reserve(static_cast<std::size_t>(period));
    for (int k = 0; k < period; ++k) {
        std::vector<std::pair<int, int>> e;
        for (int i = 0; i < half; ++i)
            for (int j = i + 1; j < half; ++j) {
                e.emplace_back(i, j);
                e.emplace_back(half + i, half + j);
            }
        CounterRng rng(StreamKey{seed, 0, 0, static_cast<std::uint64_t>(k),
                                 Purpose::GraphTopology});
        const int u = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(half)));
        const int v = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(half)));
        e.emplace_back(u, half + v);
        topologies.emplace_back(n, std::move(e));
    }
    return detail::finish_schedule("barbell", n, period, period, seed, eps_hat,
                                   std::move(topologies));
}

// Path ("branch") of a random length joined to a clique on the remaining
// agents. The branch occupies the smallest indices; its terminal node (agent 0)
// receives attach_count edges from distinct, uniformly chosen clique agents.
inline GraphSchedule lollipop_schedule(int n, std::pair<int, int> branch_range,
                                       int attach_count, int period, std::uint64_t seed,
                                       double eps_hat = 1e-6) {
    const auto [lo, hi] = branch_range;
    if (lo < 1 || hi < lo) throw ConstructionError("invalid branch length range");
    if (attach_count < 1) throw ConstructionError("attach_count must be >= 1");
    if (n - hi < attach_count + 1)
        throw ConstructionError("clique too small for requested attachments");
    if (period < 1) throw ConstructionError("period must be >= 1");
    std::vector<Topology> topologies;
    topologies.reserve(static_cast<std::size_t>(period));
    for (int k = 0; k < period; ++k) {
        CounterRng rng(StreamKey{seed, 0, 0, static_cast<std::uint64_t>(k),
                                 Purpose::GraphTopology});
        const int branch =
            lo + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(hi - lo + 1)));
        std::vector<std::pair<int, int>> e;
        for (int i = 0; i + 1 < branch; ++i) e.emplace_back(i, i + 1);
        for (int i = branch; i < n; ++i)
            for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
        // partial Fisher-Yates over the clique agents picks distinct attachments
        std::vector<int> pool;
        pool.reserve(static_cast<std::size_t>(n - branch));
        for (int i = branch; i < n; ++i) pool.push_back(i);
        for (int a = 0; a < attach_count; ++a) {
            const auto pick =
                a + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(pool.size()) -
                                                       static_cast<std::uint64_t>(a)));
            std::swap(pool[static_cast<std::size_t>(a)], pool[static_cast<std::size_t>(pick)]);
            e.emplace_back(0, pool[static_cast<std::size_t>(a)]);
        }
        topologies.emplace_back(n, std::move(e));
    }
    return detail::finish_schedule("lollipop", n, period, period, seed, eps_hat,
                                   std::move(topologies));
}

// Period-1 schedule on the complete graph.
inline GraphSchedule static_complete_schedule(int n, double eps_hat = 1e-6) {
    if (n < 1) throw ConstructionError("need at least one agent");
    std::vector<Topology> topologies{complete_topology(n)};
    return detail::finish_schedule("complete", n, 1, 1, 0, eps_hat, std::move(topologies));
}

// Spectral contraction of windowed products: for each k, the largest singular
// value of W^(k) * W^(k-1) * ... * W^(k-B+1) - (1/N) 11^T, indices modulo the
// period. delta = max over k; gap = 1 - delta.
struct SpectralDiagnostics {
    int window = 1;
    std::vector<double> delta_per_entry;
    double delta = 0.0;
    double gap = 0.0;
};

inline SpectralDiagnostics spectral_diagnostics(const GraphSchedule& schedule, int window) {
    if (window < 1) throw ConstructionError("window must be >= 1");
    const int n = schedule.num_agents;
    const Eigen::MatrixXd avg = Eigen::MatrixXd::Constant(n, n, 1.0 / n);
    SpectralDiagnostics d;
    d.window = window;
    d.delta_per_entry.reserve(static_cast<std::size_t>(schedule.period));
    for (int k = 0; k < schedule.period; ++k) {
        Eigen::MatrixXd prod = schedule.at(k);
        for (int b = 1; b < window; ++b) prod = prod * schedule.at(k - b);
        d.delta_per_entry.push_back(spectral_norm(prod - avg));
    }
    d.delta = *std::max_element(d.delta_per_entry.begin(), d.delta_per_entry.end());
    d.gap = 1.0 - d.delta;
    return d;
}

// JSON round-trip. Edges per entry plus the generation parameters are enough
// to rebuild matrices bitwise (weights are recomputed from the edge lists).
inline nlohmann::json schedule_to_json(const GraphSchedule& s) {
    nlohmann::json j;
    j["generator"] = s.generator;
    j["num_agents"] = s.num_agents;
    j["period"] = s.period;
    j["window"] = s.window;
    j["seed"] = s.seed;
    j["eps_hat"] = s.eps_hat;
    auto& entries = j["entries"] = nlohmann::json::array();
    for (const auto& t : s.topologies) {
        nlohmann::json edges = nlohmann::json::array();
        for (auto [a, b] : t.edges) edges.push_back({a, b});
        entries.push_back(std::move(edges));
    }
    return j;
}

inline GraphSchedule schedule_from_json(const nlohmann::json& j) {
    const int n = j.at("num_agents").get<int>();
    const int period = j.at("period").get<int>();
    std::vector<Topology> topologies;
    topologies.reserve(static_cast<std::size_t>(period));
    for (const auto& entry : j.at("entries")) {
        std::vector<std::pair<int, int>> e;
        for (const auto& edge : entry)
            e.emplace_back(edge.at(0).get<int>(), edge.at(1).get<int>());
        topologies.emplace_back(n, std::move(e));
    }
    if (static_cast<int>(topologies.size()) != period)
        throw ConstructionError("entry count does not match period");
    return detail::finish_schedule(j.at("generator").get<std::string>(), n, period,
                                   j.at("window").get<int>(),
                                   j.at("seed").get<std::uint64_t>(),
                                   j.at("eps_hat").get<double>(), std::move(topologies));
}

} // namespace dsgld
