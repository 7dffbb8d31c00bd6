#pragma once

// Fixtures shared by the unit suites and the acceptance runner. Expected
// values were computed outside this code base and are frozen here.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "weaknet/benchmark.hpp"
#include "weaknet/graph.hpp"
#include "weaknet/synth.hpp"
#include "weaknet/walks.hpp"
#include "weaknet/weakscore.hpp"

namespace fixtures {

using namespace weaknet;

struct LossCase {
    std::uint32_t n, n_plus, n_minus, n_ctx;
    double y;
    double lower, upper, loss;
};

// Bounds and loss evaluated by hand / in Python from the closed forms.
inline const std::array<LossCase, 20> kLossCases{{
    {4, 1, 0, 1, 0.8, 0.75, 1.0, 0.0},
    {4, 1, 0, 1, 0.5, 0.75, 1.0, 0.2876820724517809},
    {0, 0, 0, 0, 0.3, 0.0, 1.0, 0.0},
    {2, 2, 0, 0, 0.9, 2.0, 1.0, 27.631021115928547},
    {4, 0, 1, 0, 0.85, 0.0, 0.75, 0.10536051565782628},
    {1, 1, 0, 0, 0.2, 2.0, 1.0, 27.631021115928547},
    {1, 0, 1, 0, 0.7, 0.0, 0.0, 1.203972804325936},
    {3, 1, 1, 1, 0.5, 1.0, 0.6666666666666667, 0.6931471805599453},
    {5, 0, 0, 5, 0.99, 1.0, 1.0, 0.01005033585350145},
    {6, 2, 2, 0, 0.1, 0.6666666666666666, 0.6666666666666667, 0.8362480242006184},
    {2, 0, 2, 0, 0.05, 0.0, 0.0, 0.05129329438755058},
    {2, 0, 2, 0, 0.6, 0.0, 0.0, 0.916290731874155},
    {10, 3, 2, 1, 0.65, 0.7, 0.8, 0.05129329438755058},
    {10, 3, 2, 1, 0.95, 0.7, 0.8, 0.1625189294977748},
    {8, 1, 3, 2, 0.3, 0.5, 0.625, 0.2231435513142097},
    {3, 0, 0, 1, 0.1, 0.3333333333333333, 1.0, 0.26570316573300545},
    {7, 2, 1, 3, 0.2, 1.0, 0.8571428571428572, 1.6094379124341005},
    {4, 1, 2, 0, 1e-06, 0.5, 0.5, 0.6931451805619455},
    {2, 1, 1, 0, 0.5, 1.0, 0.5, 0.6931471805599453},
    {5, 1, 4, 0, 0.999999, 0.4, 0.19999999999999996, 1.6094329124466005},
}};

inline IndicatorCounts counts_of(const LossCase& c) { return {c.n, c.n_plus, c.n_minus, c.n_ctx}; }

// ---------------------------------------------------------------------------
// Small random weighted 2-layer graphs for walk oracles.

/// n nodes; each node gets 0..max_out out-edges per layer, some nodes are
/// left out of the quote layer entirely.
inline MultilayerGraph random_two_layer_graph(std::uint64_t seed, std::size_t n, std::size_t max_out = 6) {
    Rng rng = make_rng(seed, 77);
    MultilayerGraph g;
    for (std::size_t i = 0; i < n; ++i) g.add_node("n" + std::to_string(i));
    const auto reply = g.add_layer("reply");
    const auto quote = g.add_layer("quote");
    std::vector<bool> in_quote(n);
    for (std::size_t i = 0; i < n; ++i) in_quote[i] = uniform01(rng) < 0.7;
    for (std::size_t layer : {reply, quote}) {
        for (std::size_t u = 0; u < n; ++u) {
            if (layer == quote && !in_quote[u]) continue;
            const auto k = uniform_index(rng, max_out + 1);
            for (std::size_t j = 0; j < k; ++j) {
                const auto v = uniform_index(rng, n);
                if (v == u || (layer == quote && !in_quote[v])) continue;
                if (g.edge_weight(layer, static_cast<NodeId>(u), static_cast<NodeId>(v))) continue;
                g.add_edge(layer, static_cast<NodeId>(u), static_cast<NodeId>(v), 0.05 + uniform01(rng));
            }
        }
    }
    return normalize_out_weights(std::move(g));
}

/// Outcome distribution of one weighted step from u in `layer`; key -1 is
/// "walk ends here".
inline std::map<long, double> step_distribution(const MultilayerGraph& g, std::size_t layer, NodeId u) {
    std::map<long, double> d;
    const auto edges = g.out_edges(layer, u);
    if (edges.empty()) {
        d[-1] = 1.0;
        return d;
    }
    double total = 0;
    for (const auto& e : edges) total += e.weight;
    for (const auto& e : edges) d[static_cast<long>(e.target)] += e.weight / total;
    return d;
}

/// Layer distribution of the multilayer walk's decision at u, currently in `current`.
inline std::map<std::size_t, double> layer_distribution(const MultilayerGraph& g, NodeId u, std::size_t current,
                                                        double stay) {
    std::vector<std::size_t> others;
    for (std::size_t l = 0; l < g.layer_count(); ++l) {
        if (l != current && g.in_layer(l, u)) others.push_back(l);
    }
    std::map<std::size_t, double> d;
    if (others.empty()) {
        d[current] = 1.0;
        return d;
    }
    d[current] += stay;
    for (auto l : others) d[l] += (1.0 - stay) / static_cast<double>(others.size());
    return d;
}

/// Next-node distribution at u when the walker is in `current`.
inline std::map<long, double> multilayer_step(const MultilayerGraph& g, NodeId u, std::size_t current, double stay) {
    std::map<long, double> out;
    for (const auto& [l, pl] : layer_distribution(g, u, current, stay)) {
        for (const auto& [v, pv] : step_distribution(g, l, u)) out[v] += pl * pv;
    }
    return out;
}

/// First step of a multilayer walk from u: uniform start layer among the
/// layers containing u, then the usual decision.
inline std::map<long, double> multilayer_first_step(const MultilayerGraph& g, NodeId u, double stay) {
    std::vector<std::size_t> present;
    for (std::size_t l = 0; l < g.layer_count(); ++l) {
        if (g.in_layer(l, u)) present.push_back(l);
    }
    std::map<long, double> out;
    if (present.empty()) {
        out[-1] = 1.0;
        return out;
    }
    for (auto l0 : present) {
        for (const auto& [v, p] : multilayer_step(g, u, l0, stay)) out[v] += p / static_cast<double>(present.size());
    }
    return out;
}

inline double l1_distance(const std::map<long, double>& exact, const std::map<long, std::uint64_t>& counts) {
    std::uint64_t total = 0;
    for (const auto& [k, c] : counts) total += c;
    if (total == 0) return 2.0;
    double l1 = 0;
    for (const auto& [k, p] : exact) {
        const auto it = counts.find(k);
        const double q = it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
        l1 += std::abs(p - q);
    }
    for (const auto& [k, c] : counts) {
        if (!exact.contains(k)) l1 += static_cast<double>(c) / static_cast<double>(total);
    }
    return l1;
}

// ---------------------------------------------------------------------------
// Planted-partition fixtures.

/// Reply layer: dense and only mildly assortative, everyone takes part.
/// Quote layer: strongly assortative but covering half of the users, with
/// interaction scores an order of magnitude below the reply scores.
inline SynthSpec layered_sbm_spec(std::uint64_t seed) {
    SynthSpec s;
    s.n_users = 500;
    s.hateful_fraction = 0.2;
    s.layers[0] = {0.03, 0.02, 0.02, 0.03, 1.0, 1.0};
    s.layers[1] = {0.05, 0.001, 0.001, 0.012, 0.5, 0.05};
    s.weight_hh = 0.8;
    s.weight_other = 0.3;
    s.weight_spread = 0.05;
    s.seed = seed;
    return s;
}

/// Identical topology for both classes; only edge weights differ.
inline SynthSpec weight_signal_spec(std::uint64_t seed) {
    SynthSpec s;
    s.n_users = 300;
    s.hateful_fraction = 0.2;
    s.layers[0] = {0.04, 0.04, 0.04, 0.04, 1.0, 1.0};
    s.layers[1] = {0.03, 0.03, 0.03, 0.03, 1.0, 1.0};
    s.weight_hh = 0.9;
    s.weight_other = 0.1;
    s.weight_spread = 0.05;
    s.seed = seed;
    return s;
}

/// Small, fast embedding settings used by every benchmark fixture.
inline BenchmarkConfig fast_bench_config(std::uint64_t seed) {
    BenchmarkConfig cfg;
    cfg.ratios = {0.6};
    cfg.detail_ratio = 0.6;
    cfg.repeats = 10;
    cfg.seed = seed;
    cfg.walk.walks_per_node = 10;
    cfg.walk.walk_length = 40;
    cfg.walk.stay_prob = 0.7;
    cfg.walk.seed = seed;
    cfg.skipgram.dim = 32;
    cfg.skipgram.epochs = 2;
    cfg.skipgram.seed = seed;
    cfg.line.dim = 32;
    cfg.line.samples = 200000;
    cfg.line.seed = seed;
    return cfg;
}

inline std::vector<UserLabel> planted_labels(const SynthGraph& sg) {
    std::vector<UserLabel> labels;
    for (NodeId u = 0; u < sg.graph.node_count(); ++u) {
        labels.push_back({sg.graph.node_name(u), sg.hateful[u] != 0, 0});
    }
    return labels;
}

}  // namespace fixtures
