#pragma once

// LINE with second-order proximity: each node has a vertex vector and a
// context vector; an edge u -> v is modelled as s(vertex_u . context_v).
// Edges are drawn proportionally to weight, negatives from degree^0.75.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "weaknet/common.hpp"
#include "weaknet/embed.hpp"
#include "weaknet/graph.hpp"
#include "weaknet/sampling.hpp"
#include "weaknet/skipgram.hpp"

namespace weaknet {

struct LineConfig {
    std::size_t dim = 128;
    std::uint64_t samples = 1'000'000;
    std::size_t negatives = 5;
    double alpha = 0.025;
    std::uint64_t seed = 1;

    [[nodiscard]] std::string describe() const {
        char buf[128];
        std::snprintf(buf, sizeof buf, "dim=%zu samples=%llu negatives=%zu alpha=%g seed=%llu", dim,
                      static_cast<unsigned long long>(samples), negatives, alpha,
                      static_cast<unsigned long long>(seed));
        return buf;
    }
};

/// Trains on one layer of `g`. Returns vertex vectors for every node with
/// at least one out-edge in that layer (other nodes carry no second-order
/// signal and are omitted).
inline NodeEmbeddings train_line2(const MultilayerGraph& g, std::size_t layer, const LineConfig& cfg) {
    if (cfg.dim < 2) throw Error("embedding dimension must be >= 2");
    if (cfg.samples == 0) throw Error("LINE needs a positive sample count");
    if (layer >= g.layer_count()) throw Error("layer index out of range");
    const std::size_t n = g.node_count();
    const std::size_t d = cfg.dim;

    std::vector<NodeId> src;
    std::vector<NodeId> dst;
    std::vector<double> w;
    std::vector<double> degree(n, 0.0);
    for (NodeId u = 0; u < n; ++u) {
        for (const auto& e : g.out_edges(layer, u)) {
            src.push_back(u);
            dst.push_back(e.target);
            w.push_back(e.weight);
            degree[u] += e.weight;
            degree[e.target] += e.weight;
        }
    }
    if (src.empty()) throw Error("LINE needs a graph with at least one edge");
    const AliasTable edges(w);
    for (auto& x : degree) x = std::pow(x, 0.75);
    const AliasTable noise(degree);

    std::vector<float> vertex(n * d);
    std::vector<float> context(n * d, 0.0F);
    Rng rng = make_rng(cfg.seed, 0x11e);
    for (auto& v : vertex) v = static_cast<float>((uniform01(rng) - 0.5) / static_cast<double>(d));

    std::vector<std::uint32_t> targets(cfg.negatives + 1);
    std::vector<std::uint8_t> labels(cfg.negatives + 1);
    std::vector<double> coef(cfg.negatives + 1);
    std::vector<float> scratch(d);
    for (std::uint64_t s = 0; s < cfg.samples; ++s) {
        const double a = std::max(cfg.alpha * 1e-4, cfg.alpha * (1.0 - static_cast<double>(s) / static_cast<double>(cfg.samples)));
        const auto e = edges.sample(rng);
        const NodeId u = src[e];
        std::size_t k = 0;
        targets[k] = dst[e];
        labels[k++] = 1;
        for (std::size_t j = 0; j < cfg.negatives; ++j) {
            const auto neg = noise.sample(rng);
            if (neg == dst[e]) continue;
            targets[k] = neg;
            labels[k++] = 0;
        }
        std::span<float> vu(vertex.data() + u * d, d);
        const std::span<const std::uint32_t> t(targets.data(), k);
        sgns::coefficients(vu, context, d, t, std::span<const std::uint8_t>(labels.data(), k),
                           std::span<double>(coef.data(), k));
        sgns::apply(vu, context, d, t, std::span<const double>(coef.data(), k), a, scratch);
    }
    if (!all_finite<float>(vertex)) throw Error("non-finite LINE embedding");

    std::vector<std::string> ids;
    std::vector<float> data;
    for (NodeId u = 0; u < n; ++u) {
        if (g.out_edges(layer, u).empty()) continue;
        ids.push_back(g.node_name(u));
        data.insert(data.end(), vertex.begin() + static_cast<std::ptrdiff_t>(u * d),
                    vertex.begin() + static_cast<std::ptrdiff_t>((u + 1) * d));
    }
    NodeEmbeddings out(std::move(ids), d, std::move(data));
    out.provenance = "method=line2 layer=" + g.layer(layer).name + " " + cfg.describe();
    return out;
}

}  // namespace weaknet
