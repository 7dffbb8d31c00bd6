#pragma once

// Random-walk corpora over a multilayer graph: metapath-schema walks,
// layer-jumping multilayer walks, and node2vec-style single-layer walks.
// Walks follow out-edges proportionally to (normalized) weight and stop
// early when the required layer offers no out-edge.

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "weaknet/common.hpp"
#include "weaknet/graph.hpp"
#include "weaknet/io.hpp"
#include "weaknet/sampling.hpp"

namespace weaknet {

struct WalkConfig {
    std::size_t walks_per_node = 10;
    std::size_t walk_length = 80;
    /// Multilayer walks: probability of staying in the current layer.
    double stay_prob = 0.5;
    std::uint64_t seed = 1;
    unsigned threads = 1;

    void validate() const {
        if (walks_per_node < 1) throw Error("walks_per_node must be >= 1");
        if (walk_length < 2) throw Error("walk_length must be >= 2");
        if (!(stay_prob >= 0.0 && stay_prob <= 1.0)) throw Error("stay probability must lie in [0, 1]");
    }
};

/// Cyclic sequence of layer indices. The closed form E1 -> ... -> EL -> E1
/// is accepted and its repeated final layer dropped.
struct MetapathSchema {
    std::vector<std::size_t> layers;

    static MetapathSchema parse(std::string_view spec, const MultilayerGraph& g) {
        MetapathSchema s;
        std::size_t pos = 0;
        while (pos <= spec.size()) {
            auto end = spec.find_first_of(",>", pos);
            if (end == std::string_view::npos) end = spec.size();
            std::string name(spec.substr(pos, end - pos));
            while (!name.empty() && (name.back() == ' ' || name.back() == '-')) name.pop_back();
            while (!name.empty() && name.front() == ' ') name.erase(name.begin());
            if (!name.empty()) {
                const auto idx = g.layer_index(name);
                if (!idx) throw Error("metapath references missing layer '" + name + "'");
                s.layers.push_back(*idx);
            }
            pos = end + 1;
        }
        if (s.layers.size() >= 3 && s.layers.front() == s.layers.back()) s.layers.pop_back();
        s.validate(g);
        return s;
    }

    void validate(const MultilayerGraph& g) const {
        if (layers.size() < 2) throw Error("metapath schema needs at least two steps");
        for (auto l : layers) {
            if (l >= g.layer_count()) throw Error("metapath references missing layer " + std::to_string(l));
        }
    }

    [[nodiscard]] std::string to_string(const MultilayerGraph& g) const {
        std::string s;
        for (auto l : layers) s += (s.empty() ? "" : ",") + g.layer(l).name;
        return s;
    }
};

struct WalkCorpus {
    /// Token names; walks hold indices into this table.
    std::vector<std::string> vocab;
    std::vector<std::vector<NodeId>> walks;
    /// Layer used by each transition (walk.size() - 1 entries per walk).
    std::vector<std::vector<std::uint8_t>> step_layers;
    std::string strategy;
    std::string params;
    WalkConfig config;
    std::uint64_t graph_hash = 0;

    [[nodiscard]] std::size_t token_count() const {
        std::size_t n = 0;
        for (const auto& w : walks) n += w.size();
        return n;
    }
};

/// Per-(layer, node) alias tables over out-edge weights.
class TransitionSampler {
public:
    explicit TransitionSampler(const MultilayerGraph& g) : graph_(&g) {
        tables_.resize(g.layer_count());
        for (std::size_t l = 0; l < g.layer_count(); ++l) {
            tables_[l].resize(g.node_count());
            for (NodeId u = 0; u < g.node_count(); ++u) {
                const auto edges = g.out_edges(l, u);
                if (edges.empty()) continue;
                std::vector<double> w;
                w.reserve(edges.size());
                for (const auto& e : edges) w.push_back(e.weight);
                tables_[l][u] = AliasTable(w);
            }
        }
    }

    [[nodiscard]] std::optional<NodeId> step(std::size_t layer, NodeId u, Rng& rng) const {
        const auto& t = tables_[layer][u];
        if (t.empty()) return std::nullopt;
        return graph_->out_edges(layer, u)[t.sample(rng)].target;
    }

    [[nodiscard]] const MultilayerGraph& graph() const { return *graph_; }

private:
    const MultilayerGraph* graph_;
    std::vector<std::vector<AliasTable>> tables_;
};

/// Layer decision of a multilayer walk: stay with probability p, otherwise
/// move to a uniformly chosen other layer containing `u`; with no such
/// layer the walker stays.
inline std::size_t choose_layer(const MultilayerGraph& g, NodeId u, std::size_t current, double stay_prob,
                                Rng& rng) {
    if (uniform01(rng) < stay_prob) return current;
    std::size_t options[64];
    std::size_t n = 0;
    for (std::size_t l = 0; l < g.layer_count() && n < 64; ++l) {
        if (l != current && g.in_layer(l, u)) options[n++] = l;
    }
    if (n == 0) return current;
    return options[uniform_index(rng, n)];
}

namespace detail {

template <typename WalkFn>
WalkCorpus generate_walks(const MultilayerGraph& g, const WalkConfig& cfg, std::string strategy, std::string params,
                          WalkFn&& walk_one) {
    cfg.validate();
    WalkCorpus c;
    c.vocab = g.node_names();
    c.strategy = std::move(strategy);
    c.params = std::move(params);
    c.config = cfg;
    c.graph_hash = g.hash();
    const std::size_t n = g.node_count();
    const std::size_t total = n * cfg.walks_per_node;
    c.walks.resize(total);
    c.step_layers.resize(total);
    parallel_chunks(total, cfg.threads, [&](unsigned, std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) {
            const auto start = static_cast<NodeId>(k % n);
            Rng rng = make_rng(cfg.seed, k);
            auto& walk = c.walks[k];
            auto& layers = c.step_layers[k];
            walk.reserve(cfg.walk_length);
            walk.push_back(start);
            walk_one(start, rng, walk, layers);
        }
    });
    return c;
}

}  // namespace detail

/// Step t of every walk uses layer schema[t mod |schema|].
inline WalkCorpus metapath_walks(const MultilayerGraph& g, const MetapathSchema& schema, const WalkConfig& cfg) {
    schema.validate(g);
    const TransitionSampler sampler(g);
    return detail::generate_walks(
        g, cfg, "metapath", "schema=" + schema.to_string(g),
        [&](NodeId start, Rng& rng, std::vector<NodeId>& walk, std::vector<std::uint8_t>& layers) {
            NodeId cur = start;
            for (std::size_t t = 0; walk.size() < cfg.walk_length; ++t) {
                const auto l = schema.layers[t % schema.layers.size()];
                const auto next = sampler.step(l, cur, rng);
                if (!next) break;
                walk.push_back(*next);
                layers.push_back(static_cast<std::uint8_t>(l));
                cur = *next;
            }
        });
}

/// Walks start in a uniformly chosen layer containing the start node and
/// take a layer decision (see choose_layer) before every step.
inline WalkCorpus multilayer_walks(const MultilayerGraph& g, const WalkConfig& cfg) {
    const TransitionSampler sampler(g);
    char buf[48];
    std::snprintf(buf, sizeof buf, "stay_prob=%.17g", cfg.stay_prob);
    return detail::generate_walks(
        g, cfg, "multilayer", buf,
        [&](NodeId start, Rng& rng, std::vector<NodeId>& walk, std::vector<std::uint8_t>& layers) {
            std::size_t present[64];
            std::size_t np = 0;
            for (std::size_t l = 0; l < g.layer_count() && np < 64; ++l) {
                if (g.in_layer(l, start)) present[np++] = l;
            }
            if (np == 0) return;
            std::size_t layer = present[uniform_index(rng, np)];
            NodeId cur = start;
            while (walk.size() < cfg.walk_length) {
                layer = choose_layer(g, cur, layer, cfg.stay_prob, rng);
                const auto next = sampler.step(layer, cur, rng);
                if (!next) break;
                walk.push_back(*next);
                layers.push_back(static_cast<std::uint8_t>(layer));
                cur = *next;
            }
        });
}

/// Second-order (node2vec) transition from `cur` having arrived from `prev`
/// within one layer: weight w(cur, x) scaled by 1/p_ret when x == prev, by 1
/// when x is adjacent to prev, and by 1/q_io otherwise.
class Node2VecSampler {
public:
    Node2VecSampler(const MultilayerGraph& g, std::size_t layer, double p_ret, double q_io)
        : graph_(&g), layer_(layer), p_ret_(p_ret), q_io_(q_io), first_order_(g) {
        if (!(p_ret > 0 && q_io > 0)) throw Error("node2vec p and q must be > 0");
        if (layer >= g.layer_count()) throw Error("layer index out of range");
    }

    [[nodiscard]] std::optional<NodeId> first_step(NodeId u, Rng& rng) const {
        return first_order_.step(layer_, u, rng);
    }

    [[nodiscard]] std::optional<NodeId> step(NodeId prev, NodeId cur, Rng& rng) const {
        if (p_ret_ == 1.0 && q_io_ == 1.0) return first_order_.step(layer_, cur, rng);
        const auto edges = graph_->out_edges(layer_, cur);
        if (edges.empty()) return std::nullopt;
        double total = 0;
        std::vector<double> w(edges.size());
        for (std::size_t i = 0; i < edges.size(); ++i) {
            w[i] = edges[i].weight * bias(prev, edges[i].target);
            total += w[i];
        }
        double r = uniform01(rng) * total;
        for (std::size_t i = 0; i < edges.size(); ++i) {
            r -= w[i];
            if (r < 0) return edges[i].target;
        }
        return edges.back().target;
    }

private:
    [[nodiscard]] double bias(NodeId prev, NodeId x) const {
        if (x == prev) return 1.0 / p_ret_;
        if (graph_->edge_weight(layer_, prev, x) || graph_->edge_weight(layer_, x, prev)) return 1.0;
        return 1.0 / q_io_;
    }

    const MultilayerGraph* graph_;
    std::size_t layer_;
    double p_ret_;
    double q_io_;
    TransitionSampler first_order_;
};

inline WalkCorpus single_layer_walks(const MultilayerGraph& g, std::size_t layer, double p_ret, double q_io,
                                     const WalkConfig& cfg) {
    const Node2VecSampler sampler(g, layer, p_ret, q_io);
    char buf[80];
    std::snprintf(buf, sizeof buf, "layer=%s p=%.17g q=%.17g", g.layer(layer).name.c_str(), p_ret, q_io);
    return detail::generate_walks(
        g, cfg, "node2vec", buf,
        [&](NodeId start, Rng& rng, std::vector<NodeId>& walk, std::vector<std::uint8_t>& layers) {
            auto next = sampler.first_step(start, rng);
            while (next && walk.size() < cfg.walk_length) {
                walk.push_back(*next);
                layers.push_back(static_cast<std::uint8_t>(layer));
                if (walk.size() >= cfg.walk_length) break;
                next = sampler.step(walk[walk.size() - 2], walk.back(), rng);
            }
        });
}

// ---------------------------------------------------------------------------
// Corpus file: comment header, then one walk per line of space-separated ids.

inline std::string walk_header(const WalkCorpus& c) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "walks_per_node=%zu walk_length=%zu seed=%llu graph_hash=%016llx",
                  c.config.walks_per_node, c.config.walk_length,
                  static_cast<unsigned long long>(c.config.seed), static_cast<unsigned long long>(c.graph_hash));
    return "# strategy=" + c.strategy + " " + (c.params.empty() ? "" : c.params + " ") + buf;
}

inline void write_walks(std::ostream& out, const WalkCorpus& c, const Provenance* prov = nullptr) {
    if (prov != nullptr) out << prov->line() << '\n';
    out << walk_header(c) << '\n';
    for (const auto& w : c.walks) {
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (i) out << ' ';
            out << c.vocab[w[i]];
        }
        out << '\n';
    }
}

inline WalkCorpus read_walks(std::istream& in) {
    WalkCorpus c;
    std::unordered_map<std::string, NodeId> index;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# strategy=", 0) == 0) {
                const auto end = line.find(' ', 11);
                c.strategy = line.substr(11, end - 11);
            }
            continue;
        }
        std::istringstream ss(line);
        std::vector<NodeId> walk;
        std::string tok;
        while (ss >> tok) {
            auto [it, inserted] = index.emplace(tok, static_cast<NodeId>(c.vocab.size()));
            if (inserted) c.vocab.push_back(tok);
            walk.push_back(it->second);
        }
        c.walks.push_back(std::move(walk));
    }
    return c;
}

}  // namespace weaknet
