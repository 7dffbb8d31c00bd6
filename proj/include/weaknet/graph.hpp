#pragma once

// Directed weighted multilayer graph over a single node registry.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "weaknet/common.hpp"
#include "weaknet/corpus.hpp"
#include "weaknet/io.hpp"
#include "weaknet/weakscore.hpp"

namespace weaknet {

using NodeId = std::uint32_t;

struct Edge {
    NodeId target;
    double weight;

    friend bool operator==(const Edge&, const Edge&) = default;
};

struct Layer {
    std::string name;
    /// Out-edges per node, sorted by target.
    std::vector<std::vector<Edge>> out;
    /// Node touches at least one edge of this layer.
    std::vector<std::uint8_t> present;
};

class MultilayerGraph {
public:
    NodeId add_node(const std::string& name) {
        if (const auto it = index_.find(name); it != index_.end()) return it->second;
        const auto id = static_cast<NodeId>(names_.size());
        names_.push_back(name);
        index_.emplace(name, id);
        for (auto& l : layers_) {
            l.out.emplace_back();
            l.present.push_back(0);
        }
        return id;
    }

    [[nodiscard]] std::optional<NodeId> find(const std::string& name) const {
        const auto it = index_.find(name);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t add_layer(std::string name) {
        if (layer_index(name)) throw Error("duplicate layer '" + name + "'");
        Layer l{std::move(name), std::vector<std::vector<Edge>>(names_.size()),
                std::vector<std::uint8_t>(names_.size(), 0)};
        layers_.push_back(std::move(l));
        return layers_.size() - 1;
    }

    [[nodiscard]] std::optional<std::size_t> layer_index(std::string_view name) const {
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            if (layers_[i].name == name) return i;
        }
        return std::nullopt;
    }

    void add_edge(std::size_t layer, NodeId u, NodeId v, double w) {
        if (!(std::isfinite(w) && w > 0)) throw Error("edge weights must be finite and > 0");
        auto& l = layers_.at(layer);
        auto& adj = l.out.at(u);
        const auto it = std::lower_bound(adj.begin(), adj.end(), v,
                                         [](const Edge& e, NodeId t) { return e.target < t; });
        if (it != adj.end() && it->target == v) {
            throw Error("duplicate edge " + names_[u] + " -> " + names_[v] + " in layer " + l.name);
        }
        adj.insert(it, Edge{v, w});
        l.present.at(u) = 1;
        l.present.at(v) = 1;
    }

    [[nodiscard]] std::size_t node_count() const { return names_.size(); }
    [[nodiscard]] std::size_t layer_count() const { return layers_.size(); }
    [[nodiscard]] const Layer& layer(std::size_t i) const { return layers_.at(i); }
    Layer& mutable_layer(std::size_t i) { return layers_.at(i); }
    [[nodiscard]] const std::string& node_name(NodeId id) const { return names_.at(id); }
    [[nodiscard]] const std::vector<std::string>& node_names() const { return names_; }

    [[nodiscard]] bool in_layer(std::size_t layer, NodeId u) const { return layers_[layer].present[u] != 0; }

    [[nodiscard]] std::span<const Edge> out_edges(std::size_t layer, NodeId u) const {
        return layers_[layer].out[u];
    }

    [[nodiscard]] std::size_t edge_count(std::size_t layer) const {
        std::size_t n = 0;
        for (const auto& adj : layers_[layer].out) n += adj.size();
        return n;
    }

    [[nodiscard]] std::size_t layer_node_count(std::size_t layer) const {
        return static_cast<std::size_t>(std::count(layers_[layer].present.begin(), layers_[layer].present.end(), 1));
    }

    [[nodiscard]] std::optional<double> edge_weight(std::size_t layer, NodeId u, NodeId v) const {
        const auto& adj = layers_[layer].out[u];
        const auto it = std::lower_bound(adj.begin(), adj.end(), v,
                                         [](const Edge& e, NodeId t) { return e.target < t; });
        if (it == adj.end() || it->target != v) return std::nullopt;
        return it->weight;
    }

    /// Order-sensitive digest of node names, layer names and weighted edges.
    [[nodiscard]] std::uint64_t hash() const {
        std::uint64_t h = fnv1a("weaknet-graph");
        for (const auto& n : names_) h = fnv1a(n + '\n', h);
        for (const auto& l : layers_) {
            h = fnv1a("layer:" + l.name + '\n', h);
            for (std::size_t u = 0; u < l.out.size(); ++u) {
                for (const auto& e : l.out[u]) {
                    h = fnv1a(std::to_string(u) + ' ' + std::to_string(e.target) + ' ' + format_double(e.weight) + '\n',
                              h);
                }
            }
        }
        return h;
    }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, NodeId> index_;
    std::vector<Layer> layers_;
};

enum class Aggregation { mean, max, sum };

inline Aggregation parse_aggregation(std::string_view s) {
    if (s == "mean") return Aggregation::mean;
    if (s == "max") return Aggregation::max;
    if (s == "sum") return Aggregation::sum;
    throw Error("unknown aggregation '" + std::string(s) + "'");
}

/// Two layers, reply then quote. Repeated (source, target) pairs within a
/// layer collapse into one edge whose weight aggregates their scores.
inline MultilayerGraph build_interaction_graph(std::span<const ScoredInteraction> scored,
                                               Aggregation agg = Aggregation::mean) {
    if (scored.empty()) throw Error("cannot build a graph from an empty interaction stream");
    MultilayerGraph g;
    g.add_layer("reply");
    g.add_layer("quote");
    struct Acc {
        double sum = 0;
        double max = 0;
        std::uint64_t n = 0;
    };
    std::map<std::tuple<std::size_t, NodeId, NodeId>, Acc> acc;
    for (const auto& s : scored) {
        if (!(std::isfinite(s.score) && s.score > 0)) throw Error("interaction score must be finite and > 0");
        const NodeId u = g.add_node(s.source);
        const NodeId v = g.add_node(s.target);
        if (u == v) continue;
        auto& a = acc[{static_cast<std::size_t>(s.layer), u, v}];
        a.sum += s.score;
        a.max = std::max(a.max, s.score);
        ++a.n;
    }
    for (const auto& [key, a] : acc) {
        const auto [layer, u, v] = key;
        double w = a.sum / static_cast<double>(a.n);
        if (agg == Aggregation::max) w = a.max;
        if (agg == Aggregation::sum) w = a.sum;
        g.add_edge(layer, u, v, w);
    }
    return g;
}

/// Per node and layer, rescales out-weights to sum to 1.
inline MultilayerGraph normalize_out_weights(MultilayerGraph g) {
    for (std::size_t l = 0; l < g.layer_count(); ++l) {
        for (auto& adj : g.mutable_layer(l).out) {
            double total = 0;
            for (const auto& e : adj) total += e.weight;
            if (total <= 0) continue;
            for (auto& e : adj) e.weight /= total;
        }
    }
    return g;
}

/// Every edge weight set to 1; the topology-only control.
inline MultilayerGraph unweighted(MultilayerGraph g) {
    for (std::size_t l = 0; l < g.layer_count(); ++l) {
        for (auto& adj : g.mutable_layer(l).out) {
            for (auto& e : adj) e.weight = 1.0;
        }
    }
    return g;
}

/// Union of all layers as a single layer "flat": an edge present in several
/// layers gets the mean of its weights, then out-weights are normalized.
inline MultilayerGraph flatten(const MultilayerGraph& g) {
    MultilayerGraph f;
    for (const auto& n : g.node_names()) f.add_node(n);
    const auto flat = f.add_layer("flat");
    for (NodeId u = 0; u < g.node_count(); ++u) {
        std::map<NodeId, std::pair<double, int>> merged;
        for (std::size_t l = 0; l < g.layer_count(); ++l) {
            for (const auto& e : g.out_edges(l, u)) {
                auto& m = merged[e.target];
                m.first += e.weight;
                ++m.second;
            }
        }
        for (const auto& [v, m] : merged) f.add_edge(flat, u, v, m.first / m.second);
    }
    return normalize_out_weights(std::move(f));
}

/// Keeps only nodes whose name satisfies `keep`, preserving registry order.
template <typename Pred>
MultilayerGraph induce_subgraph(const MultilayerGraph& g, Pred&& keep) {
    MultilayerGraph s;
    std::vector<std::optional<NodeId>> remap(g.node_count());
    for (NodeId u = 0; u < g.node_count(); ++u) {
        if (keep(g.node_name(u))) remap[u] = s.add_node(g.node_name(u));
    }
    for (std::size_t l = 0; l < g.layer_count(); ++l) {
        const auto sl = s.add_layer(g.layer(l).name);
        for (NodeId u = 0; u < g.node_count(); ++u) {
            if (!remap[u]) continue;
            for (const auto& e : g.out_edges(l, u)) {
                if (remap[e.target]) s.add_edge(sl, *remap[u], *remap[e.target], e.weight);
            }
        }
    }
    return s;
}

struct UserLabel {
    std::string user;
    bool hateful = false;
    std::uint64_t indicator_count = 0;
};

/// Sums indicator hits over each author's posts; hateful iff the total
/// reaches z. Users listed in `also_include` without posts get count 0.
inline std::vector<UserLabel> label_users(std::span<const Post> posts, const LexiconSet& lexicon, std::uint64_t z,
                                          std::span<const std::string> also_include = {}) {
    if (z < 1) throw Error("z must be >= 1");
    std::map<std::string, std::uint64_t> totals;
    for (const auto& u : also_include) totals.emplace(u, 0);
    for (const auto& p : posts) {
        totals[p.author] += count_indicators(tokenize(p.text), lexicon).n_plus;
    }
    std::vector<UserLabel> out;
    out.reserve(totals.size());
    for (const auto& [user, count] : totals) out.push_back(UserLabel{user, count >= z, count});
    return out;
}

// ---------------------------------------------------------------------------
// File formats: manifest.json + nodes.txt + one `source target weight` TSV per layer.

inline void write_graph(const std::filesystem::path& dir, const MultilayerGraph& g, const Provenance& prov) {
    std::filesystem::create_directories(dir);
    nlohmann::json manifest;
    manifest["directed"] = true;
    manifest["provenance"] = prov.line();
    manifest["graph_hash"] = std::to_string(g.hash());
    manifest["nodes"] = "nodes.txt";
    {
        auto out = open_output((dir / "nodes.txt").string());
        out << prov.line() << '\n';
        for (const auto& n : g.node_names()) out << n << '\n';
    }
    manifest["layers"] = nlohmann::json::array();
    for (std::size_t l = 0; l < g.layer_count(); ++l) {
        const std::string file = g.layer(l).name + ".tsv";
        manifest["layers"].push_back({{"name", g.layer(l).name}, {"file", file}});
        auto out = open_output((dir / file).string());
        out << prov.line() << '\n';
        for (NodeId u = 0; u < g.node_count(); ++u) {
            for (const auto& e : g.out_edges(l, u)) {
                out << g.node_name(u) << '\t' << g.node_name(e.target) << '\t' << format_double(e.weight) << '\n';
            }
        }
    }
    auto out = open_output((dir / "manifest.json").string());
    out << manifest.dump(2) << '\n';
}

inline MultilayerGraph read_graph(const std::filesystem::path& manifest_path) {
    auto in = open_input(manifest_path.string());
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed manifest " + manifest_path.string() + ": " + e.what());
    }
    const auto dir = manifest_path.parent_path();
    MultilayerGraph g;
    if (manifest.contains("nodes")) {
        auto nodes = open_input((dir / manifest["nodes"].get<std::string>()).string());
        std::string line;
        while (std::getline(nodes, line)) {
            if (!line.empty() && line[0] != '#') g.add_node(line);
        }
    }
    for (const auto& entry : manifest.at("layers")) {
        const auto l = g.add_layer(entry.at("name").get<std::string>());
        auto file = open_input((dir / entry.at("file").get<std::string>()).string());
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(file, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#') continue;
            const auto t1 = line.find('\t');
            const auto t2 = line.find('\t', t1 + 1);
            if (t1 == std::string::npos || t2 == std::string::npos) {
                throw Error(entry.at("file").get<std::string>() + " line " + std::to_string(lineno) +
                            ": expected source, target, weight");
            }
            const NodeId u = g.add_node(line.substr(0, t1));
            const NodeId v = g.add_node(line.substr(t1 + 1, t2 - t1 - 1));
            g.add_edge(l, u, v, std::stod(line.substr(t2 + 1)));
        }
    }
    if (g.layer_count() == 0) throw Error("graph manifest lists no layers");
    return g;
}

inline void write_labels_tsv(std::ostream& out, std::span<const UserLabel> labels, const Provenance* prov = nullptr) {
    if (prov != nullptr) out << prov->line() << '\n';
    for (const auto& l : labels) {
        out << l.user << '\t' << (l.hateful ? 1 : 0) << '\t' << l.indicator_count << '\n';
    }
}

inline std::vector<UserLabel> read_labels_tsv(std::istream& in) {
    std::vector<UserLabel> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        UserLabel l;
        int h = 0;
        if (!(ss >> l.user >> h >> l.indicator_count)) throw Error("malformed labels line: " + line);
        l.hateful = h != 0;
        out.push_back(std::move(l));
    }
    return out;
}

}  // namespace weaknet
