#pragma once

// Desk-scale synthetic data with planted hateful users: a two-layer
// stochastic block model over {hateful, neutral} and a post corpus whose
// replies/quotes follow the graph's edges.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "weaknet/common.hpp"
#include "weaknet/corpus.hpp"
#include "weaknet/graph.hpp"

namespace weaknet {

/// Directed edge probabilities by (source class, target class) for one layer.
struct LayerBlockSpec {
    double p_hh = 0.05;
    double p_hn = 0.01;
    double p_nh = 0.01;
    double p_nn = 0.05;
    /// Fraction of users that take part in this layer at all.
    double coverage = 1.0;
    /// Multiplies every edge weight drawn in this layer.
    double weight_scale = 1.0;
};

struct SynthSpec {
    std::size_t n_users = 500;
    double hateful_fraction = 0.2;
    std::array<LayerBlockSpec, 2> layers{};  // reply, quote

    /// Edge weights are uniform in [mean - spread, mean + spread], clipped to (0, 1).
    double weight_hh = 0.8;
    double weight_other = 0.3;
    double weight_spread = 0.1;

    // Corpus generation.
    std::size_t original_posts_per_user = 10;
    std::size_t tokens_per_post = 12;
    std::size_t neutral_vocab = 300;
    double indicator_rate_hateful = 0.5;
    double indicator_rate_neutral = 0.0;
    double context_rate_hateful = 0.4;
    double context_rate_neutral = 0.05;
    double positive_rate_hateful = 0.05;
    double positive_rate_neutral = 0.4;

    std::uint64_t seed = 1;

    void validate() const {
        if (n_users < 4) throw Error("synthetic spec needs at least 4 users");
        const auto prob = [](double p, const char* what) {
            if (!(p >= 0.0 && p <= 1.0)) throw Error(std::string(what) + " must lie in [0, 1]");
        };
        prob(hateful_fraction, "hateful_fraction");
        for (const auto& l : layers) {
            prob(l.p_hh, "p_hh");
            prob(l.p_hn, "p_hn");
            prob(l.p_nh, "p_nh");
            prob(l.p_nn, "p_nn");
            prob(l.coverage, "coverage");
            if (!(l.weight_scale > 0.0 && l.weight_scale <= 1.0)) throw Error("weight_scale must lie in (0, 1]");
        }
        for (double p : {indicator_rate_hateful, indicator_rate_neutral, context_rate_hateful, context_rate_neutral,
                         positive_rate_hateful, positive_rate_neutral}) {
            prob(p, "injection rate");
        }
        if (!(weight_hh > 0 && weight_other > 0 && weight_spread >= 0)) throw Error("edge weights must be positive");
    }
};

inline std::string synth_user_name(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "u%04zu", i);
    return buf;
}

/// Placeholder lexicon used by the synthetic corpus.
inline LexiconSet synth_lexicon() {
    return LexiconSet({"slur_a", "slur_b", "#hatetag", "coded phrase"}, {"topic_x", "topic_y", "topic z"},
                      {"love", "peace", "kindness"});
}

struct SynthGraph {
    MultilayerGraph graph;
    /// Planted class per user, indexed like graph nodes.
    std::vector<int> hateful;
};

inline std::vector<int> plant_classes(const SynthSpec& spec) {
    const auto n_h = static_cast<std::size_t>(std::llround(spec.hateful_fraction * static_cast<double>(spec.n_users)));
    std::vector<int> h(spec.n_users, 0);
    std::fill(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(std::min(n_h, spec.n_users)), 1);
    Rng rng = make_rng(spec.seed, 0xc1a55);
    std::shuffle(h.begin(), h.end(), rng);
    return h;
}

inline SynthGraph gen_multilayer_sbm(const SynthSpec& spec) {
    spec.validate();
    SynthGraph s;
    s.hateful = plant_classes(spec);
    for (std::size_t i = 0; i < spec.n_users; ++i) s.graph.add_node(synth_user_name(i));
    const char* names[2] = {"reply", "quote"};
    std::size_t edges = 0;
    for (std::size_t l = 0; l < 2; ++l) {
        const auto layer = s.graph.add_layer(names[l]);
        const auto& b = spec.layers[l];
        Rng rng = make_rng(spec.seed, 0x1a7e0 + l);
        std::vector<std::uint8_t> member(spec.n_users);
        for (auto& m : member) m = uniform01(rng) < b.coverage ? 1 : 0;
        for (std::size_t u = 0; u < spec.n_users; ++u) {
            if (!member[u]) continue;
            for (std::size_t v = 0; v < spec.n_users; ++v) {
                if (u == v || !member[v]) continue;
                const bool hu = s.hateful[u] != 0;
                const bool hv = s.hateful[v] != 0;
                const double p = hu ? (hv ? b.p_hh : b.p_hn) : (hv ? b.p_nh : b.p_nn);
                if (uniform01(rng) >= p) continue;
                const double mean = hu && hv ? spec.weight_hh : spec.weight_other;
                double w = mean + spec.weight_spread * (2.0 * uniform01(rng) - 1.0);
                w = std::clamp(w * b.weight_scale, 1e-3, 1.0 - 1e-3);
                s.graph.add_edge(layer, static_cast<NodeId>(u), static_cast<NodeId>(v), w);
                ++edges;
            }
        }
    }
    if (edges == 0) throw Error("synthetic graph has no edges");
    return s;
}

struct SynthCorpus {
    std::vector<Post> posts;
    std::vector<std::string> users;
    std::vector<int> hateful;
    LexiconSet lexicon;
};

/// Every user writes `original_posts_per_user` original posts plus one
/// reply/quote per out-edge of the planted graph. Each post draws neutral
/// tokens and, per its author's class, independently injects an indicator,
/// a context phrase and a positive phrase with the configured rates.
inline SynthCorpus gen_corpus(const SynthSpec& spec) {
    const SynthGraph sg = gen_multilayer_sbm(spec);
    SynthCorpus c;
    c.lexicon = synth_lexicon();
    c.hateful = sg.hateful;
    c.users = sg.graph.node_names();
    const auto indicators = c.lexicon.phrases(LexiconRole::indicator);
    const auto context = c.lexicon.phrases(LexiconRole::context);
    const auto positive = c.lexicon.phrases(LexiconRole::positive);

    Rng rng = make_rng(spec.seed, 0xc0a9);
    std::size_t next_id = 0;
    const auto make_text = [&](bool hateful) {
        std::vector<std::string> words;
        for (std::size_t t = 0; t < spec.tokens_per_post; ++t) {
            words.push_back("w" + std::to_string(uniform_index(rng, spec.neutral_vocab)));
        }
        const auto inject = [&](double rate, const std::vector<std::string>& pool) {
            if (uniform01(rng) < rate) {
                const auto pos = uniform_index(rng, words.size() + 1);
                words.insert(words.begin() + static_cast<std::ptrdiff_t>(pos), pool[uniform_index(rng, pool.size())]);
            }
        };
        inject(hateful ? spec.indicator_rate_hateful : spec.indicator_rate_neutral, indicators);
        inject(hateful ? spec.context_rate_hateful : spec.context_rate_neutral, context);
        inject(hateful ? spec.positive_rate_hateful : spec.positive_rate_neutral, positive);
        std::string text;
        for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
        return text;
    };
    const auto post_id = [&] {
        char buf[24];
        std::snprintf(buf, sizeof buf, "p%07zu", next_id++);
        return std::string(buf);
    };

    for (NodeId u = 0; u < sg.graph.node_count(); ++u) {
        const bool h = sg.hateful[u] != 0;
        for (std::size_t k = 0; k < spec.original_posts_per_user; ++k) {
            c.posts.push_back(Post{post_id(), c.users[u], PostType::original, std::nullopt, make_text(h)});
        }
        for (std::size_t l = 0; l < sg.graph.layer_count(); ++l) {
            for (const auto& e : sg.graph.out_edges(l, u)) {
                c.posts.push_back(Post{post_id(), c.users[u], l == 0 ? PostType::reply : PostType::quote,
                                       c.users[e.target], make_text(h)});
            }
        }
    }
    return c;
}

}  // namespace weaknet
