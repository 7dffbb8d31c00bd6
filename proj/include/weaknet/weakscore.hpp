#pragma once

// Lexicon-derived score bounds, the weak-supervision loss, the linear
// logistic scorer trained against it, and interaction scoring.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "weaknet/common.hpp"
#include "weaknet/corpus.hpp"
#include "weaknet/docvec.hpp"
#include "weaknet/io.hpp"

namespace weaknet {

struct Bounds {
    double lower = 0.0;
    double upper = 1.0;

    [[nodiscard]] bool feasible() const { return lower <= upper; }
};

enum class BoundsVariant {
    /// lower = 2 n+/n + nctx/n, upper = 1 - n-/n
    contextual,
    /// Baseline without context phrases: indicators and positives weighted
    /// equally over n = n+ + n-, i.e. lower = n+/n, upper = 1 - n-/n.
    original,
};

inline BoundsVariant parse_bounds_variant(std::string_view s) {
    if (s == "contextual") return BoundsVariant::contextual;
    if (s == "original") return BoundsVariant::original;
    throw Error("unknown bounds variant '" + std::string(s) + "'");
}

/// Messages without key phrases get the vacuous interval [0, 1].
inline Bounds compute_bounds(const IndicatorCounts& c, BoundsVariant variant = BoundsVariant::contextual) {
    if (variant == BoundsVariant::original) {
        const std::uint32_t n = c.n_plus + c.n_minus;
        if (n == 0) return {};
        const double nd = n;
        return {c.n_plus / nd, 1.0 - c.n_minus / nd};
    }
    if (c.n == 0) return {};
    const double n = c.n;
    return {2.0 * c.n_plus / n + c.n_ctx / n, 1.0 - c.n_minus / n};
}

inline constexpr double kLossEpsilon = 1e-12;

/// -log(min{1, 1 + upper - y}) - log(min{1, 1 + y - lower}); zero inside
/// [lower, upper]. Log arguments are clamped below at 1e-12.
inline double weak_loss(double y, const Bounds& b) {
    const double above = std::max(kLossEpsilon, std::min(1.0, 1.0 + b.upper - y));
    const double below = std::max(kLossEpsilon, std::min(1.0, 1.0 + y - b.lower));
    // Leading 0.0 keeps in-bounds results at +0.0 rather than -0.0.
    return 0.0 - std::log(above) - std::log(below);
}

/// d weak_loss / dy (one-sided where the min/clamp switches).
inline double weak_loss_dy(double y, const Bounds& b) {
    double g = 0;
    const double above = 1.0 + b.upper - y;
    if (above < 1.0 && above > kLossEpsilon) g += 1.0 / above;
    const double below = 1.0 + y - b.lower;
    if (below < 1.0 && below > kLossEpsilon) g -= 1.0 / below;
    return g;
}

/// Loss as a function of the pre-logistic activation z, y = sigmoid(z).
inline double weak_loss_logit(double z, const Bounds& b) { return weak_loss(sigmoid(z), b); }

inline double weak_loss_logit_dz(double z, const Bounds& b) {
    const double y = sigmoid(z);
    return weak_loss_dy(y, b) * y * (1.0 - y);
}

struct ScorerModel {
    std::vector<double> weights;
    double bias = 0.0;

    [[nodiscard]] double logit(std::span<const float> x) const {
        double z = bias;
        for (std::size_t i = 0; i < weights.size(); ++i) z += weights[i] * static_cast<double>(x[i]);
        return z;
    }
    /// Kept strictly inside (0, 1) even where the logistic saturates in double.
    [[nodiscard]] double score(std::span<const float> x) const { return squash(logit(x)); }

    static double squash(double z) { return std::clamp(sigmoid(z), 1e-15, 1.0 - 1e-15); }
};

struct ScorerConfig {
    std::size_t batch = 256;
    std::size_t epochs = 5;
    double rate = 0.01;
    /// Fraction of messages visited per epoch.
    double sample_rate = 1.0;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct ScorerTrainResult {
    ScorerModel model;
    double final_mean_loss = 0.0;
    std::vector<double> epoch_loss;
};

inline double mean_weak_loss(const ScorerModel& m, std::span<const std::vector<float>> vectors,
                             std::span<const Bounds> bounds) {
    if (vectors.empty()) return 0.0;
    double total = 0;
    for (std::size_t i = 0; i < vectors.size(); ++i) total += weak_loss(m.score(vectors[i]), bounds[i]);
    return total / static_cast<double>(vectors.size());
}

/// Minibatch SGD on the mean weak loss. Per-batch gradients are reduced in
/// message order, so results do not depend on the worker count.
inline ScorerTrainResult train_scorer(std::span<const std::vector<float>> vectors, std::span<const Bounds> bounds,
                                      const ScorerConfig& config) {
    if (vectors.size() != bounds.size()) throw Error("vector and bounds streams have different lengths");
    if (vectors.empty()) throw Error("empty corpus");
    if (config.batch == 0) throw Error("batch size must be positive");
    const std::size_t d = vectors.front().size();
    for (const auto& v : vectors) {
        if (v.size() != d) throw Error("document vectors have inconsistent dimension");
    }

    ScorerTrainResult r;
    r.model.weights.assign(d, 0.0);
    std::vector<std::size_t> order(vectors.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng = make_rng(config.seed, 0x5c0);
    const auto per_epoch = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(config.sample_rate * static_cast<double>(order.size()))));
    const unsigned threads = std::max(1U, config.threads);

    std::vector<double> grad(d + 1);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < per_epoch; start += config.batch) {
            const std::size_t end = std::min(per_epoch, start + config.batch);
            std::vector<std::vector<double>> partial(threads, std::vector<double>(d + 1, 0.0));
            parallel_chunks(end - start, threads, [&](unsigned w, std::size_t b, std::size_t e) {
                auto& g = partial[w];
                for (std::size_t k = start + b; k < start + e; ++k) {
                    const auto& x = vectors[order[k]];
                    const double dz = weak_loss_logit_dz(r.model.logit(x), bounds[order[k]]);
                    if (dz == 0.0) continue;
                    for (std::size_t i = 0; i < d; ++i) g[i] += dz * static_cast<double>(x[i]);
                    g[d] += dz;
                }
            });
            std::fill(grad.begin(), grad.end(), 0.0);
            for (const auto& g : partial) {
                for (std::size_t i = 0; i <= d; ++i) grad[i] += g[i];
            }
            const double scale = config.rate / static_cast<double>(end - start);
            for (std::size_t i = 0; i < d; ++i) r.model.weights[i] -= scale * grad[i];
            r.model.bias -= scale * grad[d];
        }
        r.epoch_loss.push_back(mean_weak_loss(r.model, vectors, bounds));
    }
    r.final_mean_loss = r.epoch_loss.empty() ? mean_weak_loss(r.model, vectors, bounds) : r.epoch_loss.back();
    return r;
}

struct ScoredInteraction {
    std::string source;
    std::string target;
    InteractionLayer layer = InteractionLayer::reply;
    double score = 0.5;
    std::string post_id;
    /// Message had no in-vocabulary tokens; score is logistic(bias).
    bool out_of_vocabulary = false;
};

inline std::vector<ScoredInteraction> score_interactions(const ScorerModel& model,
                                                         std::span<const Interaction> interactions,
                                                         const DocEmbeddingModel& doc_model, unsigned threads = 1) {
    std::vector<ScoredInteraction> out(interactions.size());
    parallel_chunks(interactions.size(), threads, [&](unsigned, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const auto& it = interactions[i];
            const auto v = infer_doc_vector(doc_model, it.message_tokens);
            const double s = v.out_of_vocabulary ? ScorerModel::squash(model.bias) : model.score(v.values);
            out[i] = ScoredInteraction{it.source, it.target, it.layer, s, it.post_id, v.out_of_vocabulary};
        }
    });
    return out;
}

/// Highest scores first; ties by post_id ascending.
inline std::vector<ScoredInteraction> rank_top_k(std::span<const ScoredInteraction> scored, std::size_t k) {
    if (k == 0) throw Error("k must be >= 1");
    std::vector<ScoredInteraction> v(scored.begin(), scored.end());
    const auto cmp = [](const ScoredInteraction& a, const ScoredInteraction& b) {
        return a.score != b.score ? a.score > b.score : a.post_id < b.post_id;
    };
    const std::size_t keep = std::min(k, v.size());
    std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(keep), v.end(), cmp);
    v.resize(keep);
    return v;
}

struct HistogramBin {
    double left = 0.0;
    std::uint64_t count = 0;
};

/// Equal-width bins over [0, 1].
inline std::vector<HistogramBin> score_histogram(std::span<const double> scores, std::size_t bins = 20) {
    if (bins == 0) throw Error("histogram needs at least one bin");
    std::vector<HistogramBin> h(bins);
    for (std::size_t i = 0; i < bins; ++i) h[i].left = static_cast<double>(i) / static_cast<double>(bins);
    for (double s : scores) {
        auto i = static_cast<std::size_t>(s * static_cast<double>(bins));
        h[std::min(i, bins - 1)].count++;
    }
    return h;
}

// ---------------------------------------------------------------------------
// File formats

inline void write_scores_tsv(std::ostream& out, std::span<const ScoredInteraction> scored,
                             const Provenance* prov = nullptr) {
    if (prov != nullptr) out << prov->line() << '\n';
    for (const auto& s : scored) {
        out << s.source << '\t' << s.target << '\t' << to_string(s.layer) << '\t' << format_double(s.score) << '\t'
            << s.post_id << '\n';
    }
}

inline std::vector<ScoredInteraction> read_scores_tsv(std::istream& in) {
    std::vector<ScoredInteraction> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> f;
        std::size_t pos = 0;
        while (true) {
            const auto tab = line.find('\t', pos);
            f.push_back(line.substr(pos, tab - pos));
            if (tab == std::string::npos) break;
            pos = tab + 1;
        }
        if (f.size() != 5) throw Error("scores line " + std::to_string(lineno) + ": expected 5 fields");
        ScoredInteraction s{f[0], f[1], parse_layer(f[2]), std::stod(f[3]), f[4], false};
        if (!(s.score > 0.0 && s.score < 1.0)) {
            throw Error("scores line " + std::to_string(lineno) + ": score outside (0,1)");
        }
        out.push_back(std::move(s));
    }
    return out;
}

inline void write_histogram_csv(std::ostream& out, std::span<const HistogramBin> h, const Provenance* prov = nullptr) {
    if (prov != nullptr) out << prov->line() << '\n';
    out << "bin_left,count\n";
    for (const auto& b : h) out << format_double(b.left, 6) << ',' << b.count << '\n';
}

inline void save_scorer(std::ostream& out, const ScorerModel& m, const Provenance* prov = nullptr) {
    if (prov != nullptr) out << prov->line() << '\n';
    out << m.weights.size() << ' ' << format_double(m.bias) << '\n';
    for (std::size_t i = 0; i < m.weights.size(); ++i) out << (i ? " " : "") << format_double(m.weights[i]);
    out << '\n';
}

inline ScorerModel load_scorer(std::istream& in) {
    ScorerModel m;
    std::size_t d = 0;
    while (in >> std::ws && in.peek() == '#') in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    if (!(in >> d >> m.bias)) throw Error("malformed scorer file");
    m.weights.resize(d);
    for (auto& w : m.weights) {
        if (!(in >> w)) throw Error("malformed scorer file");
    }
    return m;
}

}  // namespace weaknet
