#pragma once

// Skip-gram node embeddings from walk corpora. Context pairs come from a
// symmetric window around each position; the softmax over all nodes is
// approximated by negative sampling from the unigram^0.75 distribution of
// walk tokens, or computed exactly for small graphs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "weaknet/common.hpp"
#include "weaknet/embed.hpp"
#include "weaknet/io.hpp"
#include "weaknet/sampling.hpp"
#include "weaknet/walks.hpp"

namespace weaknet {

struct SkipGramConfig {
    std::size_t dim = 128;
    std::size_t window = 5;
    std::size_t negatives = 5;
    std::size_t epochs = 5;
    double alpha = 0.025;
    double min_alpha = 0.0001;
    bool exact_softmax = false;
    std::uint64_t seed = 1;
    unsigned threads = 1;

    [[nodiscard]] std::string describe() const {
        char buf[160];
        std::snprintf(buf, sizeof buf, "dim=%zu window=%zu negatives=%zu epochs=%zu alpha=%g softmax=%s seed=%llu", dim,
                      window, negatives, epochs, alpha, exact_softmax ? "exact" : "negative-sampling",
                      static_cast<unsigned long long>(seed));
        return buf;
    }
};

namespace sgns {

/// Loss of one (input vector, targets) group where targets[k] has label
/// labels[k] (1 = observed context, 0 = noise):
///   -sum_k [ l_k log s(in.out_k) + (1 - l_k) log s(-in.out_k) ]
inline double loss(std::span<const float> in, std::span<const float> out, std::size_t dim,
                   std::span<const std::uint32_t> targets, std::span<const std::uint8_t> labels) {
    double total = 0;
    for (std::size_t k = 0; k < targets.size(); ++k) {
        const double x = dot<float>(in, out.subspan(targets[k] * dim, dim));
        // log s(x) = -log1p(exp(-x)), computed stably.
        const double z = labels[k] ? x : -x;
        total += z >= 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
    }
    return total;
}

/// Per-target derivative of `loss` with respect to in.out_k, s(x) - l_k.
/// Gradients follow as d/d in = sum_k coef_k out_k and d/d out_k = coef_k in.
inline void coefficients(std::span<const float> in, std::span<const float> out, std::size_t dim,
                         std::span<const std::uint32_t> targets, std::span<const std::uint8_t> labels,
                         std::span<double> coef) {
    for (std::size_t k = 0; k < targets.size(); ++k) {
        const double x = dot<float>(in, out.subspan(targets[k] * dim, dim));
        coef[k] = sigmoid(x) - (labels[k] ? 1.0 : 0.0);
    }
}

/// Full-softmax loss: -in.out_ctx + log sum_j exp(in.out_j).
inline double softmax_loss(std::span<const float> in, std::span<const float> out, std::size_t dim,
                           std::size_t vocab, std::uint32_t context) {
    std::vector<double> s(vocab);
    for (std::size_t j = 0; j < vocab; ++j) s[j] = dot<float>(in, out.subspan(j * dim, dim));
    const double m = *std::max_element(s.begin(), s.end());
    double z = 0;
    for (double v : s) z += std::exp(v - m);
    return -s[context] + m + std::log(z);
}

/// d softmax_loss / d (in.out_j) = softmax_j - [j == context].
inline void softmax_coefficients(std::span<const float> in, std::span<const float> out, std::size_t dim,
                                 std::size_t vocab, std::uint32_t context, std::span<double> coef) {
    double m = -1e300;
    for (std::size_t j = 0; j < vocab; ++j) {
        coef[j] = dot<float>(in, out.subspan(j * dim, dim));
        m = std::max(m, coef[j]);
    }
    double z = 0;
    for (std::size_t j = 0; j < vocab; ++j) {
        coef[j] = std::exp(coef[j] - m);
        z += coef[j];
    }
    for (std::size_t j = 0; j < vocab; ++j) coef[j] /= z;
    coef[context] -= 1.0;
}

/// Gradient-descent step with the coefficients above: moves `in` and the
/// target rows of `out` by -alpha * gradient. The `in` update uses the
/// pre-step output vectors.
inline void apply(std::span<float> in, std::span<float> out, std::size_t dim, std::span<const std::uint32_t> targets,
                  std::span<const double> coef, double alpha, std::span<float> scratch) {
    std::fill(scratch.begin(), scratch.end(), 0.0F);
    for (std::size_t k = 0; k < targets.size(); ++k) {
        if (coef[k] == 0.0) continue;
        auto o = out.subspan(targets[k] * dim, dim);
        const double g = -alpha * coef[k];
        for (std::size_t c = 0; c < dim; ++c) {
            scratch[c] += static_cast<float>(g * o[c]);
            o[c] += static_cast<float>(g * in[c]);
        }
    }
    for (std::size_t c = 0; c < dim; ++c) in[c] += scratch[c];
}

}  // namespace sgns

struct SkipGramResult {
    NodeEmbeddings embeddings;
    std::vector<double> epoch_loss;
};

inline SkipGramResult train_skipgram(const WalkCorpus& corpus, const SkipGramConfig& cfg) {
    if (cfg.dim < 2) throw Error("embedding dimension must be >= 2");
    if (cfg.window < 1) throw Error("window must be >= 1");
    const std::size_t vocab = corpus.vocab.size();
    std::vector<std::uint64_t> counts(vocab, 0);
    std::uint64_t pairs_per_epoch = 0;
    for (const auto& w : corpus.walks) {
        // Single-node walks carry no context pairs.
        if (w.size() < 2) continue;
        for (auto t : w) ++counts.at(t);
        for (std::size_t i = 0; i < w.size(); ++i) {
            const std::size_t lo = i >= cfg.window ? i - cfg.window : 0;
            const std::size_t hi = std::min(w.size() - 1, i + cfg.window);
            pairs_per_epoch += hi - lo;
        }
    }
    if (pairs_per_epoch == 0) throw Error("empty corpus");
    const std::size_t d = cfg.dim;

    std::vector<float> in(vocab * d);
    std::vector<float> out(vocab * d, 0.0F);
    {
        Rng rng = make_rng(cfg.seed, 0x5ee);
        for (auto& v : in) v = static_cast<float>((uniform01(rng) - 0.5) / static_cast<double>(d));
    }
    const AliasTable noise = make_noise_table(counts);
    const unsigned threads = std::max(1U, cfg.threads);
    const std::uint64_t schedule = pairs_per_epoch * cfg.epochs;

    SkipGramResult result;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::vector<double> loss(threads, 0.0);
        std::vector<std::uint64_t> done(threads, 0);
        parallel_chunks(corpus.walks.size(), threads, [&](unsigned wk, std::size_t b, std::size_t e) {
            Rng rng = make_rng(cfg.seed, (epoch + 1) * 7919ULL + wk);
            std::vector<std::uint32_t> targets(cfg.exact_softmax ? vocab : cfg.negatives + 1);
            std::vector<std::uint8_t> labels(targets.size(), 0);
            std::vector<double> coef(targets.size());
            std::vector<float> scratch(d);
            if (cfg.exact_softmax) std::iota(targets.begin(), targets.end(), 0U);
            for (std::size_t wi = b; wi < e; ++wi) {
                const auto& walk = corpus.walks[wi];
                for (std::size_t i = 0; i < walk.size(); ++i) {
                    const std::size_t lo = i >= cfg.window ? i - cfg.window : 0;
                    const std::size_t hi = std::min(walk.size() - 1, i + cfg.window);
                    std::span<float> vin(in.data() + walk[i] * d, d);
                    for (std::size_t j = lo; j <= hi; ++j) {
                        if (j == i) continue;
                        const auto ctx = walk[j];
                        const double a = std::max(
                            cfg.min_alpha,
                            cfg.alpha * (1.0 - static_cast<double>(epoch * pairs_per_epoch + done[wk] * threads) /
                                                   static_cast<double>(schedule)));
                        if (cfg.exact_softmax) {
                            loss[wk] += sgns::softmax_loss(vin, out, d, vocab, ctx);
                            sgns::softmax_coefficients(vin, out, d, vocab, ctx, coef);
                            sgns::apply(vin, out, d, targets, coef, a, scratch);
                        } else {
                            std::size_t n = 0;
                            targets[n] = ctx;
                            labels[n++] = 1;
                            for (std::size_t k = 0; k < cfg.negatives; ++k) {
                                const auto neg = noise.sample(rng);
                                if (neg == ctx) continue;
                                targets[n] = neg;
                                labels[n++] = 0;
                            }
                            const std::span<const std::uint32_t> t(targets.data(), n);
                            const std::span<const std::uint8_t> l(labels.data(), n);
                            loss[wk] += sgns::loss(vin, out, d, t, l);
                            sgns::coefficients(vin, out, d, t, l, std::span<double>(coef.data(), n));
                            sgns::apply(vin, out, d, t, std::span<const double>(coef.data(), n), a, scratch);
                        }
                        ++done[wk];
                    }
                }
            }
        });
        const auto pairs = std::accumulate(done.begin(), done.end(), std::uint64_t{0});
        result.epoch_loss.push_back(std::accumulate(loss.begin(), loss.end(), 0.0) / static_cast<double>(pairs));
        if (!all_finite<float>(in) || !all_finite<float>(out)) {
            throw Error("non-finite embedding after epoch " + std::to_string(epoch + 1));
        }
    }

    std::vector<std::string> ids;
    std::vector<float> data;
    for (std::size_t v = 0; v < vocab; ++v) {
        if (counts[v] == 0) continue;
        ids.push_back(corpus.vocab[v]);
        data.insert(data.end(), in.begin() + static_cast<std::ptrdiff_t>(v * d),
                    in.begin() + static_cast<std::ptrdiff_t>((v + 1) * d));
    }
    result.embeddings = NodeEmbeddings(std::move(ids), d, std::move(data));
    result.embeddings.provenance = "method=skipgram walks=" + corpus.strategy + " " + cfg.describe();
    return result;
}

}  // namespace weaknet
