#pragma once

// Paragraph vectors, distributed bag-of-words variant (PV-DBOW) trained with
// negative sampling. A document vector predicts each of its tokens; token
// output vectors are shared across documents and frozen at inference time.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "weaknet/common.hpp"
#include "weaknet/corpus.hpp"
#include "weaknet/io.hpp"
#include "weaknet/sampling.hpp"

namespace weaknet {

struct DocModelConfig {
    std::size_t dim = 100;
    std::size_t negatives = 5;
    std::size_t epochs = 10;
    double alpha = 0.025;
    double min_alpha = 0.0001;
    std::uint64_t min_count = 2;
    std::size_t infer_epochs = 50;
    std::uint64_t seed = 1;
    unsigned threads = 1;

    [[nodiscard]] std::uint64_t hash() const {
        std::string s = std::to_string(dim) + "/" + std::to_string(negatives) + "/" + std::to_string(epochs) + "/" +
                        format_double(alpha) + "/" + format_double(min_alpha) + "/" + std::to_string(min_count) +
                        "/" + std::to_string(infer_epochs) + "/" + std::to_string(seed);
        return fnv1a(s);
    }
};

class DocEmbeddingModel {
public:
    DocEmbeddingModel() = default;

    DocEmbeddingModel(std::vector<std::string> vocab, std::vector<std::uint64_t> counts, std::size_t dim,
                      DocModelConfig config)
        : words_(std::move(vocab)), counts_(std::move(counts)), dim_(dim), config_(config) {
        if (words_.size() != counts_.size()) throw Error("vocab/count size mismatch");
        index_.reserve(words_.size());
        for (std::size_t i = 0; i < words_.size(); ++i) {
            index_.emplace(words_[i], static_cast<std::uint32_t>(i));
        }
        token_vectors_.assign(words_.size() * dim_, 0.0F);
        if (!words_.empty()) noise_ = make_noise_table(counts_);
    }

    [[nodiscard]] std::size_t dim() const { return dim_; }
    [[nodiscard]] std::size_t vocab_size() const { return words_.size(); }
    [[nodiscard]] const std::vector<std::string>& vocab() const { return words_; }
    [[nodiscard]] const std::vector<std::uint64_t>& counts() const { return counts_; }
    [[nodiscard]] const DocModelConfig& config() const { return config_; }
    [[nodiscard]] const AliasTable& noise() const { return noise_; }

    [[nodiscard]] std::int64_t find(const std::string& token) const {
        const auto it = index_.find(token);
        return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
    }

    std::span<float> token_vector(std::size_t i) { return {token_vectors_.data() + i * dim_, dim_}; }
    [[nodiscard]] std::span<const float> token_vector(std::size_t i) const {
        return {token_vectors_.data() + i * dim_, dim_};
    }
    [[nodiscard]] std::span<const float> token_matrix() const { return token_vectors_; }
    std::vector<float>& mutable_token_matrix() { return token_vectors_; }

    std::string provenance;

private:
    std::vector<std::string> words_;
    std::vector<std::uint64_t> counts_;
    std::unordered_map<std::string, std::uint32_t> index_;
    std::size_t dim_ = 0;
    DocModelConfig config_;
    std::vector<float> token_vectors_;
    AliasTable noise_;
};

namespace detail {

// One negative-sampling update of `doc` against target token `target`.
// Accumulates the doc gradient into `doc_grad` and, when `tokens_out` is
// non-null, writes token-vector updates through it. Returns the pair's
// negative log-likelihood.
inline double pvdbow_step(std::span<const float> doc, std::span<float> doc_grad, std::span<const float> tokens,
                          float* tokens_out, const AliasTable& noise, std::uint32_t target, std::size_t negatives,
                          double alpha, Rng& rng) {
    const std::size_t d = doc.size();
    double loss = 0;
    for (std::size_t k = 0; k <= negatives; ++k) {
        std::uint32_t t = target;
        double label = 1.0;
        if (k > 0) {
            t = noise.sample(rng);
            if (t == target) continue;
            label = 0.0;
        }
        const auto out = tokens.subspan(t * d, d);
        const double f = sigmoid(dot<float>(doc, out));
        loss -= label > 0 ? std::log(std::max(f, 1e-12)) : std::log(std::max(1.0 - f, 1e-12));
        const double g = (label - f) * alpha;
        for (std::size_t c = 0; c < d; ++c) doc_grad[c] += static_cast<float>(g * out[c]);
        if (tokens_out != nullptr) {
            float* w = tokens_out + t * d;
            for (std::size_t c = 0; c < d; ++c) w[c] += static_cast<float>(g * doc[c]);
        }
    }
    return loss;
}

inline double decayed_alpha(double alpha, double min_alpha, std::uint64_t done, std::uint64_t total) {
    if (total == 0) return alpha;
    const double frac = static_cast<double>(done) / static_cast<double>(total);
    return std::max(min_alpha, alpha - (alpha - min_alpha) * frac);
}

}  // namespace detail

struct DocTrainResult {
    DocEmbeddingModel model;
    /// Learned vectors of the training documents, row-major (docs x dim).
    std::vector<float> doc_vectors;
    /// Mean per-pair negative-sampling loss of each epoch.
    std::vector<double> epoch_loss;
};

inline DocTrainResult train_doc_model(std::span<const Tokens> messages, const DocModelConfig& config) {
    if (config.dim < 2) throw Error("document dimension must be >= 2");
    std::unordered_map<std::string, std::uint64_t> freq;
    std::size_t nonempty = 0;
    for (const auto& m : messages) {
        if (!m.empty()) ++nonempty;
        for (const auto& t : m) ++freq[t];
    }
    if (nonempty == 0) throw Error("empty corpus");

    std::vector<std::pair<std::string, std::uint64_t>> kept;
    for (auto& [w, c] : freq) {
        if (c >= config.min_count) kept.emplace_back(w, c);
    }
    // Single-message corpora never reach min_count; fall back to keeping everything.
    if (kept.empty()) {
        for (auto& [w, c] : freq) kept.emplace_back(w, c);
    }
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    std::vector<std::string> words;
    std::vector<std::uint64_t> counts;
    for (auto& [w, c] : kept) {
        words.push_back(w);
        counts.push_back(c);
    }

    DocTrainResult result{DocEmbeddingModel(std::move(words), std::move(counts), config.dim, config), {}, {}};
    auto& model = result.model;
    const std::size_t d = config.dim;

    std::vector<std::vector<std::uint32_t>> docs(messages.size());
    std::uint64_t total_tokens = 0;
    for (std::size_t i = 0; i < messages.size(); ++i) {
        for (const auto& t : messages[i]) {
            if (const auto id = model.find(t); id >= 0) docs[i].push_back(static_cast<std::uint32_t>(id));
        }
        total_tokens += docs[i].size();
    }

    auto& dv = result.doc_vectors;
    dv.resize(messages.size() * d);
    {
        Rng rng = make_rng(config.seed, 0xd0c);
        for (auto& v : dv) v = static_cast<float>((uniform01(rng) - 0.5) / static_cast<double>(d));
    }

    const std::uint64_t schedule = total_tokens * config.epochs;
    auto& matrix = model.mutable_token_matrix();
    const unsigned threads = std::max(1U, config.threads);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::vector<double> loss(threads, 0.0);
        std::vector<std::uint64_t> pairs(threads, 0);
        std::vector<std::uint64_t> seen(threads, 0);
        parallel_chunks(docs.size(), threads, [&](unsigned w, std::size_t begin, std::size_t end) {
            Rng rng = make_rng(config.seed, (epoch + 1) * 1000003ULL + w);
            std::vector<float> grad(d);
            std::uint64_t base = epoch * total_tokens;
            for (std::size_t i = begin; i < end; ++i) {
                std::span<float> doc(dv.data() + i * d, d);
                for (auto tok : docs[i]) {
                    // Workers estimate the shared schedule from their own progress.
                    const double a = detail::decayed_alpha(config.alpha, config.min_alpha,
                                                           base + seen[w] * threads, schedule);
                    std::fill(grad.begin(), grad.end(), 0.0F);
                    loss[w] += detail::pvdbow_step(doc, grad, model.token_matrix(), matrix.data(), model.noise(), tok,
                                                   config.negatives, a, rng);
                    for (std::size_t c = 0; c < d; ++c) doc[c] += grad[c];
                    ++pairs[w];
                    ++seen[w];
                }
            }
        });
        const double total_loss = std::accumulate(loss.begin(), loss.end(), 0.0);
        const auto total_pairs = std::accumulate(pairs.begin(), pairs.end(), std::uint64_t{0});
        result.epoch_loss.push_back(total_pairs == 0 ? 0.0 : total_loss / static_cast<double>(total_pairs));
        if (!all_finite<float>(dv) || !all_finite<float>(model.token_matrix())) {
            throw Error("non-finite parameters after epoch " + std::to_string(epoch + 1));
        }
    }
    return result;
}

struct InferredVector {
    std::vector<float> values;
    bool out_of_vocabulary = false;
};

/// Fits a fresh document vector against frozen token vectors. The random
/// stream depends only on the model seed, so equal inputs give equal outputs.
inline InferredVector infer_doc_vector(const DocEmbeddingModel& model, std::span<const std::string> tokens) {
    const std::size_t d = model.dim();
    InferredVector r{std::vector<float>(d, 0.0F), false};
    std::vector<std::uint32_t> ids;
    for (const auto& t : tokens) {
        if (const auto id = model.find(t); id >= 0) ids.push_back(static_cast<std::uint32_t>(id));
    }
    if (ids.empty()) {
        r.out_of_vocabulary = true;
        return r;
    }
    const auto& cfg = model.config();
    Rng rng = make_rng(cfg.seed, 0x1f3e);
    for (auto& v : r.values) v = static_cast<float>((uniform01(rng) - 0.5) / static_cast<double>(d));
    std::vector<float> grad(d);
    const std::uint64_t schedule = ids.size() * cfg.infer_epochs;
    std::uint64_t done = 0;
    for (std::size_t e = 0; e < cfg.infer_epochs; ++e) {
        for (auto tok : ids) {
            const double a = detail::decayed_alpha(cfg.alpha, cfg.min_alpha, done++, schedule);
            std::fill(grad.begin(), grad.end(), 0.0F);
            detail::pvdbow_step(r.values, grad, model.token_matrix(), nullptr, model.noise(), tok, cfg.negatives, a,
                                rng);
            for (std::size_t c = 0; c < d; ++c) r.values[c] += grad[c];
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Persistence

inline constexpr std::string_view kDocModelMagic = "WNDV";

inline void save_doc_model(std::ostream& out, const DocEmbeddingModel& model) {
    BinaryTable t;
    t.provenance = model.provenance;
    t.dim = model.dim();
    t.keys = model.vocab();
    t.counts = model.counts();
    t.matrices.emplace_back(model.token_matrix().begin(), model.token_matrix().end());
    // Training config follows the table so inference is reproducible after reload.
    write_binary_table(out, kDocModelMagic, t);
    const auto& c = model.config();
    detail::put<std::uint64_t>(out, c.negatives);
    detail::put<std::uint64_t>(out, c.epochs);
    detail::put<double>(out, c.alpha);
    detail::put<double>(out, c.min_alpha);
    detail::put<std::uint64_t>(out, c.min_count);
    detail::put<std::uint64_t>(out, c.infer_epochs);
    detail::put<std::uint64_t>(out, c.seed);
}

inline DocEmbeddingModel load_doc_model(std::istream& in) {
    BinaryTable t = read_binary_table(in, kDocModelMagic);
    if (t.matrices.size() != 1) throw Error("doc model needs exactly one matrix");
    DocModelConfig c;
    c.dim = t.dim;
    c.negatives = detail::get<std::uint64_t>(in);
    c.epochs = detail::get<std::uint64_t>(in);
    c.alpha = detail::get<double>(in);
    c.min_alpha = detail::get<double>(in);
    c.min_count = detail::get<std::uint64_t>(in);
    c.infer_epochs = detail::get<std::uint64_t>(in);
    c.seed = detail::get<std::uint64_t>(in);
    DocEmbeddingModel m(std::move(t.keys), std::move(t.counts), t.dim, c);
    m.mutable_token_matrix() = std::move(t.matrices[0]);
    m.provenance = std::move(t.provenance);
    return m;
}

/// Text export: `|V| d` then `token v1 ... vd` per line.
inline void export_doc_model_text(std::ostream& out, const DocEmbeddingModel& model) {
    out << model.vocab_size() << ' ' << model.dim() << '\n';
    for (std::size_t i = 0; i < model.vocab_size(); ++i) {
        out << model.vocab()[i];
        for (float v : model.token_vector(i)) out << ' ' << format_float(v);
        out << '\n';
    }
}

}  // namespace weaknet
