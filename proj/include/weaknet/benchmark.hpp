#pragma once

// Grid benchmark of embedding strategies for hateful-user classification:
// flattened graphs, per-layer embeddings merged component-wise, and
// multilayer walks (metapath schema and layer-jumping). Each cell is the
// mean F1 over repeated stratified splits at one training ratio.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "weaknet/classify.hpp"
#include "weaknet/common.hpp"
#include "weaknet/embed.hpp"
#include "weaknet/graph.hpp"
#include "weaknet/io.hpp"
#include "weaknet/line.hpp"
#include "weaknet/skipgram.hpp"
#include "weaknet/walks.hpp"

namespace weaknet {

struct BenchmarkRow {
    std::string method_type;  // flatten | merge | multilayer
    std::string algorithm;    // node2vec | LINE | Metapath2vec | MultiNet
    std::string merge_type;   // - | Average | Max-pooling | Gated Reply | Gated Quote
    bool unweighted = false;

    [[nodiscard]] std::string key() const {
        std::string k = method_type + "/" + algorithm;
        if (merge_type != "-") k += "/" + merge_type;
        if (unweighted) k += "/unweighted";
        return k;
    }
};

/// Rows of the full grid, in display order.
inline std::vector<BenchmarkRow> default_benchmark_rows() {
    std::vector<BenchmarkRow> rows{{"flatten", "node2vec", "-"}, {"flatten", "LINE", "-"}};
    for (const char* alg : {"node2vec", "LINE"}) {
        for (const char* m : {"Average", "Max-pooling", "Gated Reply", "Gated Quote"}) rows.push_back({"merge", alg, m});
    }
    rows.push_back({"multilayer", "Metapath2vec", "-"});
    rows.push_back({"multilayer", "MultiNet", "-"});
    return rows;
}

struct BenchmarkConfig {
    std::vector<double> ratios{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::size_t repeats = 10;
    std::uint64_t seed = 1;
    /// Ratio at which accuracy / precision / recall are also reported.
    double detail_ratio = 0.6;
    WalkConfig walk;
    SkipGramConfig skipgram;
    LineConfig line;
    ClassifierConfig classifier;
    double p_ret = 1.0;
    double q_io = 1.0;
    std::string metapath = "reply,quote";
    /// "Gated Reply" gates with the reply-layer vector; false flips the reading.
    bool gated_reply_uses_reply_gate = true;
    /// Adds multilayer rows computed on the graph with all weights set to 1.
    bool compare_unweighted = false;
    /// Subset of row keys to run; empty runs all.
    std::vector<std::string> only;
};

struct CellResult {
    double mean_f1 = 0;
    double std_f1 = 0;
    std::size_t repeats = 0;
    bool failed = false;
    std::string error;
};

struct DetailMetrics {
    double accuracy = 0;
    double precision = 0;
    double recall = 0;
    double f1 = 0;
};

struct EvalReport {
    std::vector<BenchmarkRow> rows;
    std::vector<double> ratios;
    /// cells[row][ratio]
    std::vector<std::vector<CellResult>> cells;
    std::vector<DetailMetrics> detail;
    double detail_ratio = 0.6;
    std::size_t repeats = 0;
    std::uint64_t seed = 0;
    std::size_t labeled_users = 0;
    std::size_t hateful_users = 0;
    std::vector<std::string> notes;

    [[nodiscard]] const CellResult& cell(const std::string& key, double ratio) const {
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].key() != key) continue;
            for (std::size_t c = 0; c < ratios.size(); ++c) {
                if (std::abs(ratios[c] - ratio) < 1e-9) return cells[r][c];
            }
        }
        throw Error("no report cell for " + key);
    }
};

struct LabeledSet {
    std::vector<std::string> users;
    std::vector<int> labels;
};

/// Labeled users that are nodes of `g`, in graph order.
inline LabeledSet labeled_nodes(const MultilayerGraph& g, std::span<const UserLabel> labels) {
    std::map<std::string, bool> by_user;
    for (const auto& l : labels) by_user[l.user] = l.hateful;
    LabeledSet s;
    for (const auto& n : g.node_names()) {
        if (const auto it = by_user.find(n); it != by_user.end()) {
            s.users.push_back(n);
            s.labels.push_back(it->second ? 1 : 0);
        }
    }
    return s;
}

struct RepeatedEval {
    double mean_f1 = 0;
    double std_f1 = 0;
    DetailMetrics mean;
};

/// Trains and evaluates a classifier over `repeats` stratified splits.
/// Split seeds depend only on (seed, ratio index, repeat), so every
/// embedding is judged on the same splits.
inline RepeatedEval evaluate_embedding(const NodeEmbeddings& emb, const LabeledSet& data, double ratio,
                                       std::size_t ratio_index, std::size_t repeats, std::uint64_t seed,
                                       const ClassifierConfig& cc) {
    std::vector<std::vector<float>> features;
    features.reserve(data.users.size());
    for (const auto& u : data.users) features.push_back(emb.vector_or_zero(u));
    std::vector<double> f1s;
    RepeatedEval out;
    for (std::size_t r = 0; r < repeats; ++r) {
        const auto split = train_eval_split(data.labels, ratio, mix_seed(seed, ratio_index * 1000 + r));
        std::vector<std::vector<float>> xtr, xte;
        std::vector<int> ytr, yte;
        for (auto i : split.train) {
            xtr.push_back(features[i]);
            ytr.push_back(data.labels[i]);
        }
        for (auto i : split.test) {
            xte.push_back(features[i]);
            yte.push_back(data.labels[i]);
        }
        const auto model = train_classifier(xtr, ytr, cc);
        const auto m = evaluate(model, xte, yte);
        f1s.push_back(m.f1);
        out.mean.accuracy += m.accuracy;
        out.mean.precision += m.precision;
        out.mean.recall += m.recall;
        out.mean.f1 += m.f1;
    }
    const auto n = static_cast<double>(repeats);
    out.mean.accuracy /= n;
    out.mean.precision /= n;
    out.mean.recall /= n;
    out.mean.f1 /= n;
    out.mean_f1 = out.mean.f1;
    double var = 0;
    for (double f : f1s) var += (f - out.mean_f1) * (f - out.mean_f1);
    out.std_f1 = repeats > 1 ? std::sqrt(var / (n - 1)) : 0.0;
    return out;
}

/// Embeddings for every strategy a row can need, computed lazily and cached.
class EmbeddingFactory {
public:
    /// `raw` carries interaction scores as weights; layer walks use its
    /// out-normalized form, flattening averages the raw scores first.
    EmbeddingFactory(const MultilayerGraph& raw, const BenchmarkConfig& cfg)
        : raw_(raw), graph_(normalize_out_weights(raw)), unweighted_(normalize_out_weights(unweighted(raw))),
          cfg_(cfg) {}

    const NodeEmbeddings& get(const BenchmarkRow& row) {
        const std::string key = row.key();
        if (const auto it = cache_.find(key); it != cache_.end()) return it->second;
        return cache_.emplace(key, build(row)).first->second;
    }

private:
    const NodeEmbeddings& layer_embedding(const std::string& algorithm, std::size_t layer) {
        const std::string key = algorithm + "#layer" + std::to_string(layer);
        if (const auto it = cache_.find(key); it != cache_.end()) return it->second;
        NodeEmbeddings e;
        if (algorithm == "LINE") {
            e = train_line2(graph_, layer, cfg_.line);
        } else {
            e = train_skipgram(single_layer_walks(graph_, layer, cfg_.p_ret, cfg_.q_io, cfg_.walk), cfg_.skipgram)
                    .embeddings;
        }
        return cache_.emplace(key, std::move(e)).first->second;
    }

    const MultilayerGraph& flat() {
        if (!flat_) flat_ = flatten(raw_);
        return *flat_;
    }

    NodeEmbeddings build(const BenchmarkRow& row) {
        const MultilayerGraph& g = row.unweighted ? unweighted_ : graph_;
        if (row.method_type == "flatten") {
            const auto& f = row.unweighted ? flatten(g) : flat();
            if (row.algorithm == "LINE") return train_line2(f, 0, cfg_.line);
            return train_skipgram(single_layer_walks(f, 0, cfg_.p_ret, cfg_.q_io, cfg_.walk), cfg_.skipgram)
                .embeddings;
        }
        if (row.method_type == "multilayer") {
            if (row.algorithm == "Metapath2vec") {
                return train_skipgram(metapath_walks(g, MetapathSchema::parse(cfg_.metapath, g), cfg_.walk),
                                      cfg_.skipgram)
                    .embeddings;
            }
            return train_skipgram(multilayer_walks(g, cfg_.walk), cfg_.skipgram).embeddings;
        }
        if (row.method_type == "merge") {
            const auto reply_idx = g.layer_index("reply");
            const auto quote_idx = g.layer_index("quote");
            if (!reply_idx || !quote_idx) throw Error("merge rows need 'reply' and 'quote' layers");
            const auto& reply = layer_embedding(row.algorithm, *reply_idx);
            const auto& quote = layer_embedding(row.algorithm, *quote_idx);
            const MergeOp gated{MergeKind::gated, GateSide::first};
            if (row.merge_type == "Average") return merge(reply, quote, {MergeKind::average, GateSide::first});
            if (row.merge_type == "Max-pooling") return merge(reply, quote, {MergeKind::max_pool, GateSide::first});
            const bool reply_gate = (row.merge_type == "Gated Reply") == cfg_.gated_reply_uses_reply_gate;
            return reply_gate ? merge(reply, quote, gated) : merge(quote, reply, gated);
        }
        throw Error("unknown benchmark row " + row.key());
    }

    const MultilayerGraph& raw_;
    MultilayerGraph graph_;
    MultilayerGraph unweighted_;
    std::optional<MultilayerGraph> flat_;
    const BenchmarkConfig& cfg_;
    std::map<std::string, NodeEmbeddings> cache_;
};

/// `graph` holds raw interaction scores; normalization happens per strategy.
inline EvalReport run_benchmark(const MultilayerGraph& graph, std::span<const UserLabel> labels,
                                const BenchmarkConfig& cfg,
                                const std::function<void(const std::string&)>& log = nullptr) {
    if (cfg.repeats == 0) throw Error("benchmark needs at least one repeat");
    const LabeledSet data = labeled_nodes(graph, labels);
    EvalReport report;
    report.ratios = cfg.ratios;
    report.repeats = cfg.repeats;
    report.seed = cfg.seed;
    report.detail_ratio = cfg.detail_ratio;
    report.labeled_users = data.users.size();
    report.hateful_users = static_cast<std::size_t>(std::count(data.labels.begin(), data.labels.end(), 1));
    report.notes.push_back("test users: all labeled nodes; a node missing from a layer gets a zero vector there");
    report.notes.push_back("gated merge: sigmoid(gate) * other with identity weights");

    auto rows = default_benchmark_rows();
    if (cfg.compare_unweighted) {
        rows.push_back({"multilayer", "Metapath2vec", "-", true});
        rows.push_back({"multilayer", "MultiNet", "-", true});
    }
    if (!cfg.only.empty()) {
        std::erase_if(rows, [&](const BenchmarkRow& r) {
            return std::find(cfg.only.begin(), cfg.only.end(), r.key()) == cfg.only.end();
        });
    }
    report.rows = rows;

    EmbeddingFactory factory(graph, cfg);
    for (const auto& row : rows) {
        std::vector<CellResult> row_cells(cfg.ratios.size());
        DetailMetrics detail;
        try {
            if (log) log("embedding " + row.key());
            const auto& emb = factory.get(row);
            for (std::size_t c = 0; c < cfg.ratios.size(); ++c) {
                auto& cell = row_cells[c];
                try {
                    const auto ev =
                        evaluate_embedding(emb, data, cfg.ratios[c], c, cfg.repeats, cfg.seed, cfg.classifier);
                    cell = {ev.mean_f1, ev.std_f1, cfg.repeats, false, {}};
                } catch (const Error& e) {
                    cell = {0, 0, 0, true, e.what()};
                }
            }
            const auto ev = evaluate_embedding(emb, data, cfg.detail_ratio, 999, cfg.repeats, cfg.seed, cfg.classifier);
            detail = ev.mean;
        } catch (const Error& e) {
            for (auto& cell : row_cells) cell = {0, 0, 0, true, e.what()};
        }
        report.cells.push_back(std::move(row_cells));
        report.detail.push_back(detail);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Report formats

inline void write_report_csv(std::ostream& out, const EvalReport& r, const Provenance* prov = nullptr) {
    if (prov != nullptr) out << prov->line() << '\n';
    out << "method_type,algorithm,merge_type";
    for (double ratio : r.ratios) out << ',' << format_double(ratio, 3);
    out << '\n';
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const auto& row = r.rows[i];
        out << row.method_type << ',' << row.algorithm << (row.unweighted ? " (unweighted)" : "") << ','
            << row.merge_type;
        for (const auto& cell : r.cells[i]) {
            char buf[16];
            std::snprintf(buf, sizeof buf, "%.4f", cell.mean_f1);
            out << ',' << (cell.failed ? std::string("failed") : std::string(buf));
        }
        out << '\n';
    }
}

inline nlohmann::json report_to_json(const EvalReport& r, const Provenance* prov = nullptr) {
    nlohmann::json j;
    if (prov != nullptr) j["provenance"] = prov->line();
    j["repeats"] = r.repeats;
    j["seed"] = r.seed;
    j["ratios"] = r.ratios;
    j["detail_ratio"] = r.detail_ratio;
    j["labeled_users"] = r.labeled_users;
    j["hateful_users"] = r.hateful_users;
    j["notes"] = r.notes;
    j["rows"] = nlohmann::json::array();
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        nlohmann::json row;
        row["key"] = r.rows[i].key();
        row["method_type"] = r.rows[i].method_type;
        row["algorithm"] = r.rows[i].algorithm;
        row["merge_type"] = r.rows[i].merge_type;
        row["unweighted"] = r.rows[i].unweighted;
        row["cells"] = nlohmann::json::array();
        for (std::size_t c = 0; c < r.ratios.size(); ++c) {
            const auto& cell = r.cells[i][c];
            nlohmann::json jc{{"ratio", r.ratios[c]}, {"mean_f1", cell.mean_f1}, {"std_f1", cell.std_f1},
                              {"repeats", cell.repeats}, {"failed", cell.failed}};
            if (cell.failed) jc["error"] = cell.error;
            row["cells"].push_back(jc);
        }
        const auto& d = r.detail[i];
        row["detail"] = {{"accuracy", d.accuracy}, {"precision", d.precision}, {"recall", d.recall}, {"f1", d.f1}};
        j["rows"].push_back(row);
    }
    return j;
}

/// Whitespace-separated columns for gnuplot bar charts at the detail ratio.
inline void write_report_gnuplot(std::ostream& out, const EvalReport& r, const Provenance* prov = nullptr) {
    if (prov != nullptr) out << prov->line() << '\n';
    out << "# row accuracy precision recall f1\n";
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        std::string key = r.rows[i].key();
        std::replace(key.begin(), key.end(), ' ', '_');
        const auto& d = r.detail[i];
        out << '"' << key << "\" " << format_double(d.accuracy, 6) << ' ' << format_double(d.precision, 6) << ' '
            << format_double(d.recall, 6) << ' ' << format_double(d.f1, 6) << '\n';
    }
}

}  // namespace weaknet
