// weaknet command-line driver: one subcommand per pipeline stage, all
// artifacts as files under --out.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>

#include "weaknet/benchmark.hpp"
#include "weaknet/classify.hpp"
#include "weaknet/corpus.hpp"
#include "weaknet/docvec.hpp"
#include "weaknet/embed.hpp"
#include "weaknet/graph.hpp"
#include "weaknet/line.hpp"
#include "weaknet/skipgram.hpp"
#include "weaknet/synth.hpp"
#include "weaknet/walks.hpp"
#include "weaknet/weakscore.hpp"

namespace fs = std::filesystem;
using namespace weaknet;

namespace {

constexpr int kExitError = 1;
constexpr int kExitMissingInput = 2;
constexpr int kExitConfig = 3;

struct MissingInput : Error {
    using Error::Error;
};

struct Settings {
    std::string out = "run";
    std::string posts, indicators, context, positive;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    bool deterministic = false;

    // docvec
    std::size_t doc_dim = 100;
    std::size_t doc_epochs = 10;
    std::size_t doc_negatives = 5;
    std::uint64_t doc_min_count = 2;
    std::size_t infer_epochs = 50;

    // scorer: the library defaults assume millions of messages and barely move
    // the weights on a few thousand, so the CLI trains harder.
    std::size_t score_epochs = 20;
    double score_rate = 0.5;
    std::size_t score_batch = 256;
    std::string bounds = "contextual";
    std::size_t top_k = 50;

    // graph
    std::string aggregation = "mean";
    std::uint64_t z = 5;
    bool induce_on_labeled = false;

    // walks
    std::string strategy = "multilayer";
    std::string metapath = "reply,quote";
    std::size_t walks_per_node = 10;
    std::size_t walk_length = 80;
    double stay_prob = 0.7;
    double p_ret = 1.0;
    double q_io = 1.0;
    std::string layer = "reply";

    // embeddings
    std::string method = "skipgram";
    std::size_t dim = 128;
    std::size_t window = 5;
    std::size_t negatives = 5;
    std::size_t epochs = 5;
    std::uint64_t line_samples = 1000000;
    bool text_embeddings = false;

    // merge
    std::string merge_a, merge_b, merge_op = "average", merge_out;

    // classify / bench
    std::string embeddings;
    std::vector<double> ratios{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::size_t repeats = 10;
    double l2 = 1e-3;
    bool compare_unweighted = false;
    bool gated_reply_uses_reply_gate = true;

    // synth
    std::size_t users = 500;
    double hateful_fraction = 0.2;

    std::uint64_t config_hash = 0;

    [[nodiscard]] fs::path dir() const { return fs::path(out); }
    [[nodiscard]] std::string in_out(const std::string& set, const char* name) const {
        return set.empty() ? (dir() / name).string() : set;
    }
    [[nodiscard]] std::string posts_path() const { return in_out(posts, "posts.jsonl"); }
    [[nodiscard]] std::string indicators_path() const { return in_out(indicators, "indicators.txt"); }
    [[nodiscard]] std::string context_path() const { return in_out(context, "context.txt"); }
    [[nodiscard]] std::string positive_path() const { return in_out(positive, "positive.txt"); }
    [[nodiscard]] std::string embeddings_path() const { return in_out(embeddings, "embeddings.bin"); }

    [[nodiscard]] Provenance provenance(const std::string& stage) const {
        return Provenance{"weaknet", std::string(kVersion), config_hash, seed, "stage=" + stage};
    }
};

void log(const std::string& msg) { std::cerr << "[weaknet] " << msg << '\n'; }

class Timer {
public:
    explicit Timer(std::string what) : what_(std::move(what)), start_(std::chrono::steady_clock::now()) {
        log(what_ + " ...");
    }
    ~Timer() {
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start_;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f s", dt.count());
        log(what_ + " done in " + buf);
    }
    Timer(const Timer&) = delete;
    Timer& operator=(const Timer&) = delete;

private:
    std::string what_;
    std::chrono::steady_clock::time_point start_;
};

const std::string& need(const std::string& path) {
    if (!fs::exists(path)) throw MissingInput("missing input file: " + path);
    return path;
}

std::ofstream create(const Settings& s, const std::string& name, bool binary = false) {
    fs::create_directories(s.dir());
    return open_output((s.dir() / name).string(), binary);
}

LexiconSet lexicon_of(const Settings& s) {
    return load_lexicon(need(s.indicators_path()), need(s.context_path()), need(s.positive_path()));
}

std::vector<UserLabel> read_labels(const Settings& s) {
    auto in = open_input(need((s.dir() / "labels.tsv").string()));
    return read_labels_tsv(in);
}

MultilayerGraph read_graph_dir(const Settings& s) {
    return read_graph(need((s.dir() / "graph" / "manifest.json").string()));
}

std::size_t layer_of(const MultilayerGraph& g, const std::string& name) {
    const auto l = g.layer_index(name);
    if (!l) throw Error("graph has no layer '" + name + "'");
    return *l;
}

void write_embeddings(const Settings& s, const std::string& name, NodeEmbeddings e, const std::string& stage) {
    e.provenance = s.provenance(stage).line() + " " + e.provenance;
    auto bin = create(s, name + ".bin", true);
    write_embeddings_binary(bin, e);
    if (s.text_embeddings) {
        auto txt = create(s, name + ".txt");
        write_embeddings_text(txt, e);
    }
}

// ---------------------------------------------------------------------------
// Stages

void run_stats(const Settings& s) {
    Timer t("stats");
    const auto posts = read_posts_jsonl(need(s.posts_path()));
    const auto rows = corpus_stats(posts, lexicon_of(s));
    auto out = create(s, "corpus_stats.csv");
    out << s.provenance("stats").line() << '\n';
    write_corpus_stats_csv(out, rows);
}

void run_score(const Settings& s) {
    Timer t("score");
    const auto lex = lexicon_of(s);
    const auto posts = read_posts_jsonl(need(s.posts_path()));
    std::vector<Tokens> messages;
    messages.reserve(posts.size());
    for (const auto& p : posts) messages.push_back(tokenize(p.text));

    DocModelConfig dc;
    dc.dim = s.doc_dim;
    dc.epochs = s.doc_epochs;
    dc.negatives = s.doc_negatives;
    dc.min_count = s.doc_min_count;
    dc.infer_epochs = s.infer_epochs;
    dc.seed = s.seed;
    dc.threads = s.threads;
    DocTrainResult doc;
    {
        Timer td("document vectors over " + std::to_string(messages.size()) + " posts");
        doc = train_doc_model(messages, dc);
    }
    doc.model.provenance = s.provenance("docvec").line();
    {
        auto out = create(s, "docvec.bin", true);
        save_doc_model(out, doc.model);
    }

    const auto variant = parse_bounds_variant(s.bounds);
    std::vector<std::vector<float>> vectors(messages.size());
    std::vector<Bounds> bounds(messages.size());
    for (std::size_t i = 0; i < messages.size(); ++i) {
        vectors[i].assign(doc.doc_vectors.begin() + static_cast<std::ptrdiff_t>(i * dc.dim),
                          doc.doc_vectors.begin() + static_cast<std::ptrdiff_t>((i + 1) * dc.dim));
        bounds[i] = compute_bounds(count_indicators(messages[i], lex), variant);
    }
    ScorerConfig sc;
    sc.epochs = s.score_epochs;
    sc.rate = s.score_rate;
    sc.batch = s.score_batch;
    sc.seed = s.seed;
    sc.threads = s.threads;
    ScorerTrainResult scorer;
    {
        Timer ts("scorer");
        scorer = train_scorer(vectors, bounds, sc);
    }
    log("scorer final mean loss " + format_double(scorer.final_mean_loss, 6));
    const auto prov = s.provenance("score");
    {
        auto out = create(s, "scorer.txt");
        save_scorer(out, scorer.model, &prov);
    }

    ExtractionDiagnostics diag;
    const auto interactions = extract_interactions(posts, &diag);
    log(std::to_string(interactions.size()) + " interactions; dropped " + std::to_string(diag.missing_parent) +
        " without parent, " + std::to_string(diag.self_interactions) + " self");
    std::vector<ScoredInteraction> scored;
    {
        Timer ti("scoring interactions");
        scored = score_interactions(scorer.model, interactions, doc.model, s.threads);
    }
    {
        auto out = create(s, "scores.tsv");
        write_scores_tsv(out, scored, &prov);
    }
    {
        auto out = create(s, "top_interactions.tsv");
        write_scores_tsv(out, rank_top_k(scored, std::max<std::size_t>(1, s.top_k)), &prov);
    }
    std::vector<double> values;
    values.reserve(scored.size());
    for (const auto& x : scored) values.push_back(x.score);
    auto out = create(s, "score_histogram.csv");
    write_histogram_csv(out, score_histogram(values), &prov);
}

void run_graph(const Settings& s) {
    Timer t("graph");
    auto in = open_input(need((s.dir() / "scores.tsv").string()));
    const auto scored = read_scores_tsv(in);
    const auto posts = read_posts_jsonl(need(s.posts_path()));
    auto g = build_interaction_graph(scored, parse_aggregation(s.aggregation));
    if (s.induce_on_labeled) {
        // Users never seen as authors have no evidence behind their label.
        std::unordered_set<std::string> authors;
        for (const auto& p : posts) authors.insert(p.author);
        g = induce_subgraph(g, [&](const std::string& u) { return authors.contains(u); });
    }
    const auto prov = s.provenance("graph");
    write_graph(s.dir() / "graph", g, prov);
    log(std::to_string(g.node_count()) + " users, " + std::to_string(g.edge_count(0)) + " reply / " +
        std::to_string(g.layer_count() > 1 ? g.edge_count(1) : 0) + " quote edges");

    const auto users = g.node_names();
    const auto labels = label_users(posts, lexicon_of(s), s.z, users);
    auto out = create(s, "labels.tsv");
    write_labels_tsv(out, labels, &prov);
}

WalkConfig walk_config(const Settings& s) {
    WalkConfig wc;
    wc.walks_per_node = s.walks_per_node;
    wc.walk_length = s.walk_length;
    wc.stay_prob = s.stay_prob;
    wc.seed = s.seed;
    wc.threads = s.threads;
    return wc;
}

void run_walk(const Settings& s) {
    Timer t("walk (" + s.strategy + ")");
    const auto g = normalize_out_weights(read_graph_dir(s));
    const auto wc = walk_config(s);
    WalkCorpus c;
    if (s.strategy == "multilayer") {
        c = multilayer_walks(g, wc);
    } else if (s.strategy == "metapath") {
        c = metapath_walks(g, MetapathSchema::parse(s.metapath, g), wc);
    } else if (s.strategy == "node2vec") {
        c = single_layer_walks(g, layer_of(g, s.layer), s.p_ret, s.q_io, wc);
    } else if (s.strategy == "flatten") {
        c = single_layer_walks(flatten(read_graph_dir(s)), 0, s.p_ret, s.q_io, wc);
    } else {
        throw Error("unknown walk strategy '" + s.strategy + "'");
    }
    const auto prov = s.provenance("walk");
    auto out = create(s, "walks.txt");
    write_walks(out, c, &prov);
}

void run_embed(const Settings& s) {
    Timer t("embed (" + s.method + ")");
    if (s.method == "skipgram") {
        auto in = open_input(need((s.dir() / "walks.txt").string()));
        const auto walks = read_walks(in);
        SkipGramConfig sc;
        sc.dim = s.dim;
        sc.window = s.window;
        sc.negatives = s.negatives;
        sc.epochs = s.epochs;
        sc.seed = s.seed;
        sc.threads = s.threads;
        const auto r = train_skipgram(walks, sc);
        log("skip-gram loss per epoch: first " + format_double(r.epoch_loss.front(), 5) + ", last " +
            format_double(r.epoch_loss.back(), 5));
        write_embeddings(s, "embeddings", r.embeddings, "embed");
    } else if (s.method == "line") {
        const auto g = normalize_out_weights(read_graph_dir(s));
        LineConfig lc;
        lc.dim = s.dim;
        lc.negatives = s.negatives;
        lc.samples = s.line_samples;
        lc.seed = s.seed;
        write_embeddings(s, "embeddings", train_line2(g, layer_of(g, s.layer), lc), "embed");
    } else {
        throw Error("unknown embedding method '" + s.method + "'");
    }
}

void run_merge(const Settings& s) {
    Timer t("merge (" + s.merge_op + ")");
    if (s.merge_a.empty() || s.merge_b.empty()) throw Error("merge needs --merge-a and --merge-b");
    const auto a = read_embeddings(need(s.merge_a));
    const auto b = read_embeddings(need(s.merge_b));
    const auto m = merge(a, b, parse_merge_op(s.merge_op));
    const std::string name = s.merge_out.empty() ? "merged" : s.merge_out;
    write_embeddings(s, name, m, "merge");
}

ClassifierConfig classifier_config(const Settings& s) {
    ClassifierConfig cc;
    cc.l2 = s.l2;
    return cc;
}

void run_classify(const Settings& s) {
    Timer t("classify");
    const auto emb = read_embeddings(need(s.embeddings_path()));
    const auto labels = read_labels(s);
    // Users come from the labels file; embeddings are keyed by user id.
    LabeledSet data;
    for (const auto& l : labels) {
        data.users.push_back(l.user);
        data.labels.push_back(l.hateful ? 1 : 0);
    }
    auto out = create(s, "classify.csv");
    out << s.provenance("classify").line() << '\n';
    out << "ratio,mean_f1,std_f1,accuracy,precision,recall\n";
    for (std::size_t c = 0; c < s.ratios.size(); ++c) {
        const auto ev = evaluate_embedding(emb, data, s.ratios[c], c, s.repeats, s.seed, classifier_config(s));
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s,%.4f,%.4f,%.4f,%.4f,%.4f", format_double(s.ratios[c], 3).c_str(),
                      ev.mean_f1, ev.std_f1, ev.mean.accuracy, ev.mean.precision, ev.mean.recall);
        out << buf << '\n';
        log(std::string("ratio ") + format_double(s.ratios[c], 3) + ": F1 " + format_double(ev.mean_f1, 4));
    }
}

void run_bench(const Settings& s) {
    Timer t("bench");
    const auto g = read_graph_dir(s);
    const auto labels = read_labels(s);
    BenchmarkConfig bc;
    bc.ratios = s.ratios;
    bc.repeats = s.repeats;
    bc.seed = s.seed;
    bc.walk = walk_config(s);
    bc.skipgram.dim = s.dim;
    bc.skipgram.window = s.window;
    bc.skipgram.negatives = s.negatives;
    bc.skipgram.epochs = s.epochs;
    bc.skipgram.seed = s.seed;
    bc.skipgram.threads = s.threads;
    bc.line.dim = s.dim;
    bc.line.negatives = s.negatives;
    bc.line.samples = s.line_samples;
    bc.line.seed = s.seed;
    bc.classifier = classifier_config(s);
    bc.p_ret = s.p_ret;
    bc.q_io = s.q_io;
    bc.metapath = s.metapath;
    bc.compare_unweighted = s.compare_unweighted;
    bc.gated_reply_uses_reply_gate = s.gated_reply_uses_reply_gate;
    const auto report = run_benchmark(g, labels, bc, log);
    const auto prov = s.provenance("bench");
    {
        auto out = create(s, "report.csv");
        write_report_csv(out, report, &prov);
    }
    {
        auto out = create(s, "report.json");
        out << report_to_json(report, &prov).dump(2) << '\n';
    }
    auto out = create(s, "report.dat");
    write_report_gnuplot(out, report, &prov);
}

void run_synth(const Settings& s) {
    Timer t("synth");
    SynthSpec spec;
    spec.n_users = s.users;
    spec.hateful_fraction = s.hateful_fraction;
    spec.seed = s.seed;
    const auto c = gen_corpus(spec);
    {
        auto out = create(s, "posts.jsonl");
        write_posts_jsonl(out, c.posts);
    }
    const auto prov = s.provenance("synth");
    const std::pair<const char*, LexiconRole> files[] = {{"indicators.txt", LexiconRole::indicator},
                                                         {"context.txt", LexiconRole::context},
                                                         {"positive.txt", LexiconRole::positive}};
    for (const auto& [name, role] : files) {
        auto out = create(s, name);
        out << prov.line() << '\n';
        for (const auto& p : c.lexicon.phrases(role)) out << p << '\n';
    }
    std::vector<UserLabel> planted;
    for (std::size_t i = 0; i < c.users.size(); ++i) planted.push_back({c.users[i], c.hateful[i] != 0, 0});
    auto out = create(s, "planted.tsv");
    write_labels_tsv(out, planted, &prov);
    log(std::to_string(c.posts.size()) + " posts by " + std::to_string(c.users.size()) + " users");
}

void run_pipeline(const Settings& s) {
    Timer t("pipeline");
    // Fail fast on missing inputs before any work is done.
    need(s.posts_path());
    need(s.indicators_path());
    need(s.context_path());
    need(s.positive_path());
    run_score(s);
    run_graph(s);
    run_walk(s);
    run_embed(s);
    run_classify(s);
    run_bench(s);
}

// ---------------------------------------------------------------------------
// Command line

unsigned default_threads() {
    if (const char* env = std::getenv("WEAKNET_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    return 1;
}

std::map<std::string, void (*)(const Settings&)> define(CLI::App& app, Settings& s) {
    app.set_config("--config", "", "key = value configuration file; command-line flags take precedence");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.fallthrough();

    app.add_option("--out", s.out, "Directory for all artifacts")->capture_default_str();
    app.add_option("--posts", s.posts, "Posts JSONL (default: <out>/posts.jsonl)");
    app.add_option("--indicators", s.indicators, "Indicator phrase list (default: <out>/indicators.txt)");
    app.add_option("--context", s.context, "Context phrase list (default: <out>/context.txt)");
    app.add_option("--positive", s.positive, "Positive phrase list (default: <out>/positive.txt)");
    app.add_option("--seed", s.seed, "Random seed")->capture_default_str();
    app.add_option("--threads", s.threads, "Worker threads (default from WEAKNET_THREADS)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_flag("--deterministic", s.deterministic, "Force single-threaded, reproducible execution");

    app.add_option("--doc-dim", s.doc_dim, "Document vector dimension")->capture_default_str();
    app.add_option("--doc-epochs", s.doc_epochs, "Document model epochs")->capture_default_str();
    app.add_option("--doc-negatives", s.doc_negatives, "Document model negative samples")->capture_default_str();
    app.add_option("--doc-min-count", s.doc_min_count, "Minimum token count")->capture_default_str();
    app.add_option("--infer-epochs", s.infer_epochs, "Inference epochs per message")->capture_default_str();

    app.add_option("--score-epochs", s.score_epochs, "Scorer epochs")->capture_default_str();
    app.add_option("--score-rate", s.score_rate, "Scorer learning rate")->capture_default_str();
    app.add_option("--score-batch", s.score_batch, "Scorer minibatch size")->capture_default_str();
    app.add_option("--bounds", s.bounds, "Bounds variant: contextual | original")->capture_default_str();
    app.add_option("--top-k", s.top_k, "Interactions in the top-k export")->capture_default_str();

    app.add_option("--aggregation", s.aggregation, "Duplicate-edge aggregation: mean | max | sum")
        ->capture_default_str();
    app.add_option("--z", s.z, "Indicator count at which a user is labeled hateful")->capture_default_str();
    app.add_flag("--induce-on-labeled", s.induce_on_labeled, "Keep only users who authored at least one post");

    app.add_option("--strategy", s.strategy, "Walks: multilayer | metapath | node2vec | flatten")
        ->capture_default_str();
    app.add_option("--metapath", s.metapath, "Metapath schema, e.g. reply,quote")->capture_default_str();
    app.add_option("--walks-per-node", s.walks_per_node, "Walks started at each node")->capture_default_str();
    app.add_option("--walk-length", s.walk_length, "Maximum walk length")->capture_default_str();
    app.add_option("--stay-prob", s.stay_prob, "Multilayer walks: probability of staying in a layer")
        ->capture_default_str();
    app.add_option("--p", s.p_ret, "node2vec return parameter")->capture_default_str();
    app.add_option("--q", s.q_io, "node2vec in-out parameter")->capture_default_str();
    app.add_option("--layer", s.layer, "Layer for node2vec walks and LINE")->capture_default_str();

    app.add_option("--method", s.method, "Embedding: skipgram | line")->capture_default_str();
    app.add_option("--dim", s.dim, "Node embedding dimension")->capture_default_str();
    app.add_option("--window", s.window, "Skip-gram window")->capture_default_str();
    app.add_option("--negatives", s.negatives, "Negative samples")->capture_default_str();
    app.add_option("--epochs", s.epochs, "Skip-gram epochs")->capture_default_str();
    app.add_option("--line-samples", s.line_samples, "LINE edge samples")->capture_default_str();
    app.add_flag("--text-embeddings", s.text_embeddings, "Also write embeddings in text format");

    app.add_option("--merge-a", s.merge_a, "First embedding file");
    app.add_option("--merge-b", s.merge_b, "Second embedding file");
    app.add_option("--merge-op", s.merge_op, "average | max_pool | gated_first | gated_second")
        ->capture_default_str();
    app.add_option("--merge-out", s.merge_out, "Output name inside --out (default: merged)");

    app.add_option("--embeddings", s.embeddings, "Embeddings to classify (default: <out>/embeddings.bin)");
    app.add_option("--ratios", s.ratios, "Training ratios")->delimiter(',')->capture_default_str();
    app.add_option("--repeats", s.repeats, "Splits per ratio")->capture_default_str();
    app.add_option("--l2", s.l2, "Classifier L2 penalty")->capture_default_str();
    app.add_flag("--compare-unweighted", s.compare_unweighted, "Add unweighted multilayer rows to the benchmark");
    app.add_option("--gated-reply-uses-reply-gate", s.gated_reply_uses_reply_gate,
                   "Gated Reply gates with the reply vector")
        ->capture_default_str();

    app.add_option("--users", s.users, "Synthetic users")->capture_default_str();
    app.add_option("--hateful-fraction", s.hateful_fraction, "Synthetic hateful fraction")->capture_default_str();

    app.require_subcommand(1);
    std::map<std::string, void (*)(const Settings&)> stages{
        {"stats", run_stats}, {"score", run_score},       {"graph", run_graph}, {"walk", run_walk},
        {"embed", run_embed}, {"merge", run_merge},       {"classify", run_classify},
        {"bench", run_bench}, {"synth", run_synth},       {"pipeline", run_pipeline}};
    const std::map<std::string, std::string> help{
        {"stats", "Per-post-type counts and share with a direct indicator -> corpus_stats.csv"},
        {"score", "Train document vectors and the weak-supervision scorer; score interactions -> scores.tsv"},
        {"graph", "Build the reply/quote graph from scores.tsv and label users -> graph/, labels.tsv"},
        {"walk", "Generate a walk corpus from the graph -> walks.txt"},
        {"embed", "Train node embeddings from walks.txt (skipgram) or the graph (line) -> embeddings.bin"},
        {"merge", "Merge two embedding files component-wise"},
        {"classify", "Evaluate one embedding file over the training ratios -> classify.csv"},
        {"bench", "Full method x merge x ratio grid -> report.csv, report.json, report.dat"},
        {"synth", "Write a synthetic corpus with planted hateful users and lexicons"},
        {"pipeline", "score -> graph -> walk -> embed -> classify -> bench"}};
    for (const auto& [name, fn] : stages) app.add_subcommand(name, help.at(name))->fallthrough();
    return stages;
}

}  // namespace

int main(int argc, char** argv) {
    Settings s;
    s.threads = default_threads();
    CLI::App app{"weaknet: weakly supervised interaction scoring and multilayer user embeddings"};
    const auto stages = define(app, s);

    // Parse the config file on its own first so its errors get their own exit code.
    for (int i = 1; i + 1 < argc; ++i) {
        const std::string arg = argv[i];
        if (arg != "--config") continue;
        if (!fs::exists(argv[i + 1])) {
            std::cerr << "weaknet: missing input file: " << argv[i + 1] << '\n';
            return kExitMissingInput;
        }
        Settings probe;
        CLI::App check{"config check"};
        define(check, probe);
        check.require_subcommand(0);
        const char* args[] = {argv[0], "--config", argv[i + 1]};
        try {
            check.parse(3, args);
        } catch (const CLI::ParseError& e) {
            std::cerr << "weaknet: config error in " << argv[i + 1] << ": " << e.what() << '\n';
            return kExitConfig;
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    if (s.deterministic) s.threads = 1;
    s.config_hash = fnv1a(app.config_to_str(true, false));

    try {
        for (const auto* sub : app.get_subcommands()) stages.at(sub->get_name())(s);
    } catch (const MissingInput& e) {
        std::cerr << "weaknet: " << e.what() << '\n';
        return kExitMissingInput;
    } catch (const std::exception& e) {
        std::cerr << "weaknet: error: " << e.what() << '\n';
        return kExitError;
    }
    return 0;
}
