#pragma once

// Node embedding tables, their file formats, and component-wise merges.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "weaknet/common.hpp"
#include "weaknet/io.hpp"

namespace weaknet {

class NodeEmbeddings {
public:
    NodeEmbeddings() = default;

    NodeEmbeddings(std::vector<std::string> ids, std::size_t dim) : ids_(std::move(ids)), dim_(dim) {
        data_.assign(ids_.size() * dim_, 0.0F);
        rebuild_index();
    }

    NodeEmbeddings(std::vector<std::string> ids, std::size_t dim, std::vector<float> data)
        : ids_(std::move(ids)), dim_(dim), data_(std::move(data)) {
        if (data_.size() != ids_.size() * dim_) throw Error("embedding data has wrong size");
        rebuild_index();
    }

    [[nodiscard]] std::size_t size() const { return ids_.size(); }
    [[nodiscard]] std::size_t dim() const { return dim_; }
    [[nodiscard]] const std::vector<std::string>& ids() const { return ids_; }
    [[nodiscard]] std::span<const float> data() const { return data_; }

    [[nodiscard]] std::span<const float> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
    std::span<float> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }

    [[nodiscard]] std::optional<std::size_t> find(const std::string& id) const {
        const auto it = index_.find(id);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    /// Vector for `id`, or zeros when absent.
    [[nodiscard]] std::vector<float> vector_or_zero(const std::string& id) const {
        if (const auto i = find(id)) return {row(*i).begin(), row(*i).end()};
        return std::vector<float>(dim_, 0.0F);
    }

    [[nodiscard]] bool finite() const { return all_finite<float>(data_); }

    void scale(float factor) {
        for (auto& v : data_) v *= factor;
    }

    /// Method and configuration that produced the table.
    std::string provenance;

    friend bool operator==(const NodeEmbeddings& a, const NodeEmbeddings& b) {
        return a.ids_ == b.ids_ && a.dim_ == b.dim_ && a.data_ == b.data_;
    }

private:
    void rebuild_index() {
        index_.clear();
        index_.reserve(ids_.size());
        for (std::size_t i = 0; i < ids_.size(); ++i) {
            if (!index_.emplace(ids_[i], i).second) throw Error("duplicate embedding id '" + ids_[i] + "'");
        }
    }

    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t dim_ = 0;
    std::vector<float> data_;
};

enum class MergeKind { average, max_pool, gated };
enum class GateSide { first, second };

struct MergeOp {
    MergeKind kind = MergeKind::average;
    /// For gated merges: which input supplies the sigmoid gate.
    GateSide gate_side = GateSide::first;
};

inline MergeOp parse_merge_op(std::string_view s) {
    if (s == "average") return {MergeKind::average, GateSide::first};
    if (s == "max_pool" || s == "max-pool" || s == "max") return {MergeKind::max_pool, GateSide::first};
    if (s == "gated_first" || s == "gated") return {MergeKind::gated, GateSide::first};
    if (s == "gated_second") return {MergeKind::gated, GateSide::second};
    throw Error("unknown merge op '" + std::string(s) + "'");
}

inline std::string to_string(const MergeOp& op) {
    switch (op.kind) {
        case MergeKind::average: return "average";
        case MergeKind::max_pool: return "max_pool";
        case MergeKind::gated: return op.gate_side == GateSide::first ? "gated_first" : "gated_second";
    }
    return "average";
}

/// Component-wise merge over the union of ids (order: ids of `a`, then ids
/// only in `b`). A node missing from one side uses zeros there.
///   average:  (a + b) / 2
///   max_pool: max(a, b)
///   gated:    sigmoid(gate) * other, gate = a for GateSide::first
inline NodeEmbeddings merge(const NodeEmbeddings& a, const NodeEmbeddings& b, const MergeOp& op) {
    if (a.dim() != b.dim()) throw Error("cannot merge embeddings of different dimension");
    std::vector<std::string> ids = a.ids();
    for (const auto& id : b.ids()) {
        if (!a.find(id)) ids.push_back(id);
    }
    const std::size_t d = a.dim();
    NodeEmbeddings out(ids, d);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto va = a.vector_or_zero(ids[i]);
        const auto vb = b.vector_or_zero(ids[i]);
        auto o = out.row(i);
        for (std::size_t c = 0; c < d; ++c) {
            switch (op.kind) {
                case MergeKind::average: o[c] = (va[c] + vb[c]) / 2.0F; break;
                case MergeKind::max_pool: o[c] = std::max(va[c], vb[c]); break;
                case MergeKind::gated:
                    o[c] = op.gate_side == GateSide::first
                               ? static_cast<float>(sigmoid(va[c]) * static_cast<double>(vb[c]))
                               : static_cast<float>(sigmoid(vb[c]) * static_cast<double>(va[c]));
                    break;
            }
        }
    }
    out.provenance = "merge=" + to_string(op) + " gate_weights=identity";
    return out;
}

// ---------------------------------------------------------------------------
// File formats

/// `N d`, then `node_id v1 ... vd`.
inline void write_embeddings_text(std::ostream& out, const NodeEmbeddings& e) {
    out << e.size() << ' ' << e.dim() << '\n';
    for (std::size_t i = 0; i < e.size(); ++i) {
        out << e.ids()[i];
        for (float v : e.row(i)) out << ' ' << format_float(v);
        out << '\n';
    }
}

inline NodeEmbeddings read_embeddings_text(std::istream& in) {
    std::size_t n = 0;
    std::size_t d = 0;
    std::string line;
    if (!std::getline(in, line)) throw Error("empty embedding file");
    {
        std::istringstream hdr(line);
        if (!(hdr >> n >> d)) throw Error("embedding header must be 'N d'");
    }
    std::vector<std::string> ids;
    std::vector<float> data;
    ids.reserve(n);
    data.reserve(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw Error("embedding file truncated");
        std::istringstream ss(line);
        std::string id;
        ss >> id;
        ids.push_back(id);
        for (std::size_t c = 0; c < d; ++c) {
            std::string tok;
            if (!(ss >> tok)) throw Error("embedding row for '" + id + "' is short");
            char* end = nullptr;
            const float v = std::strtof(tok.c_str(), &end);
            if (end == tok.c_str()) throw Error("bad embedding value '" + tok + "'");
            data.push_back(v);
        }
    }
    return NodeEmbeddings(std::move(ids), d, std::move(data));
}

inline constexpr std::string_view kEmbeddingMagic = "WNEM";

inline void write_embeddings_binary(std::ostream& out, const NodeEmbeddings& e) {
    BinaryTable t;
    t.provenance = e.provenance;
    t.dim = e.dim();
    t.keys = e.ids();
    t.counts.assign(e.size(), 0);
    t.matrices.emplace_back(e.data().begin(), e.data().end());
    write_binary_table(out, kEmbeddingMagic, t);
}

inline NodeEmbeddings read_embeddings_binary(std::istream& in) {
    BinaryTable t = read_binary_table(in, kEmbeddingMagic);
    if (t.matrices.size() != 1) throw Error("embedding file needs exactly one matrix");
    NodeEmbeddings e(std::move(t.keys), t.dim, std::move(t.matrices[0]));
    e.provenance = std::move(t.provenance);
    return e;
}

/// Picks the binary reader for files starting with the embedding magic.
inline NodeEmbeddings read_embeddings(const std::string& path) {
    auto in = open_input(path, true);
    char magic[4] = {};
    in.read(magic, 4);
    in.clear();
    in.seekg(0);
    if (std::string_view(magic, 4) == kEmbeddingMagic) return read_embeddings_binary(in);
    return read_embeddings_text(in);
}

}  // namespace weaknet
