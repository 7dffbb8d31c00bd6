#pragma once

// Posts, tokenization, lexicon matching and interaction extraction.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "weaknet/common.hpp"

namespace weaknet {

enum class PostType { original, reply, quote };

inline std::string_view to_string(PostType t) {
    switch (t) {
        case PostType::original: return "original";
        case PostType::reply: return "reply";
        case PostType::quote: return "quote";
    }
    return "original";
}

inline PostType parse_post_type(std::string_view s) {
    if (s == "original") return PostType::original;
    if (s == "reply") return PostType::reply;
    if (s == "quote") return PostType::quote;
    throw Error("unknown post type '" + std::string(s) + "'");
}

struct Post {
    std::string id;
    std::string author;
    PostType type = PostType::original;
    std::optional<std::string> parent_author;
    std::string text;
};

using Tokens = std::vector<std::string>;

namespace detail {

inline bool is_word_byte(unsigned char c) {
    return std::isalnum(c) != 0 || c == '_' || c >= 0x80;
}

}  // namespace detail

/// Lowercases and splits on punctuation/whitespace. Apostrophes and `*`
/// survive only between word characters ("don't", "k*ke"); a `#` directly
/// before a word character starts a hashtag token. Non-ASCII bytes are kept
/// as word characters so UTF-8 sequences are never split.
inline Tokens tokenize(std::string_view text) {
    Tokens out;
    std::string cur;
    const auto flush = [&] {
        if (!cur.empty() && cur != "#") {
            out.push_back(std::move(cur));
        }
        cur.clear();
    };
    const std::size_t n = text.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (detail::is_word_byte(c)) {
            cur.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
            continue;
        }
        const bool next_word = i + 1 < n && detail::is_word_byte(static_cast<unsigned char>(text[i + 1]));
        if ((c == '\'' || c == '*') && !cur.empty() && cur != "#" && next_word) {
            cur.push_back(static_cast<char>(c));
            continue;
        }
        flush();
        if (c == '#' && next_word) {
            cur.push_back('#');
        }
    }
    flush();
    return out;
}

enum class LexiconRole : std::uint8_t { indicator, context, positive };

/// Three disjoint phrase lists. Phrases are stored tokenized so multi-word
/// entries can be matched against token streams.
class LexiconSet {
public:
    LexiconSet() = default;

    LexiconSet(const std::vector<std::string>& indicators, const std::vector<std::string>& context,
               const std::vector<std::string>& positive) {
        add_all(indicators, LexiconRole::indicator);
        add_all(context, LexiconRole::context);
        add_all(positive, LexiconRole::positive);
    }

    struct Phrase {
        Tokens tokens;
        LexiconRole role;
    };

    /// Phrases starting with `first`, longest first.
    [[nodiscard]] const std::vector<Phrase>* candidates(const std::string& first) const {
        const auto it = by_first_.find(first);
        return it == by_first_.end() ? nullptr : &it->second;
    }

    [[nodiscard]] std::size_t size(LexiconRole role) const { return sizes_[static_cast<int>(role)]; }
    [[nodiscard]] std::size_t max_phrase_length() const { return max_len_; }

    [[nodiscard]] std::vector<std::string> phrases(LexiconRole role) const {
        std::vector<std::string> out;
        for (const auto& [key, role_of] : seen_) {
            if (role_of == role) out.push_back(key);
        }
        return out;
    }

private:
    void add_all(const std::vector<std::string>& phrases, LexiconRole role) {
        for (const auto& p : phrases) add(p, role);
    }

    void add(const std::string& phrase, LexiconRole role) {
        Tokens toks = tokenize(phrase);
        if (toks.empty()) {
            throw Error("lexicon phrase '" + phrase + "' has no tokens");
        }
        std::string key;
        for (const auto& t : toks) {
            if (!key.empty()) key.push_back(' ');
            key += t;
        }
        if (const auto it = seen_.find(key); it != seen_.end()) {
            if (it->second != role) {
                throw Error("lexicon sets are not disjoint: '" + key + "' appears in two roles");
            }
            return;
        }
        seen_.emplace(key, role);
        ++sizes_[static_cast<int>(role)];
        max_len_ = std::max(max_len_, toks.size());
        auto& bucket = by_first_[toks.front()];
        bucket.push_back(Phrase{std::move(toks), role});
        std::stable_sort(bucket.begin(), bucket.end(),
                         [](const Phrase& a, const Phrase& b) { return a.tokens.size() > b.tokens.size(); });
    }

    std::unordered_map<std::string, std::vector<Phrase>> by_first_;
    std::map<std::string, LexiconRole> seen_;
    std::array<std::size_t, 3> sizes_{};
    std::size_t max_len_ = 0;
};

struct IndicatorCounts {
    std::uint32_t n = 0;
    std::uint32_t n_plus = 0;
    std::uint32_t n_minus = 0;
    std::uint32_t n_ctx = 0;

    friend bool operator==(const IndicatorCounts&, const IndicatorCounts&) = default;
};

// Greedy left-to-right scan, longest phrase first; matched tokens are consumed.
inline IndicatorCounts count_indicators(std::span<const std::string> tokens, const LexiconSet& lexicon) {
    IndicatorCounts c;
    std::size_t i = 0;
    while (i < tokens.size()) {
        const auto* cands = lexicon.candidates(tokens[i]);
        std::size_t advance = 1;
        if (cands != nullptr) {
            for (const auto& phrase : *cands) {
                const auto len = phrase.tokens.size();
                if (i + len > tokens.size()) continue;
                if (!std::equal(phrase.tokens.begin(), phrase.tokens.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
                    continue;
                }
                switch (phrase.role) {
                    case LexiconRole::indicator: ++c.n_plus; break;
                    case LexiconRole::context: ++c.n_ctx; break;
                    case LexiconRole::positive: ++c.n_minus; break;
                }
                ++c.n;
                advance = len;
                break;
            }
        }
        i += advance;
    }
    return c;
}

struct PostTypeStats {
    PostType type;
    std::uint64_t count = 0;
    std::uint64_t with_direct = 0;

    [[nodiscard]] double fraction_direct() const {
        return count == 0 ? 0.0 : static_cast<double>(with_direct) / static_cast<double>(count);
    }
};

/// Rows in the order quote, reply, original.
inline std::vector<PostTypeStats> corpus_stats(std::span<const Post> posts, const LexiconSet& lexicon) {
    std::vector<PostTypeStats> rows{{PostType::quote}, {PostType::reply}, {PostType::original}};
    const auto row_of = [&](PostType t) -> PostTypeStats& {
        return *std::find_if(rows.begin(), rows.end(), [t](const auto& r) { return r.type == t; });
    };
    for (const auto& p : posts) {
        auto& row = row_of(p.type);
        ++row.count;
        if (count_indicators(tokenize(p.text), lexicon).n_plus >= 1) {
            ++row.with_direct;
        }
    }
    return rows;
}

enum class InteractionLayer : std::uint8_t { reply = 0, quote = 1 };

inline std::string_view to_string(InteractionLayer l) {
    return l == InteractionLayer::reply ? "reply" : "quote";
}

inline InteractionLayer parse_layer(std::string_view s) {
    if (s == "reply") return InteractionLayer::reply;
    if (s == "quote") return InteractionLayer::quote;
    throw Error("unknown interaction layer '" + std::string(s) + "'");
}

struct Interaction {
    std::string source;
    std::string target;
    InteractionLayer layer = InteractionLayer::reply;
    Tokens message_tokens;
    std::string post_id;
};

struct ExtractionDiagnostics {
    std::uint64_t missing_parent = 0;
    std::uint64_t self_interactions = 0;
};

inline std::vector<Interaction> extract_interactions(std::span<const Post> posts,
                                                     ExtractionDiagnostics* diag = nullptr) {
    std::vector<Interaction> out;
    ExtractionDiagnostics local;
    for (const auto& p : posts) {
        if (p.type == PostType::original) continue;
        if (!p.parent_author || p.parent_author->empty()) {
            ++local.missing_parent;
            continue;
        }
        if (*p.parent_author == p.author) {
            ++local.self_interactions;
            continue;
        }
        out.push_back(Interaction{p.author, *p.parent_author,
                                  p.type == PostType::reply ? InteractionLayer::reply : InteractionLayer::quote,
                                  tokenize(p.text), p.id});
    }
    if (diag != nullptr) *diag = local;
    return out;
}

// ---------------------------------------------------------------------------
// File formats

inline void validate_posts(std::span<const Post> posts) {
    std::set<std::string_view> ids;
    for (const auto& p : posts) {
        if (!ids.insert(p.id).second) {
            throw Error("duplicate post id '" + p.id + "'");
        }
        if (p.type == PostType::original && p.parent_author) {
            throw Error("original post '" + p.id + "' has a parent_author");
        }
    }
}

inline Post post_from_json(const nlohmann::json& j) {
    Post p;
    p.id = j.at("id").get<std::string>();
    p.author = j.at("author").get<std::string>();
    p.type = parse_post_type(j.at("type").get<std::string>());
    if (const auto it = j.find("parent_author"); it != j.end() && !it->is_null()) {
        p.parent_author = it->get<std::string>();
    }
    p.text = j.value("text", std::string{});
    return p;
}

inline nlohmann::json post_to_json(const Post& p) {
    nlohmann::json j;
    j["id"] = p.id;
    j["author"] = p.author;
    j["type"] = std::string(to_string(p.type));
    j["parent_author"] = p.parent_author ? nlohmann::json(*p.parent_author) : nlohmann::json(nullptr);
    j["text"] = p.text;
    return j;
}

inline std::vector<Post> read_posts_jsonl(std::istream& in) {
    std::vector<Post> posts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            posts.push_back(post_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw Error("posts line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    validate_posts(posts);
    return posts;
}

inline std::vector<Post> read_posts_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return read_posts_jsonl(in);
}

inline void write_posts_jsonl(std::ostream& out, std::span<const Post> posts) {
    for (const auto& p : posts) {
        out << post_to_json(p).dump() << '\n';
    }
}

/// One phrase per line; blank lines and lines starting with `#` followed by
/// whitespace (or a bare `#`) are comments. `#tag` lines are hashtag phrases.
inline std::vector<std::string> read_phrase_list(std::istream& in) {
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        std::string s = line.substr(b, e - b + 1);
        if (s[0] == '#' && (s.size() == 1 || std::isspace(static_cast<unsigned char>(s[1])) || s[1] == '#')) {
            continue;
        }
        out.push_back(std::move(s));
    }
    return out;
}

inline std::vector<std::string> read_phrase_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return read_phrase_list(in);
}

inline LexiconSet load_lexicon(const std::string& indicators, const std::string& context,
                               const std::string& positive) {
    return LexiconSet(read_phrase_list(indicators), read_phrase_list(context), read_phrase_list(positive));
}

inline void write_corpus_stats_csv(std::ostream& out, std::span<const PostTypeStats> rows) {
    out << "post_type,count,pct_direct\n";
    for (const auto& r : rows) {
        char pct[32];
        std::snprintf(pct, sizeof pct, "%.4f", 100.0 * r.fraction_direct());
        out << to_string(r.type) << ',' << r.count << ',' << pct << '\n';
    }
}

}  // namespace weaknet
