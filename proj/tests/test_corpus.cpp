#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "weaknet/corpus.hpp"

using namespace weaknet;

namespace {

Tokens toks(std::initializer_list<const char*> words) { return Tokens(words.begin(), words.end()); }

Post post(std::string id, std::string author, PostType type, std::optional<std::string> parent, std::string text) {
    return Post{std::move(id), std::move(author), type, std::move(parent), std::move(text)};
}

}  // namespace

TEST(Tokenize, LowercasesAndStripsPunctuation) {
    EXPECT_EQ(tokenize("Hello, World!"), toks({"hello", "world"}));
    EXPECT_EQ(tokenize(""), Tokens{});
    EXPECT_EQ(tokenize("  ...  "), Tokens{});
}

TEST(Tokenize, KeepsHashtagsAsSingleTokens) {
    EXPECT_EQ(tokenize("#hitlerwasright is vile"), toks({"#hitlerwasright", "is", "vile"}));
    EXPECT_EQ(tokenize("# alone"), toks({"alone"}));
    EXPECT_EQ(tokenize("x#tag"), toks({"x", "#tag"}));
}

TEST(Tokenize, IntraWordApostropheAndCensorMark) {
    EXPECT_EQ(tokenize("Don't 'quote' k*ke *x"), toks({"don't", "quote", "k*ke", "x"}));
}

TEST(Tokenize, KeepsUtf8Bytes) {
    EXPECT_EQ(tokenize("Caf\xc3\xa9 ok"), toks({"caf\xc3\xa9", "ok"}));
}

TEST(Lexicon, RejectsOverlappingRoles) {
    EXPECT_THROW(LexiconSet({"jew"}, {"Jew"}, {}), Error);
    EXPECT_NO_THROW(LexiconSet({"slur", "slur"}, {}, {}));
}

TEST(Lexicon, PhrasesAreNormalized) {
    const LexiconSet lex({"Coded  Phrase"}, {}, {});
    EXPECT_EQ(lex.phrases(LexiconRole::indicator), std::vector<std::string>{"coded phrase"});
    EXPECT_EQ(lex.size(LexiconRole::indicator), 1U);
    EXPECT_EQ(lex.max_phrase_length(), 2U);
}

TEST(CountIndicators, HandEnumeratedExamples) {
    const LexiconSet lex({}, {"jew", "talmud"}, {"love"});
    EXPECT_EQ(count_indicators(toks({"jew", "talmud", "love"}), lex), (IndicatorCounts{3, 0, 1, 2}));
    EXPECT_EQ(count_indicators(toks({"hello", "world"}), lex), (IndicatorCounts{0, 0, 0, 0}));
    EXPECT_EQ(count_indicators(toks({"jew", "jew"}), lex), (IndicatorCounts{2, 0, 0, 2}));
}

TEST(CountIndicators, LongestMatchConsumesTokens) {
    const LexiconSet lex({"coded phrase"}, {"coded", "phrase here"}, {});
    // "coded phrase" wins at position 0; "here" alone matches nothing.
    EXPECT_EQ(count_indicators(toks({"coded", "phrase", "here", "coded"}), lex), (IndicatorCounts{2, 1, 0, 1}));
    EXPECT_EQ(count_indicators(toks({"coded", "coded", "phrase"}), lex), (IndicatorCounts{2, 1, 0, 1}));
}

TEST(CountIndicators, PartialPhraseAtEndDoesNotMatch) {
    const LexiconSet lex({"coded phrase"}, {}, {});
    EXPECT_EQ(count_indicators(toks({"x", "coded"}), lex), (IndicatorCounts{0, 0, 0, 0}));
}

TEST(CountIndicators, TotalsAddUpAndSingleWordCountsArePermutationInvariant) {
    const LexiconSet lex({"a1", "a2"}, {"c1", "c2", "c3"}, {"p1"});
    const std::vector<std::string> pool{"a1", "a2", "c1", "c2", "c3", "p1", "w1", "w2", "w3", "w4"};
    Rng rng = make_rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        Tokens t;
        const auto len = uniform_index(rng, 30);
        for (std::size_t i = 0; i < len; ++i) t.push_back(pool[uniform_index(rng, pool.size())]);
        const auto c = count_indicators(t, lex);
        ASSERT_EQ(c.n, c.n_plus + c.n_minus + c.n_ctx);
        std::shuffle(t.begin(), t.end(), rng);
        ASSERT_EQ(count_indicators(t, lex), c);
    }
}

TEST(CorpusStats, FractionPerPostType) {
    const LexiconSet lex({"slur"}, {}, {});
    std::vector<Post> posts{
        post("1", "a", PostType::quote, "b", "slur here"), post("2", "a", PostType::quote, "b", "fine"),
        post("3", "a", PostType::quote, "b", "fine"),      post("4", "a", PostType::quote, "b", "fine"),
        post("5", "a", PostType::original, {}, "slur"),
    };
    const auto rows = corpus_stats(posts, lex);
    ASSERT_EQ(rows.size(), 3U);
    EXPECT_EQ(rows[0].type, PostType::quote);
    EXPECT_EQ(rows[0].count, 4U);
    EXPECT_DOUBLE_EQ(rows[0].fraction_direct(), 0.25);
    EXPECT_EQ(rows[1].count, 0U);
    EXPECT_DOUBLE_EQ(rows[1].fraction_direct(), 0.0);
    EXPECT_DOUBLE_EQ(rows[2].fraction_direct(), 1.0);

    std::ostringstream csv;
    write_corpus_stats_csv(csv, rows);
    EXPECT_EQ(csv.str(), "post_type,count,pct_direct\nquote,4,25.0000\nreply,0,0.0000\noriginal,1,100.0000\n");
}

TEST(CorpusStats, EmptyCorpus) {
    const auto rows = corpus_stats(std::vector<Post>{}, LexiconSet({"x"}, {}, {}));
    for (const auto& r : rows) {
        EXPECT_EQ(r.count, 0U);
        EXPECT_EQ(r.fraction_direct(), 0.0);
    }
}

TEST(ExtractInteractions, RepliesQuotesAndDrops) {
    std::vector<Post> posts{
        post("1", "A", PostType::reply, "B", "Hi there"),
        post("2", "A", PostType::original, {}, "solo"),
        post("3", "A", PostType::quote, "A", "me again"),
        post("4", "C", PostType::quote, {}, "lost parent"),
        post("5", "C", PostType::quote, "A", "q"),
    };
    ExtractionDiagnostics diag;
    const auto it = extract_interactions(posts, &diag);
    ASSERT_EQ(it.size(), 2U);
    EXPECT_EQ(it[0].source, "A");
    EXPECT_EQ(it[0].target, "B");
    EXPECT_EQ(it[0].layer, InteractionLayer::reply);
    EXPECT_EQ(it[0].message_tokens, toks({"hi", "there"}));
    EXPECT_EQ(it[0].post_id, "1");
    EXPECT_EQ(it[1].layer, InteractionLayer::quote);
    EXPECT_EQ(diag.self_interactions, 1U);
    EXPECT_EQ(diag.missing_parent, 1U);
}

TEST(PostsJsonl, RoundTripAndValidation) {
    std::vector<Post> posts{post("1", "A", PostType::reply, "B", "text \"quoted\""),
                            post("2", "B", PostType::original, {}, "")};
    std::stringstream ss;
    write_posts_jsonl(ss, posts);
    const auto back = read_posts_jsonl(ss);
    ASSERT_EQ(back.size(), 2U);
    EXPECT_EQ(back[0].text, posts[0].text);
    EXPECT_EQ(back[0].parent_author, std::optional<std::string>("B"));
    EXPECT_FALSE(back[1].parent_author.has_value());

    std::istringstream dup(R"({"id":"1","author":"a","type":"original","text":"x"}
{"id":"1","author":"b","type":"original","text":"y"})");
    EXPECT_THROW(read_posts_jsonl(dup), Error);
    std::istringstream bad_type(R"({"id":"1","author":"a","type":"repost","text":"x"})");
    EXPECT_THROW(read_posts_jsonl(bad_type), Error);
    std::istringstream orphan(R"({"id":"1","author":"a","type":"original","parent_author":"b","text":"x"})");
    EXPECT_THROW(read_posts_jsonl(orphan), Error);
    std::istringstream broken("{not json");
    EXPECT_THROW(read_posts_jsonl(broken), Error);
}

TEST(PhraseList, CommentsAndHashtags) {
    std::istringstream in("# a comment\n#\n## header\n#hatetag\n  coded phrase  \n\nslur\n");
    EXPECT_EQ(read_phrase_list(in), (std::vector<std::string>{"#hatetag", "coded phrase", "slur"}));
}
