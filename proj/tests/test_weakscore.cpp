#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "weaknet/weakscore.hpp"

using namespace weaknet;

TEST(Bounds, FixtureTable) {
    for (const auto& c : fixtures::kLossCases) {
        const auto b = compute_bounds(fixtures::counts_of(c));
        EXPECT_NEAR(b.lower, c.lower, 1e-12) << "n=" << c.n;
        EXPECT_NEAR(b.upper, c.upper, 1e-12) << "n=" << c.n;
    }
}

TEST(Bounds, InfeasibleIntervalIsLegal) {
    const auto b = compute_bounds({2, 2, 0, 0});
    EXPECT_DOUBLE_EQ(b.lower, 2.0);
    EXPECT_DOUBLE_EQ(b.upper, 1.0);
    EXPECT_FALSE(b.feasible());
}

TEST(Bounds, OriginalVariantIgnoresContext) {
    // Indicators and positives share one denominator; context phrases drop out.
    const auto b = compute_bounds({4, 1, 1, 2}, BoundsVariant::original);
    EXPECT_DOUBLE_EQ(b.lower, 0.5);
    EXPECT_DOUBLE_EQ(b.upper, 0.5);
    const auto vacuous = compute_bounds({3, 0, 0, 3}, BoundsVariant::original);
    EXPECT_DOUBLE_EQ(vacuous.lower, 0.0);
    EXPECT_DOUBLE_EQ(vacuous.upper, 1.0);
    EXPECT_EQ(parse_bounds_variant("original"), BoundsVariant::original);
    EXPECT_THROW(parse_bounds_variant("other"), Error);
}

TEST(WeakLoss, FixtureTable) {
    for (const auto& c : fixtures::kLossCases) {
        const Bounds b{c.lower, c.upper};
        EXPECT_NEAR(weak_loss(c.y, b), c.loss, 1e-9) << "n=" << c.n << " y=" << c.y;
    }
}

TEST(WeakLoss, ExactlyZeroInsideFeasibleBounds) {
    Rng rng = make_rng(3);
    for (int i = 0; i < 10000; ++i) {
        double lo = uniform01(rng);
        double hi = uniform01(rng);
        if (lo > hi) std::swap(lo, hi);
        const double y = lo + (hi - lo) * uniform01(rng);
        const double l = weak_loss(y, {lo, hi});
        ASSERT_EQ(l, 0.0);
        ASSERT_FALSE(std::signbit(l));
    }
}

TEST(WeakLoss, MonotoneOutsideBounds) {
    const Bounds b{0.3, 0.6};
    double prev = weak_loss(0.3, b);
    for (double y = 0.3; y >= 0.0; y -= 0.01) {
        const double l = weak_loss(y, b);
        ASSERT_GE(l, prev);
        prev = l;
    }
    prev = weak_loss(0.6, b);
    for (double y = 0.6; y <= 1.0; y += 0.01) {
        const double l = weak_loss(y, b);
        ASSERT_GE(l, prev);
        prev = l;
    }
}

TEST(WeakLoss, GradientMatchesFiniteDifferences) {
    Rng rng = make_rng(5);
    for (int i = 0; i < 200; ++i) {
        const Bounds b{uniform01(rng) * 0.8, 0.2 + uniform01(rng) * 0.8};
        const double z = 8.0 * (uniform01(rng) - 0.5);
        const double h = 1e-6;
        const double fd = (weak_loss_logit(z + h, b) - weak_loss_logit(z - h, b)) / (2 * h);
        const double an = weak_loss_logit_dz(z, b);
        // Skip points next to a kink of the piecewise loss.
        const double y = sigmoid(z);
        if (std::abs(y - b.lower) < 1e-4 || std::abs(y - b.upper) < 1e-4) continue;
        ASSERT_NEAR(an, fd, 1e-6 * std::max(1.0, std::abs(fd)));
    }
}

TEST(Scorer, VacuousBoundsGiveZeroLoss) {
    std::vector<std::vector<float>> x{{1, 2}, {-1, 0.5}, {3, 3}};
    std::vector<Bounds> b(3);
    const auto r = train_scorer(x, b, {});
    EXPECT_EQ(r.final_mean_loss, 0.0);
    for (double w : r.model.weights) EXPECT_EQ(w, 0.0);
}

TEST(Scorer, SeparatesIndicatorAndPositiveHalves) {
    Rng rng = make_rng(9);
    std::vector<std::vector<float>> x;
    std::vector<Bounds> b;
    for (int i = 0; i < 400; ++i) {
        const bool hot = i % 2 == 0;
        std::vector<float> v(8);
        for (auto& c : v) c = static_cast<float>(uniform01(rng) - 0.5);
        v[0] += hot ? 1.5F : -1.5F;
        x.push_back(v);
        b.push_back(hot ? Bounds{0.75, 1.0} : Bounds{0.0, 0.5});
    }
    ScorerConfig cfg;
    cfg.epochs = 200;
    cfg.rate = 0.5;
    cfg.batch = 32;
    const auto r = train_scorer(x, b, cfg);
    double hot = 0, cold = 0;
    for (std::size_t i = 0; i < x.size(); ++i) (i % 2 == 0 ? hot : cold) += r.model.score(x[i]);
    EXPECT_LT(r.final_mean_loss, 0.05);
    EXPECT_GE((hot - cold) / 200.0, 0.2);
}

TEST(Scorer, ResultIndependentOfThreadCount) {
    Rng rng = make_rng(1);
    std::vector<std::vector<float>> x;
    std::vector<Bounds> b;
    for (int i = 0; i < 300; ++i) {
        x.push_back({static_cast<float>(uniform01(rng)), static_cast<float>(uniform01(rng))});
        b.push_back(i % 3 == 0 ? Bounds{0.7, 1.0} : Bounds{0.0, 0.4});
    }
    ScorerConfig one;
    one.epochs = 3;
    ScorerConfig four = one;
    four.threads = 4;
    const auto a = train_scorer(x, b, one);
    const auto c = train_scorer(x, b, four);
    for (std::size_t i = 0; i < a.model.weights.size(); ++i) {
        EXPECT_NEAR(a.model.weights[i], c.model.weights[i], 1e-12);
    }
}

TEST(Scorer, InputErrors) {
    std::vector<std::vector<float>> x{{1, 2}};
    std::vector<Bounds> none;
    EXPECT_THROW(train_scorer(x, none, {}), Error);
    EXPECT_THROW(train_scorer(std::vector<std::vector<float>>{}, none, {}), Error);
    std::vector<std::vector<float>> ragged{{1, 2}, {1}};
    std::vector<Bounds> two(2);
    EXPECT_THROW(train_scorer(ragged, two, {}), Error);
}

TEST(Scorer, ZeroModelScoresOneHalf) {
    ScorerModel m;
    m.weights.assign(4, 0.0);
    const std::vector<float> x{1, -2, 3, 4};
    EXPECT_DOUBLE_EQ(m.score(x), 0.5);
}

TEST(RankTopK, OrderAndTies) {
    std::vector<ScoredInteraction> s{{"u", "v", InteractionLayer::reply, 0.9, "a"},
                                     {"u", "v", InteractionLayer::reply, 0.1, "b"},
                                     {"u", "v", InteractionLayer::reply, 0.5, "c"}};
    const auto top = rank_top_k(s, 2);
    ASSERT_EQ(top.size(), 2U);
    EXPECT_EQ(top[0].post_id, "a");
    EXPECT_EQ(top[1].post_id, "c");
    EXPECT_EQ(rank_top_k(s, 10).size(), 3U);
    EXPECT_THROW(rank_top_k(s, 0), Error);

    std::vector<ScoredInteraction> tied{{"u", "v", InteractionLayer::reply, 0.5, "z"},
                                        {"u", "v", InteractionLayer::reply, 0.5, "m"},
                                        {"u", "v", InteractionLayer::reply, 0.5, "a"}};
    const auto t = rank_top_k(tied, 3);
    EXPECT_EQ(t[0].post_id, "a");
    EXPECT_EQ(t[1].post_id, "m");
    EXPECT_EQ(t[2].post_id, "z");
}

TEST(Histogram, CountsEveryScore) {
    const std::vector<double> scores{0.0, 0.04, 0.05, 0.5, 0.999, 1.0};
    const auto h = score_histogram(scores, 20);
    ASSERT_EQ(h.size(), 20U);
    std::uint64_t total = 0;
    for (const auto& bin : h) total += bin.count;
    EXPECT_EQ(total, scores.size());
    EXPECT_EQ(h.front().count, 2U);
    EXPECT_EQ(h.back().count, 2U);
}

TEST(ScoresTsv, RoundTrip) {
    std::vector<ScoredInteraction> s{{"alice", "bob", InteractionLayer::quote, 0.123456789012345, "p1", false},
                                     {"bob", "alice", InteractionLayer::reply, 0.5, "p2", true}};
    std::stringstream ss;
    Provenance prov{"weaknet", "0.1.0", 0xabc, 7, "stage=score"};
    write_scores_tsv(ss, s, &prov);
    const auto back = read_scores_tsv(ss);
    ASSERT_EQ(back.size(), 2U);
    EXPECT_EQ(back[0].source, "alice");
    EXPECT_EQ(back[0].layer, InteractionLayer::quote);
    EXPECT_DOUBLE_EQ(back[0].score, s[0].score);
    EXPECT_EQ(back[1].post_id, "p2");
}

TEST(ScorerFile, RoundTrip) {
    ScorerModel m;
    m.weights = {0.1, -2.5, 1e-30};
    m.bias = -0.75;
    std::stringstream ss;
    save_scorer(ss, m);
    const auto back = load_scorer(ss);
    EXPECT_EQ(back.weights, m.weights);
    EXPECT_EQ(back.bias, m.bias);
}
