#include <gtest/gtest.h>

#include <cmath>

#include "weaknet/graph.hpp"
#include "weaknet/synth.hpp"

using namespace weaknet;

TEST(Synth, LabelsRecoverPlantedClasses) {
    SynthSpec spec;
    spec.n_users = 200;
    spec.seed = 7;
    const auto c = gen_corpus(spec);
    const auto labels = label_users(c.posts, c.lexicon, 1, c.users);
    std::size_t agree = 0;
    for (std::size_t i = 0; i < c.users.size(); ++i) {
        const auto it = std::find_if(labels.begin(), labels.end(), [&](const auto& l) { return l.user == c.users[i]; });
        ASSERT_NE(it, labels.end());
        agree += it->hateful == (c.hateful[i] != 0);
    }
    EXPECT_GE(static_cast<double>(agree) / static_cast<double>(c.users.size()), 0.99);
}

TEST(Synth, Deterministic) {
    SynthSpec spec;
    spec.n_users = 80;
    const auto a = gen_multilayer_sbm(spec);
    const auto b = gen_multilayer_sbm(spec);
    EXPECT_EQ(a.graph.hash(), b.graph.hash());
    EXPECT_EQ(a.hateful, b.hateful);
    spec.seed = 2;
    EXPECT_NE(gen_multilayer_sbm(spec).graph.hash(), a.graph.hash());
}

TEST(Synth, NoIndicatorsMeansNoHatefulUsers) {
    SynthSpec spec;
    spec.n_users = 60;
    spec.indicator_rate_hateful = 0.0;
    spec.indicator_rate_neutral = 0.0;
    const auto c = gen_corpus(spec);
    for (const auto& l : label_users(c.posts, c.lexicon, 1, c.users)) EXPECT_FALSE(l.hateful);
}

TEST(Synth, EdgeCountsMatchBlockProbabilities) {
    SynthSpec spec;
    spec.n_users = 300;
    spec.layers[0] = {0.1, 0.02, 0.03, 0.05, 1.0, 1.0};
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        spec.seed = seed;
        const auto s = gen_multilayer_sbm(spec);
        double nh = 0;
        for (int h : s.hateful) nh += h;
        const double nn = static_cast<double>(spec.n_users) - nh;
        const auto& b = spec.layers[0];
        const double mean = nh * (nh - 1) * b.p_hh + nh * nn * (b.p_hn + b.p_nh) + nn * (nn - 1) * b.p_nn;
        const double var = nh * (nh - 1) * b.p_hh * (1 - b.p_hh) + nh * nn * (b.p_hn * (1 - b.p_hn) + b.p_nh * (1 - b.p_nh)) +
                           nn * (nn - 1) * b.p_nn * (1 - b.p_nn);
        EXPECT_LT(std::abs(static_cast<double>(s.graph.edge_count(0)) - mean), 3 * std::sqrt(var)) << "seed " << seed;
    }
}

TEST(Synth, WeightsStayInsideUnitInterval) {
    SynthSpec spec;
    spec.n_users = 100;
    spec.weight_hh = 0.99;
    spec.weight_spread = 0.5;
    const auto s = gen_multilayer_sbm(spec);
    for (std::size_t l = 0; l < 2; ++l) {
        for (NodeId u = 0; u < s.graph.node_count(); ++u) {
            for (const auto& e : s.graph.out_edges(l, u)) {
                ASSERT_GT(e.weight, 0.0);
                ASSERT_LT(e.weight, 1.0);
            }
        }
    }
}

TEST(Synth, SpecValidation) {
    SynthSpec spec;
    spec.layers = {LayerBlockSpec{0, 0, 0, 0, 1, 1}, LayerBlockSpec{0, 0, 0, 0, 1, 1}};
    EXPECT_THROW(gen_multilayer_sbm(spec), Error);
    spec = {};
    spec.layers[1].p_hh = 1.5;
    EXPECT_THROW(spec.validate(), Error);
    spec = {};
    spec.layers[0].weight_scale = 0.0;
    EXPECT_THROW(spec.validate(), Error);
    spec = {};
    spec.n_users = 2;
    EXPECT_THROW(spec.validate(), Error);
}
