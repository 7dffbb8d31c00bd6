#pragma once

// Hateful-user classification over node embeddings: stratified splits,
// L2-regularized logistic regression and binary metrics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "weaknet/common.hpp"

namespace weaknet {

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Stratified: each class contributes round(ratio * class size) members to
/// train, the rest to test. Both sides must keep at least one member of
/// each class unless `clamp` is set, in which case counts are pushed inside
/// [1, class size - 1].
inline Split train_eval_split(std::span<const int> labels, double ratio, std::uint64_t seed, bool clamp = false) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw Error("training ratio must lie in (0, 1)");
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i] != 0 ? 1 : 0].push_back(i);
    if (by_class[0].empty() || by_class[1].empty()) throw Error("both classes must be present");
    Split s;
    Rng rng = make_rng(seed, 0x5b17);
    for (auto& members : by_class) {
        std::shuffle(members.begin(), members.end(), rng);
        auto take = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(members.size())));
        if (take == 0 || take == members.size()) {
            if (!clamp || members.size() < 2) {
                throw Error("training ratio leaves a class empty on one side of the split");
            }
            take = std::clamp<std::size_t>(take, 1, members.size() - 1);
        }
        s.train.insert(s.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
        s.test.insert(s.test.end(), members.begin() + static_cast<std::ptrdiff_t>(take), members.end());
    }
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

struct ClassifierConfig {
    double l2 = 1e-3;
    double tolerance = 1e-6;
    std::size_t max_iter = 1000;
};

/// Logistic regression on standardized features (train-set mean and
/// standard deviation); constant features are zeroed.
struct ClassifierModel {
    std::vector<double> mean;
    std::vector<double> scale;
    std::vector<double> weights;
    double bias = 0.0;
    double l2 = 0.0;
    std::size_t iterations = 0;

    [[nodiscard]] double logit(std::span<const float> x) const {
        double z = bias;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            z += weights[i] * (static_cast<double>(x[i]) - mean[i]) * scale[i];
        }
        return z;
    }
    [[nodiscard]] double probability(std::span<const float> x) const { return sigmoid(logit(x)); }
    [[nodiscard]] int predict(std::span<const float> x) const { return logit(x) > 0 ? 1 : 0; }
};

namespace detail {

inline double logistic_objective(const std::vector<std::vector<double>>& z, std::span<const int> y,
                                 std::span<const double> w, double b, double l2) {
    double f = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        double s = b;
        for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * z[i][j];
        const double m = y[i] ? s : -s;
        f += m >= 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
    }
    f /= static_cast<double>(z.size());
    double r = 0;
    for (double v : w) r += v * v;
    return f + 0.5 * l2 * r;
}

}  // namespace detail

/// Gradient descent with backtracking line search on the mean log-loss plus
/// (l2 / 2)|w|^2; stops when the gradient norm falls below the tolerance.
inline ClassifierModel train_classifier(std::span<const std::vector<float>> features, std::span<const int> labels,
                                        const ClassifierConfig& cfg = {}) {
    if (features.empty() || features.size() != labels.size()) throw Error("features and labels must align");
    const auto positives = std::count_if(labels.begin(), labels.end(), [](int v) { return v != 0; });
    if (positives == 0 || positives == static_cast<std::ptrdiff_t>(labels.size())) {
        throw Error("training data must contain both classes");
    }
    const std::size_t n = features.size();
    const std::size_t d = features.front().size();
    ClassifierModel m;
    m.l2 = cfg.l2;
    m.mean.assign(d, 0.0);
    m.scale.assign(d, 0.0);
    for (const auto& x : features) {
        if (x.size() != d) throw Error("inconsistent feature dimension");
        for (std::size_t j = 0; j < d; ++j) m.mean[j] += x[j];
    }
    for (auto& v : m.mean) v /= static_cast<double>(n);
    for (const auto& x : features) {
        for (std::size_t j = 0; j < d; ++j) m.scale[j] += (x[j] - m.mean[j]) * (x[j] - m.mean[j]);
    }
    for (auto& v : m.scale) {
        const double sd = std::sqrt(v / static_cast<double>(n));
        v = sd > 1e-12 ? 1.0 / sd : 0.0;
    }
    std::vector<std::vector<double>> z(n, std::vector<double>(d));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) z[i][j] = (features[i][j] - m.mean[j]) * m.scale[j];
    }

    m.weights.assign(d, 0.0);
    const double prior = static_cast<double>(positives) / static_cast<double>(n);
    m.bias = std::log(prior / (1.0 - prior));
    std::vector<double> gw(d);
    std::vector<double> trial(d);
    double step = 1.0;
    double f = detail::logistic_objective(z, labels, m.weights, m.bias, cfg.l2);
    for (std::size_t it = 0; it < cfg.max_iter; ++it) {
        std::fill(gw.begin(), gw.end(), 0.0);
        double gb = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = m.bias;
            for (std::size_t j = 0; j < d; ++j) s += m.weights[j] * z[i][j];
            const double r = sigmoid(s) - (labels[i] ? 1.0 : 0.0);
            for (std::size_t j = 0; j < d; ++j) gw[j] += r * z[i][j];
            gb += r;
        }
        double norm2 = 0;
        for (std::size_t j = 0; j < d; ++j) {
            gw[j] = gw[j] / static_cast<double>(n) + cfg.l2 * m.weights[j];
            norm2 += gw[j] * gw[j];
        }
        gb /= static_cast<double>(n);
        norm2 += gb * gb;
        m.iterations = it + 1;
        if (std::sqrt(norm2) < cfg.tolerance) break;
        // Armijo backtracking; the step grows again after each success.
        step = std::min(step * 2.0, 1e4);
        double fb = 0;
        double b_trial = 0;
        while (true) {
            for (std::size_t j = 0; j < d; ++j) trial[j] = m.weights[j] - step * gw[j];
            b_trial = m.bias - step * gb;
            fb = detail::logistic_objective(z, labels, trial, b_trial, cfg.l2);
            if (fb <= f - 0.5 * step * norm2 || step < 1e-12) break;
            step *= 0.5;
        }
        if (step < 1e-12) break;
        m.weights.swap(trial);
        m.bias = b_trial;
        f = fb;
    }
    return m;
}

struct Metrics {
    double f1 = 0;
    double accuracy = 0;
    double precision = 0;
    double recall = 0;
    /// Set when a ratio had a zero denominator and was reported as 0.
    bool precision_undefined = false;
    bool recall_undefined = false;
};

inline Metrics metrics_from_confusion(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn, std::uint64_t tn) {
    Metrics m;
    const auto total = tp + fp + fn + tn;
    m.accuracy = total == 0 ? 0.0 : static_cast<double>(tp + tn) / static_cast<double>(total);
    if (tp + fp == 0) {
        m.precision_undefined = true;
    } else {
        m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    }
    if (tp + fn == 0) {
        m.recall_undefined = true;
    } else {
        m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    }
    m.f1 = m.precision + m.recall > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    return m;
}

/// Positive class = hateful (label 1).
inline Metrics evaluate_predictions(std::span<const int> predicted, std::span<const int> actual) {
    if (predicted.size() != actual.size() || actual.empty()) throw Error("evaluation needs aligned, nonempty labels");
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const bool p = predicted[i] != 0;
        const bool a = actual[i] != 0;
        tp += p && a;
        fp += p && !a;
        fn += !p && a;
        tn += !p && !a;
    }
    return metrics_from_confusion(tp, fp, fn, tn);
}

inline Metrics evaluate(const ClassifierModel& model, std::span<const std::vector<float>> features,
                        std::span<const int> labels) {
    std::vector<int> predicted(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) predicted[i] = model.predict(features[i]);
    return evaluate_predictions(predicted, labels);
}

}  // namespace weaknet
