#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "weaknet/common.hpp"

namespace weaknet {

/// Vose alias table: O(n) build, O(1) draws from a discrete distribution
/// given by nonnegative weights.
class AliasTable {
public:
    AliasTable() = default;

    explicit AliasTable(std::span<const double> weights) {
        const std::size_t n = weights.size();
        if (n == 0) return;
        double total = 0;
        for (double w : weights) total += w;
        if (!(total > 0)) throw Error("alias table needs positive total weight");
        prob_.assign(n, 0.0);
        alias_.assign(n, 0);
        std::vector<double> scaled(n);
        std::vector<std::uint32_t> small, large;
        for (std::size_t i = 0; i < n; ++i) {
            scaled[i] = weights[i] * static_cast<double>(n) / total;
            (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
        }
        while (!small.empty() && !large.empty()) {
            const auto s = small.back();
            small.pop_back();
            const auto l = large.back();
            prob_[s] = scaled[s];
            alias_[s] = l;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            if (scaled[l] < 1.0) {
                large.pop_back();
                small.push_back(l);
            }
        }
        for (auto i : large) prob_[i] = 1.0;
        for (auto i : small) prob_[i] = 1.0;
    }

    [[nodiscard]] std::size_t size() const { return prob_.size(); }
    [[nodiscard]] bool empty() const { return prob_.empty(); }

    std::uint32_t sample(Rng& rng) const {
        const double u = uniform01(rng) * static_cast<double>(prob_.size());
        auto i = static_cast<std::size_t>(u);
        if (i >= prob_.size()) i = prob_.size() - 1;
        const double frac = u - static_cast<double>(i);
        return frac < prob_[i] ? static_cast<std::uint32_t>(i) : alias_[i];
    }

private:
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
};

/// Negative-sampling noise distribution: counts raised to `power` (0.75 by convention).
inline AliasTable make_noise_table(std::span<const std::uint64_t> counts, double power = 0.75) {
    std::vector<double> w(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        w[i] = std::pow(static_cast<double>(counts[i]), power);
    }
    return AliasTable(w);
}

}  // namespace weaknet
