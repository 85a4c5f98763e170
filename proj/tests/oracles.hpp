#pragma once
// Reference computations shared by the unit tests and the acceptance binary.
// Each one is written directly from the definition and avoids the library's
// own code paths.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "evdet/classifiers.hpp"
#include "evdet/fusion.hpp"
#include "evdet/glcm.hpp"
#include "evdet/text_features.hpp"

namespace evdet::oracle {

inline FeatureVector fv(std::vector<double> v) { return FeatureVector::from_dense(v); }

inline std::vector<FeatureVector> random_points(std::size_t n, std::size_t dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<FeatureVector> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> v(dim);
        for (auto& x : v) x = g(rng);
        out.push_back(fv(v));
    }
    return out;
}

// Two Gaussian blobs at (+-3, +-3), labels alternate. 100 points.
inline void separable_fixture(std::uint64_t seed, std::vector<FeatureVector>& xs, std::vector<int>& ys) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 0.7);
    for (int i = 0; i < 100; ++i) {
        const int y = i % 2;
        const double c = y ? 3.0 : -3.0;
        xs.push_back(fv({c + g(rng), c + g(rng)}));
        ys.push_back(y);
    }
}

// Full sort of every (distance, index) pair, then a plain majority count.
inline Prediction knn_oracle(const KnnModel& m, const FeatureVector& x) {
    const auto q = m.scaler.transform(x);
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t i = 0; i < m.exemplars.size(); ++i) {
        double s = 0;
        for (std::size_t d = 0; d < q.size(); ++d) s += (q[d] - m.exemplars[i][d]) * (q[d] - m.exemplars[i][d]);
        all.emplace_back(std::sqrt(s), i);
    }
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        return a.first < b.first || (a.first == b.first && a.second < b.second);
    });
    int votes[2] = {0, 0};
    for (std::size_t i = 0; i < m.k; ++i) ++votes[m.labels[all[i].second]];
    const int label = votes[1] > votes[0] ? 1 : 0;
    return {label, static_cast<double>(votes[label]) / static_cast<double>(m.k)};
}

// Statistics taken straight from the list of (a, b) pairs, never forming
// the co-occurrence matrix. Energy is the probability that two pairs drawn
// independently coincide.
inline HaralickFeatures pair_oracle(const GrayRaster& g, Offset off, std::size_t levels) {
    std::vector<std::pair<int, int>> pairs;
    for (long y = 0; y < static_cast<long>(g.height); ++y)
        for (long x = 0; x < static_cast<long>(g.width); ++x) {
            const long y2 = y + off.dy, x2 = x + off.dx;
            if (y2 < 0 || x2 < 0 || y2 >= static_cast<long>(g.height) || x2 >= static_cast<long>(g.width)) continue;
            const int a = g.at(x, y) * static_cast<int>(levels) / 256;
            const int b = g.at(x2, y2) * static_cast<int>(levels) / 256;
            pairs.emplace_back(a, b);
            pairs.emplace_back(b, a);
        }
    const double n = static_cast<double>(pairs.size());
    HaralickFeatures f;
    double mu_a = 0, mu_b = 0;
    for (auto [a, b] : pairs) {
        f.contrast += (a - b) * (a - b) / n;
        f.homogeneity += 1.0 / (1.0 + std::abs(a - b)) / n;
        mu_a += a / n;
        mu_b += b / n;
    }
    std::size_t same = 0;
    for (const auto& p : pairs)
        for (const auto& q : pairs) same += p == q;
    f.energy = static_cast<double>(same) / (n * n);
    double va = 0, vb = 0, cov = 0;
    for (auto [a, b] : pairs) {
        va += (a - mu_a) * (a - mu_a) / n;
        vb += (b - mu_b) * (b - mu_b) / n;
        cov += (a - mu_a) * (b - mu_b) / n;
    }
    f.correlation = va * vb == 0 ? 1.0 : cov / std::sqrt(va * vb);
    return f;
}

// Brute-force weight: count occurrences and containing documents directly.
inline double tfidf_weight(const std::string& term, const TokenList& doc, const std::vector<TokenList>& corpus) {
    double tf = 0;
    for (const auto& t : doc) tf += t == term;
    double df = 0;
    for (const auto& d : corpus) df += std::find(d.begin(), d.end(), term) != d.end();
    return tf * std::log(static_cast<double>(corpus.size()) / df);
}

// Re-evaluates every candidate threshold directly, without the sweep.
inline Calibration exhaustive_scan(const std::vector<Prediction>& text, const std::vector<Prediction>& image,
                                   const std::vector<int>& labels) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> grid = {-inf};
    double max_score = -inf;
    for (const auto& p : text) {
        grid.push_back(p.score);
        max_score = std::max(max_score, p.score);
    }
    grid.push_back(max_score + 1.0);
    std::sort(grid.begin(), grid.end());
    Calibration best{inf, -1.0};
    for (double tau : grid) {
        double correct = 0;
        for (std::size_t i = 0; i < labels.size(); ++i)
            correct += (text[i].score < tau ? image[i].label : text[i].label) == labels[i];
        const double acc = correct / static_cast<double>(labels.size());
        if (acc > best.validation_accuracy || (acc == best.validation_accuracy && tau < best.tau)) best = {tau, acc};
    }
    return best;
}

inline double channel_accuracy(const std::vector<Prediction>& preds, const std::vector<int>& labels) {
    double correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) correct += preds[i].label == labels[i];
    return correct / static_cast<double>(labels.size());
}

} // namespace evdet::oracle
