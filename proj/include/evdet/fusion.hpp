#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "evdet/classifiers.hpp"
#include "evdet/error.hpp"
#include "evdet/feature_vector.hpp"

namespace evdet {

enum class FusionMode { gate, concat };
enum class ScoreKind { vote_fraction, margin };

inline std::string to_string(FusionMode m) { return m == FusionMode::gate ? "gate" : "concat"; }
inline std::string to_string(ScoreKind k) { return k == ScoreKind::vote_fraction ? "vote_fraction" : "margin"; }

inline FusionMode parse_fusion_mode(const std::string& s) {
    if (s == "gate") return FusionMode::gate;
    if (s == "concat") return FusionMode::concat;
    throw ConfigError("unknown fusion mode '" + s + "' (expected gate or concat)");
}

inline ScoreKind parse_score_kind(const std::string& s) {
    if (s == "vote_fraction") return ScoreKind::vote_fraction;
    if (s == "margin") return ScoreKind::margin;
    throw ConfigError("unknown score kind '" + s + "'");
}

inline ScoreKind score_kind_of(ClassifierKind k) {
    return k == ClassifierKind::knn ? ScoreKind::vote_fraction : ScoreKind::margin;
}

struct FusionPolicy {
    FusionMode mode = FusionMode::gate;
    double tau = -std::numeric_limits<double>::infinity();
    ScoreKind score_kind = ScoreKind::margin;
};

enum class Channel { text, image };

inline const char* to_string(Channel c) { return c == Channel::text ? "text" : "image"; }

/// The channel whose label the gate uses: image when the text score is
/// strictly below tau, text otherwise.
inline Channel gate_channel(const Prediction& text, double tau) {
    return text.score < tau ? Channel::image : Channel::text;
}

inline int fuse_gate(const Prediction& text, const Prediction& image, double tau) {
    return gate_channel(text, tau) == Channel::image ? image.label : text.label;
}

/// [text | image]; image indices are shifted by dim(text).
inline FeatureVector fuse_concat(const FeatureVector& text, const FeatureVector& image) {
    std::vector<FeatureVector::Entry> entries(text.entries());
    entries.reserve(text.entries().size() + image.entries().size());
    for (const auto& [i, w] : image.entries()) entries.emplace_back(text.dim() + i, w);
    return FeatureVector(text.dim() + image.dim(), std::move(entries));
}

struct Calibration {
    double tau = -std::numeric_limits<double>::infinity();
    double validation_accuracy = 0.0;
};

inline double gated_accuracy(std::span<const Prediction> text, std::span<const Prediction> image,
                             std::span<const int> labels, double tau) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) correct += fuse_gate(text[i], image[i], tau) == labels[i];
    return static_cast<double>(correct) / static_cast<double>(labels.size());
}

/// Picks tau from {-inf} U {observed text scores} U {max score + 1} to
/// maximize gated accuracy; ties go to the smallest tau.
inline Calibration calibrate_threshold(std::span<const Prediction> text, std::span<const Prediction> image,
                                       std::span<const int> labels) {
    if (labels.empty()) throw DataError("threshold calibration needs at least one record");
    if (text.size() != labels.size() || image.size() != labels.size())
        throw DataError("calibration lists differ in length");

    std::vector<double> scores;
    scores.reserve(text.size());
    for (const auto& p : text) scores.push_back(p.score);
    std::sort(scores.begin(), scores.end());
    scores.erase(std::unique(scores.begin(), scores.end()), scores.end());

    std::vector<double> grid;
    grid.reserve(scores.size() + 2);
    grid.push_back(-std::numeric_limits<double>::infinity());
    grid.insert(grid.end(), scores.begin(), scores.end());
    grid.push_back(scores.back() + 1.0);

    // Sweep the ascending grid: moving tau past a score flips exactly the
    // records holding that score from the text label to the image label.
    std::vector<std::size_t> idx(text.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return text[a].score < text[b].score; });

    std::size_t correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) correct += text[i].label == labels[i];
    Calibration best{grid.front(), static_cast<double>(correct) / static_cast<double>(labels.size())};
    std::size_t best_correct = correct;
    std::size_t cursor = 0;
    for (std::size_t g = 1; g < grid.size(); ++g) {
        while (cursor < idx.size() && text[idx[cursor]].score < grid[g]) {
            const auto r = idx[cursor++];
            correct -= text[r].label == labels[r];
            correct += image[r].label == labels[r];
        }
        if (correct > best_correct) {
            best_correct = correct;
            best = {grid[g], static_cast<double>(correct) / static_cast<double>(labels.size())};
        }
    }
    return best;
}

} // namespace evdet
