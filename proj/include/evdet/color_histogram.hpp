#pragma once

#include <vector>

#include "evdet/error.hpp"
#include "evdet/feature_vector.hpp"
#include "evdet/image.hpp"

namespace evdet {

/// Per-channel R, G, B histograms, each normalized to sum 1, concatenated.
inline std::vector<double> color_histogram_dense(const Raster& r, std::size_t bins_per_channel = 16) {
    if (bins_per_channel == 0 || 256 % bins_per_channel != 0)
        throw ConfigError("histogram bins per channel must divide 256");
    const std::size_t width = 256 / bins_per_channel;
    std::vector<std::size_t> counts(3 * bins_per_channel, 0);
    for (const auto& p : r.pixels)
        for (std::size_t c = 0; c < 3; ++c) ++counts[c * bins_per_channel + p[c] / width];
    std::vector<double> out(counts.size());
    const auto n = static_cast<double>(r.pixels.size());
    for (std::size_t i = 0; i < counts.size(); ++i) out[i] = static_cast<double>(counts[i]) / n;
    return out;
}

inline FeatureVector color_histogram(const Raster& r, std::size_t bins_per_channel = 16) {
    return FeatureVector::from_dense(color_histogram_dense(r, bins_per_channel));
}

} // namespace evdet
