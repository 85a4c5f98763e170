#pragma once

#include <vector>

#include "evdet/color_histogram.hpp"
#include "evdet/glcm.hpp"
#include "evdet/hog.hpp"
#include "evdet/image.hpp"

namespace evdet {

struct ImageFeatureConfig {
    HogConfig hog;
    std::size_t glcm_levels = 16;
    std::size_t histogram_bins = 16;

    /// HOG, then 4 Haralick values per standard offset, then 3 channel histograms.
    std::size_t length() const { return hog.length() + 16 + 3 * histogram_bins; }

    friend bool operator==(const ImageFeatureConfig&, const ImageFeatureConfig&) = default;
};

/// [HOG | Haralick x 4 offsets | color histogram]. HOG and GLCM both run on
/// the grayscale image resized to the HOG canvas; the color histogram uses
/// the full-resolution raster.
inline std::vector<double> image_feature_dense(const Raster& r, const ImageFeatureConfig& cfg = {}) {
    const auto canvas = resize_bilinear(to_grayscale(r), cfg.hog.resize_width, cfg.hog.resize_height);
    std::vector<double> out = hog_dense(canvas, cfg.hog);
    out.reserve(cfg.length());
    for (const auto& off : kStandardOffsets) {
        const auto h = haralick(glcm(canvas, off, cfg.glcm_levels));
        out.insert(out.end(), {h.contrast, h.correlation, h.energy, h.homogeneity});
    }
    const auto hist = color_histogram_dense(r, cfg.histogram_bins);
    out.insert(out.end(), hist.begin(), hist.end());
    return out;
}

inline FeatureVector image_feature_vector(const Raster& r, const ImageFeatureConfig& cfg = {}) {
    return FeatureVector::from_dense(image_feature_dense(r, cfg));
}

} // namespace evdet
