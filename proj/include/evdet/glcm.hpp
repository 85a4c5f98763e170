#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "evdet/error.hpp"
#include "evdet/image.hpp"

namespace evdet {

/// Pixel displacement (dy, dx) between the two members of a co-occurring pair.
struct Offset {
    int dy;
    int dx;

    friend bool operator==(const Offset&, const Offset&) = default;
};

/// The four distance-1 directions: 0, 90, 45 and 135 degrees.
inline constexpr Offset kStandardOffsets[4] = {{0, 1}, {1, 0}, {1, 1}, {1, -1}};

/// Normalized symmetric grey-level co-occurrence matrix.
struct GlcmMatrix {
    std::size_t levels = 0;
    std::vector<double> probs; // row-major levels x levels

    double operator()(std::size_t i, std::size_t j) const { return probs[i * levels + j]; }
};

inline std::size_t quantize_level(std::uint8_t intensity, std::size_t levels) {
    return static_cast<std::size_t>(intensity) * levels / 256;
}

/// Counts each valid pair (p, p + offset) in both orders and normalizes.
inline GlcmMatrix glcm(const GrayRaster& g, Offset offset, std::size_t levels = 16) {
    if (levels < 1 || levels > 256) throw ConfigError("GLCM levels must be in [1, 256]");
    const auto w = static_cast<long>(g.width);
    const auto h = static_cast<long>(g.height);
    GlcmMatrix m{levels, std::vector<double>(levels * levels, 0.0)};
    std::vector<std::size_t> counts(levels * levels, 0);
    std::size_t total = 0;
    for (long y = 0; y < h; ++y) {
        const long y2 = y + offset.dy;
        if (y2 < 0 || y2 >= h) continue;
        for (long x = 0; x < w; ++x) {
            const long x2 = x + offset.dx;
            if (x2 < 0 || x2 >= w) continue;
            const auto a = quantize_level(g.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y)), levels);
            const auto b = quantize_level(g.at(static_cast<std::size_t>(x2), static_cast<std::size_t>(y2)), levels);
            ++counts[a * levels + b];
            ++counts[b * levels + a];
            total += 2;
        }
    }
    if (total == 0) throw DataError("image too small for GLCM offset");
    for (std::size_t i = 0; i < counts.size(); ++i)
        m.probs[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    return m;
}

struct HaralickFeatures {
    double contrast = 0.0;
    double correlation = 0.0;
    double energy = 0.0;
    double homogeneity = 0.0;
};

/// Contrast, correlation, energy (angular second moment) and homogeneity.
/// Correlation is 1 when either marginal has zero variance.
inline HaralickFeatures haralick(const GlcmMatrix& m) {
    const std::size_t L = m.levels;
    double mu_i = 0.0, mu_j = 0.0;
    HaralickFeatures f;
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = 0; j < L; ++j) {
            const double p = m(i, j);
            if (p == 0.0) continue;
            const double d = static_cast<double>(i) - static_cast<double>(j);
            f.contrast += p * d * d;
            f.energy += p * p;
            f.homogeneity += p / (1.0 + std::abs(d));
            mu_i += static_cast<double>(i) * p;
            mu_j += static_cast<double>(j) * p;
        }
    double var_i = 0.0, var_j = 0.0, cov = 0.0;
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = 0; j < L; ++j) {
            const double p = m(i, j);
            if (p == 0.0) continue;
            const double di = static_cast<double>(i) - mu_i;
            const double dj = static_cast<double>(j) - mu_j;
            var_i += di * di * p;
            var_j += dj * dj * p;
            cov += di * dj * p;
        }
    const double denom = std::sqrt(var_i) * std::sqrt(var_j);
    f.correlation = denom == 0.0 ? 1.0 : std::clamp(cov / denom, -1.0, 1.0);
    return f;
}

} // namespace evdet
