#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "evdet/error.hpp"
#include "evdet/feature_vector.hpp"
#include "evdet/image.hpp"

namespace evdet {

struct HogConfig {
    std::size_t resize_width = 64;
    std::size_t resize_height = 64;
    std::size_t cell = 8;          // pixels per cell side
    std::size_t block = 2;         // cells per block side
    std::size_t block_stride = 1;  // in cells
    std::size_t bins = 9;          // unsigned orientation bins over [0, 180)
    double clip = 0.2;
    double epsilon = 1e-6;

    void validate() const {
        if (cell == 0 || resize_width % cell != 0 || resize_height % cell != 0)
            throw ConfigError("HOG resize dimensions must be divisible by the cell size");
        if (bins < 2) throw ConfigError("HOG needs at least two orientation bins");
        if (block == 0 || block_stride == 0 || block > resize_width / cell || block > resize_height / cell)
            throw ConfigError("HOG block does not fit the cell grid");
    }

    std::size_t blocks_x() const { return (resize_width / cell - block) / block_stride + 1; }
    std::size_t blocks_y() const { return (resize_height / cell - block) / block_stride + 1; }
    std::size_t block_length() const { return block * block * bins; }
    std::size_t length() const { return blocks_x() * blocks_y() * block_length(); }

    friend bool operator==(const HogConfig&, const HogConfig&) = default;
};

/// Histogram of oriented gradients over an image already at the configured size.
///
/// Gradients are centered differences with edge replication. Each pixel
/// votes its magnitude into the two orientation bins nearest its angle,
/// split linearly. Overlapping 2x2-cell blocks are L2-Hys normalized.
inline std::vector<double> hog_dense(const GrayRaster& g, const HogConfig& cfg = {}) {
    cfg.validate();
    if (g.width % cfg.cell != 0 || g.height % cfg.cell != 0)
        throw DataError("image dimensions are not divisible by the HOG cell size");
    const std::size_t cells_x = g.width / cfg.cell;
    const std::size_t cells_y = g.height / cfg.cell;
    const std::size_t bins = cfg.bins;
    const double bin_width = 180.0 / static_cast<double>(bins);

    std::vector<double> cells(cells_x * cells_y * bins, 0.0);
    for (std::size_t y = 0; y < g.height; ++y) {
        const std::size_t yu = y == 0 ? 0 : y - 1;
        const std::size_t yd = std::min(y + 1, g.height - 1);
        for (std::size_t x = 0; x < g.width; ++x) {
            const std::size_t xl = x == 0 ? 0 : x - 1;
            const std::size_t xr = std::min(x + 1, g.width - 1);
            const double gx = static_cast<double>(g.at(xr, y)) - static_cast<double>(g.at(xl, y));
            const double gy = static_cast<double>(g.at(x, yd)) - static_cast<double>(g.at(x, yu));
            const double mag = std::hypot(gx, gy);
            if (mag == 0.0) continue;
            double angle = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
            if (angle < 0.0) angle += 180.0;
            if (angle >= 180.0) angle -= 180.0;
            const double pos = angle / bin_width - 0.5;
            const double lower = std::floor(pos);
            const double frac = pos - lower;
            const auto b0 = static_cast<std::size_t>((static_cast<long>(lower) + static_cast<long>(bins)) %
                                                     static_cast<long>(bins));
            const std::size_t b1 = (b0 + 1) % bins;
            double* hist = &cells[((y / cfg.cell) * cells_x + x / cfg.cell) * bins];
            hist[b0] += (1.0 - frac) * mag;
            hist[b1] += frac * mag;
        }
    }

    const std::size_t bx_count = (cells_x - cfg.block) / cfg.block_stride + 1;
    const std::size_t by_count = (cells_y - cfg.block) / cfg.block_stride + 1;
    const std::size_t block_len = cfg.block * cfg.block * bins;
    std::vector<double> out;
    out.reserve(bx_count * by_count * block_len);
    std::vector<double> block(block_len);
    const double eps2 = cfg.epsilon * cfg.epsilon;
    for (std::size_t by = 0; by < by_count; ++by) {
        for (std::size_t bx = 0; bx < bx_count; ++bx) {
            std::size_t n = 0;
            for (std::size_t cy = 0; cy < cfg.block; ++cy)
                for (std::size_t cx = 0; cx < cfg.block; ++cx) {
                    const std::size_t cell = (by * cfg.block_stride + cy) * cells_x + bx * cfg.block_stride + cx;
                    for (std::size_t b = 0; b < bins; ++b) block[n++] = cells[cell * bins + b];
                }
            double ss = 0.0;
            for (double v : block) ss += v * v;
            double scale = 1.0 / std::sqrt(ss + eps2);
            ss = 0.0;
            for (double& v : block) {
                v = std::min(v * scale, cfg.clip);
                ss += v * v;
            }
            scale = 1.0 / std::sqrt(ss + eps2);
            for (double v : block) out.push_back(v * scale);
        }
    }
    return out;
}

inline FeatureVector hog_descriptor(const GrayRaster& g, const HogConfig& cfg = {}) {
    return FeatureVector::from_dense(hog_dense(g, cfg));
}

} // namespace evdet
