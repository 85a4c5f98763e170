#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "evdet/error.hpp"

namespace evdet {

using Rgb = std::array<std::uint8_t, 3>;

/// Row-major 8-bit RGB image.
struct Raster {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<Rgb> pixels;

    Raster() = default;
    Raster(std::size_t w, std::size_t h, Rgb fill = {0, 0, 0}) : width(w), height(h), pixels(w * h, fill) {
        if (w == 0 || h == 0) throw DataError("raster dimensions must be positive");
    }

    Rgb& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }
    const Rgb& at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }

    friend bool operator==(const Raster&, const Raster&) = default;
};

/// Row-major 8-bit intensity image.
struct GrayRaster {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> intensities;

    GrayRaster() = default;
    GrayRaster(std::size_t w, std::size_t h, std::uint8_t fill = 0) : width(w), height(h), intensities(w * h, fill) {
        if (w == 0 || h == 0) throw DataError("raster dimensions must be positive");
    }

    std::uint8_t& at(std::size_t x, std::size_t y) { return intensities[y * width + x]; }
    std::uint8_t at(std::size_t x, std::size_t y) const { return intensities[y * width + x]; }

    friend bool operator==(const GrayRaster&, const GrayRaster&) = default;
};

namespace detail {

inline Raster decode_png(const std::filesystem::path& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str()))
        throw IoError("cannot decode PNG " + path.string() + ": " + image.message);
    image.format = PNG_FORMAT_RGBA;
    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw IoError("cannot decode PNG " + path.string() + ": " + msg);
    }
    Raster r(image.width, image.height);
    for (std::size_t i = 0; i < r.pixels.size(); ++i)
        r.pixels[i] = {buffer[4 * i], buffer[4 * i + 1], buffer[4 * i + 2]};
    return r;
}

struct JpegErrorManager {
    jpeg_error_mgr base;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
    bool warned;
};

extern "C" inline void jpeg_error_exit_longjmp(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

// Corrupt-data warnings (e.g. premature end of file) are treated as errors.
extern "C" inline void jpeg_emit_message_strict(j_common_ptr cinfo, int level) {
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    if (level < 0 && !err->warned) {
        err->warned = true;
        (*cinfo->err->format_message)(cinfo, err->message);
    }
}

// Kept free of non-trivial locals so longjmp cannot skip a destructor.
inline bool decode_jpeg_raw(std::FILE* file, JpegErrorManager& err, std::uint8_t** out, unsigned* width,
                            unsigned* height) {
    jpeg_decompress_struct cinfo;
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit_longjmp;
    err.base.emit_message = jpeg_emit_message_strict;
    err.warned = false;
    err.message[0] = '\0';
    *out = nullptr;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        std::free(*out);
        *out = nullptr;
        return false;
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, file);
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    *width = cinfo.output_width;
    *height = cinfo.output_height;
    const std::size_t stride = static_cast<std::size_t>(cinfo.output_width) * 3;
    *out = static_cast<std::uint8_t*>(std::malloc(stride * cinfo.output_height));
    if (*out == nullptr) {
        jpeg_destroy_decompress(&cinfo);
        return false;
    }
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = *out + stride * cinfo.output_scanline;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return !err.warned;
}

inline Raster decode_jpeg(const std::filesystem::path& path) {
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> file(std::fopen(path.c_str(), "rb"), &std::fclose);
    if (!file) throw IoError("cannot open " + path.string());
    JpegErrorManager err{};
    std::uint8_t* data = nullptr;
    unsigned w = 0, h = 0;
    const bool ok = decode_jpeg_raw(file.get(), err, &data, &w, &h);
    std::unique_ptr<std::uint8_t, void (*)(void*)> guard(data, &std::free);
    if (!ok || w == 0 || h == 0) throw IoError("cannot decode JPEG " + path.string() + ": " + err.message);
    Raster r(w, h);
    for (std::size_t i = 0; i < r.pixels.size(); ++i) r.pixels[i] = {data[3 * i], data[3 * i + 1], data[3 * i + 2]};
    return r;
}

} // namespace detail

/// Decodes a PNG or baseline JPEG into 8-bit RGB. Alpha is dropped and
/// grayscale is replicated to three channels.
inline Raster load_raster(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open image " + path.string());
    std::array<unsigned char, 8> magic{};
    in.read(reinterpret_cast<char*>(magic.data()), magic.size());
    const auto got = static_cast<std::size_t>(in.gcount());
    in.close();
    static constexpr std::array<unsigned char, 8> kPng = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
    if (got == 8 && magic == kPng) return detail::decode_png(path);
    if (got >= 3 && magic[0] == 0xFF && magic[1] == 0xD8 && magic[2] == 0xFF) return detail::decode_jpeg(path);
    throw IoError("unrecognized image format: " + path.string());
}

inline void write_png(const std::filesystem::path& path, const Raster& r) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(r.width);
    image.height = static_cast<png_uint_32>(r.height);
    image.format = PNG_FORMAT_RGB;
    std::vector<std::uint8_t> buffer;
    buffer.reserve(r.pixels.size() * 3);
    for (const auto& p : r.pixels) buffer.insert(buffer.end(), p.begin(), p.end());
    if (!png_image_write_to_file(&image, path.c_str(), 0, buffer.data(), 0, nullptr))
        throw IoError("cannot write PNG " + path.string() + ": " + image.message);
}

/// round(0.299 R + 0.587 G + 0.114 B), clamped to [0, 255].
inline GrayRaster to_grayscale(const Raster& r) {
    GrayRaster g(r.width, r.height);
    for (std::size_t i = 0; i < r.pixels.size(); ++i) {
        const auto& p = r.pixels[i];
        const double y = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
        g.intensities[i] = static_cast<std::uint8_t>(std::clamp(std::lround(y), 0L, 255L));
    }
    return g;
}

/// Bilinear resampling with pixel-center alignment and edge clamping.
inline GrayRaster resize_bilinear(const GrayRaster& g, std::size_t w, std::size_t h) {
    if (w == 0 || h == 0) throw DataError("resize target must be positive");
    if (w == g.width && h == g.height) return g;
    GrayRaster out(w, h);
    const double sx = static_cast<double>(g.width) / static_cast<double>(w);
    const double sy = static_cast<double>(g.height) / static_cast<double>(h);
    const double max_x = static_cast<double>(g.width - 1);
    const double max_y = static_cast<double>(g.height - 1);
    for (std::size_t y = 0; y < h; ++y) {
        const double fy = std::clamp((static_cast<double>(y) + 0.5) * sy - 0.5, 0.0, max_y);
        const auto y0 = static_cast<std::size_t>(fy);
        const std::size_t y1 = std::min(y0 + 1, g.height - 1);
        const double ty = fy - static_cast<double>(y0);
        for (std::size_t x = 0; x < w; ++x) {
            const double fx = std::clamp((static_cast<double>(x) + 0.5) * sx - 0.5, 0.0, max_x);
            const auto x0 = static_cast<std::size_t>(fx);
            const std::size_t x1 = std::min(x0 + 1, g.width - 1);
            const double tx = fx - static_cast<double>(x0);
            const double top = g.at(x0, y0) * (1.0 - tx) + g.at(x1, y0) * tx;
            const double bottom = g.at(x0, y1) * (1.0 - tx) + g.at(x1, y1) * tx;
            const double v = top * (1.0 - ty) + bottom * ty;
            out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        }
    }
    return out;
}

} // namespace evdet
