#pragma once

// Seeded synthetic benchmark corpus. Each record carries a class-bearing
// text and image; a controllable fraction of texts holds only generic
// chatter (text noise) and a fraction of images shows the other class's
// scene (image noise).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "evdet/corpus.hpp"
#include "evdet/image.hpp"
#include "evdet/parallel.hpp"

namespace evdet {

struct SynthOptions {
    std::size_t records = 600;
    double text_noise = 0.3;
    double image_noise = 0.15;
    std::uint64_t seed = 42;
};

namespace detail {

inline constexpr const char* kEventWords[] = {"found",     "wreckage", "debris",    "black box", "bodies",
                                              "recovered", "located",  "spotted",   "rescue",    "floating",
                                              "retrieved", "tail",     "evacuated"};
inline constexpr const char* kNoEventWords[] = {"search",  "missing", "continues", "hope",  "pray",
                                                "still",   "unknown", "no sign",   "looking", "waiting",
                                                "vanished", "lost",   "suspended"};
inline constexpr const char* kFillerWords[] = {
    "AirAsia", "flight",   "QZ8501",  "Indonesia", "Java",   "sea",      "Surabaya", "Singapore", "passengers",
    "news",    "today",    "update",  "families",  "crew",   "plane",    "aircraft", "jet",       "Airbus",
    "breaking", "latest",  "report",  "officials", "watch",  "morning",  "live",     "please",    "share",
    "people",  "weather",  "navy",    "ships",     "coast",  "island",   "thoughts", "everyone",  "tonight"};

template <std::size_t N>
const char* pick(const char* const (&words)[N], std::mt19937_64& rng) {
    return words[std::uniform_int_distribution<std::size_t>(0, N - 1)(rng)];
}

inline std::string synth_text(bool event, bool noisy, std::mt19937_64& rng) {
    std::vector<std::string> words;
    auto uniform = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
    const std::size_t filler = noisy ? uniform(4, 8) : uniform(3, 6);
    for (std::size_t i = 0; i < filler; ++i) words.emplace_back(pick(kFillerWords, rng));
    if (!noisy) {
        const std::size_t cues = uniform(1, 3);
        for (std::size_t i = 0; i < cues; ++i)
            words.emplace_back(event ? pick(kEventWords, rng) : pick(kNoEventWords, rng));
    }
    std::shuffle(words.begin(), words.end(), rng);
    std::string text;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) text += ' ';
        text += words[i];
    }
    static constexpr const char* kTails[] = {"", "!", ".", " #AirAsia", " #QZ8501", "...", " @AirAsia"};
    text += pick(kTails, rng);
    return text;
}

inline void fill_rect(Raster& img, long x0, long y0, long x1, long y1, Rgb c) {
    const long w = static_cast<long>(img.width), h = static_cast<long>(img.height);
    for (long y = std::max(0L, y0); y < std::min(h, y1); ++y)
        for (long x = std::max(0L, x0); x < std::min(w, x1); ++x)
            img.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = c;
}

/// Sea background; the event scene adds a pale aircraft silhouette.
inline Raster synth_image(bool event_scene, std::mt19937_64& rng) {
    auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    const auto w = static_cast<std::size_t>(uniform(80, 129));
    const auto h = static_cast<std::size_t>(uniform(64, 113));
    Raster img(w, h);
    const double base_g = uniform(60, 100), base_b = uniform(120, 170);
    const double wave_freq = uniform(0.15, 0.45), wave_phase = uniform(0, 6.3), wave_amp = uniform(8, 20);
    std::normal_distribution<double> noise(0.0, 10.0);
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) {
            const double wave = wave_amp * std::sin(wave_freq * static_cast<double>(y) + 0.05 * static_cast<double>(x) + wave_phase);
            auto ch = [](double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); };
            img.at(x, y) = {ch(20 + wave * 0.3 + noise(rng)), ch(base_g + wave + noise(rng)), ch(base_b + wave + noise(rng))};
        }
    if (event_scene) {
        const double shade = uniform(200, 245);
        const Rgb body{static_cast<std::uint8_t>(shade), static_cast<std::uint8_t>(shade),
                       static_cast<std::uint8_t>(shade - 10)};
        const double fw = static_cast<double>(w), fh = static_cast<double>(h);
        const long cx = std::lround(fw * uniform(0.4, 0.6)), cy = std::lround(fh * uniform(0.4, 0.6));
        const long half_len = std::lround(fw * uniform(0.25, 0.33)), thick = std::max(2L, std::lround(fh * 0.05));
        const long half_span = std::lround(fh * uniform(0.25, 0.33)), wing = std::max(2L, std::lround(fw * 0.05));
        fill_rect(img, cx - half_len, cy - thick, cx + half_len, cy + thick, body);            // fuselage
        fill_rect(img, cx - wing, cy - half_span, cx + wing, cy + half_span, body);            // wings
        const long tail_x = cx - half_len + wing;
        fill_rect(img, tail_x - wing, cy - half_span / 2, tail_x + wing / 2, cy + half_span / 2, body); // tail
    }
    return img;
}

} // namespace detail

/// Writes `tweets.jsonl` and `img/*.png` under out_dir and returns the records.
inline std::vector<TweetRecord> synthesize_corpus(const std::filesystem::path& out_dir, const SynthOptions& opt = {}) {
    if (opt.text_noise < 0 || opt.text_noise > 1 || opt.image_noise < 0 || opt.image_noise > 1)
        throw ConfigError("noise rates must lie in [0, 1]");
    std::error_code ec;
    std::filesystem::create_directories(out_dir / "img", ec);
    if (ec) throw IoError("cannot create " + (out_dir / "img").string() + ": " + ec.message());

    std::mt19937_64 master(opt.seed);
    std::vector<std::uint64_t> seeds(opt.records);
    for (auto& s : seeds) s = master();

    const auto start = std::chrono::sys_days{std::chrono::year{2014} / 12 / 28};
    std::vector<TweetRecord> records(opt.records);
    std::vector<bool> event_scene(opt.records);
    for (std::size_t i = 0; i < opt.records; ++i) {
        std::mt19937_64 rng(seeds[i]);
        std::bernoulli_distribution coin(0.5), text_noisy(opt.text_noise), image_flipped(opt.image_noise);
        const bool event = coin(rng);
        char id[16];
        std::snprintf(id, sizeof id, "s%04zu", i);
        auto& r = records[i];
        r.id = id;
        r.timestamp = start + std::chrono::seconds(37 * static_cast<long>(i));
        r.label = event ? 1 : 0;
        r.text = detail::synth_text(event, text_noisy(rng), rng);
        r.image_path = "img/" + r.id + ".png";
        event_scene[i] = image_flipped(rng) ? !event : event;
    }
    parallel_for(opt.records, [&](std::size_t i) {
        std::mt19937_64 rng(seeds[i] ^ 0x9E3779B97F4A7C15ull);
        write_png(out_dir / records[i].image_path, detail::synth_image(event_scene[i], rng));
    });
    std::ofstream out(out_dir / "tweets.jsonl");
    if (!out) throw IoError("cannot write " + (out_dir / "tweets.jsonl").string());
    for (const auto& r : records) out << to_json_line(r) << '\n';
    if (!out) throw IoError("write failed on tweets.jsonl");
    return records;
}

} // namespace evdet
