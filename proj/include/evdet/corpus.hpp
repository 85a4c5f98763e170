#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "evdet/error.hpp"
#include "evdet/unicode.hpp"

namespace evdet {

using Timestamp = std::chrono::sys_seconds;

/// Parses "YYYY-MM-DDTHH:MM:SSZ" (a "+00:00" suffix is also accepted).
inline std::optional<Timestamp> parse_timestamp(std::string_view s) {
    int y, mo, d, h, mi, sec, consumed = 0;
    const std::string buf(s);
    if (std::sscanf(buf.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &y, &mo, &d, &h, &mi, &sec, &consumed) != 6)
        return std::nullopt;
    if (consumed != 19) return std::nullopt;
    const std::string_view zone = s.substr(19);
    if (zone != "Z" && zone != "+00:00") return std::nullopt;
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || sec > 59 || h < 0 || mi < 0 || sec < 0) return std::nullopt;
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec};
}

inline std::string format_timestamp(Timestamp t) {
    using namespace std::chrono;
    const auto day_point = floor<days>(t);
    const year_month_day ymd{day_point};
    const hh_mm_ss hms{t - day_point};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                  static_cast<long>(hms.seconds().count()));
    return buf;
}

/// One ingested multimodal sample. Label 1 is the event class.
struct TweetRecord {
    std::string id;
    Timestamp timestamp{};
    std::string text;
    std::string image_path;
    std::optional<int> label;

    friend bool operator==(const TweetRecord&, const TweetRecord&) = default;
};

/// Canonical single-line JSON form, as stored in corpus.jsonl.
inline std::string to_json_line(const TweetRecord& r) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["timestamp"] = format_timestamp(r.timestamp);
    j["text"] = r.text;
    j["image_path"] = r.image_path;
    if (r.label) j["label"] = *r.label;
    return j.dump();
}

struct ParseOptions {
    /// When set the label key is neither validated nor returned.
    bool ignore_label = false;
};

inline TweetRecord parse_tweet_record(std::string_view line, std::size_t line_no = 1, ParseOptions opts = {}) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError(line_no, "record is not a JSON object");

    auto required_string = [&](const char* key) -> std::string {
        auto it = j.find(key);
        if (it == j.end()) throw ParseError(line_no, std::string("missing key '") + key + "'");
        if (!it->is_string()) throw ParseError(line_no, std::string("key '") + key + "' is not a string");
        return it->get<std::string>();
    };

    TweetRecord r;
    r.id = required_string("id");
    if (r.id.empty()) throw ParseError(line_no, "empty id");
    const auto ts = required_string("timestamp");
    auto parsed = parse_timestamp(ts);
    if (!parsed) throw ParseError(line_no, "unparseable timestamp '" + ts + "' (id " + r.id + ")");
    r.timestamp = *parsed;
    r.text = required_string("text");
    r.image_path = required_string("image_path");

    if (!opts.ignore_label) {
        if (auto it = j.find("label"); it != j.end() && !it->is_null()) {
            if (!it->is_number_integer() || (it->get<long long>() != 0 && it->get<long long>() != 1))
                throw ParseError(line_no, "label outside {0,1} (id " + r.id + ")");
            r.label = static_cast<int>(it->get<long long>());
        }
    }
    return r;
}

inline bool image_readable(const std::filesystem::path& p) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(p, ec)) return false;
    std::ifstream in(p, std::ios::binary);
    return in.good();
}

/// True iff the text is nonblank, the image exists under image_root, and
/// every alphabetic code point lies in the Latin blocks.
inline bool is_multimodal_latin(const TweetRecord& record, const std::filesystem::path& image_root) {
    const auto cps = unicode::decode(record.text);
    bool any_visible = false;
    for (char32_t c : cps) {
        if (!unicode::is_whitespace(c)) any_visible = true;
        if (unicode::is_alphabetic(c) && !unicode::in_latin_blocks(c)) return false;
    }
    if (!any_visible) return false;
    if (record.image_path.empty()) return false;
    return image_readable(image_root / record.image_path);
}

inline bool chronological_less(const TweetRecord& a, const TweetRecord& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return a.id < b.id;
}

/// Append-only JSONL record store plus an image directory.
///
/// Records are held in timestamp order (ties by id). The backing file is
/// `corpus.jsonl` under root; image paths are relative to root.
class CorpusStore {
public:
    static constexpr const char* kFileName = "corpus.jsonl";

    /// In-memory store (nothing persisted).
    CorpusStore() = default;

    /// Opens or creates the store directory and loads any existing records.
    static CorpusStore open(const std::filesystem::path& root) {
        CorpusStore s;
        s.root_ = root;
        s.persistent_ = true;
        std::error_code ec;
        std::filesystem::create_directories(root, ec);
        if (ec) throw IoError("cannot create store directory " + root.string() + ": " + ec.message());
        const auto file = s.file_path();
        if (std::filesystem::exists(file)) {
            std::ifstream in(file);
            if (!in) throw IoError("cannot read " + file.string());
            std::string line;
            std::size_t n = 0;
            while (std::getline(in, line)) {
                ++n;
                if (line.empty()) continue;
                auto r = parse_tweet_record(line, n);
                if (!s.ids_.insert(r.id).second) throw DataError("duplicate id in store: " + r.id);
                s.records_.push_back(std::move(r));
            }
            std::sort(s.records_.begin(), s.records_.end(), chronological_less);
        }
        return s;
    }

    /// In-memory store whose images live under root.
    static CorpusStore in_memory(const std::filesystem::path& root) {
        CorpusStore s;
        s.root_ = root;
        return s;
    }

    const std::filesystem::path& root() const noexcept { return root_; }
    std::filesystem::path file_path() const { return root_ / kFileName; }
    const std::vector<TweetRecord>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }
    bool contains(const std::string& id) const { return ids_.count(id) != 0; }

    /// Appends a batch, persisting first; in-memory state changes only if the write succeeds.
    void append(std::vector<TweetRecord> batch) {
        if (batch.empty()) return;
        if (persistent_) {
            std::ofstream out(file_path(), std::ios::app);
            if (!out) throw IoError("cannot open " + file_path().string() + " for append");
            for (const auto& r : batch) out << to_json_line(r) << '\n';
            out.flush();
            if (!out) throw IoError("write failed on " + file_path().string());
        }
        for (auto& r : batch) {
            ids_.insert(r.id);
            records_.push_back(std::move(r));
        }
        std::sort(records_.begin(), records_.end(), chronological_less);
    }

private:
    std::filesystem::path root_;
    bool persistent_ = false;
    std::vector<TweetRecord> records_;
    std::unordered_set<std::string> ids_;
};

struct IngestReport {
    std::size_t accepted = 0;
    std::size_t rejected_filter = 0;
    std::size_t rejected_parse = 0;
    /// One message per parse rejection, prefixed with the line number.
    std::vector<std::string> errors;

    friend bool operator==(const IngestReport& a, const IngestReport& b) {
        return a.accepted == b.accepted && a.rejected_filter == b.rejected_filter &&
               a.rejected_parse == b.rejected_parse;
    }
};

/// Parses, filters and appends a stream of JSON lines. Blank lines are
/// skipped and not counted. Duplicate ids count as parse rejections.
template <typename Lines>
IngestReport ingest_stream(const Lines& lines, CorpusStore& store) {
    IngestReport report;
    std::vector<TweetRecord> accepted;
    std::unordered_set<std::string> batch_ids;
    std::size_t line_no = 0;
    for (const auto& raw : lines) {
        ++line_no;
        std::string_view line(raw);
        if (line.find_first_not_of(" \t\r\n") == std::string_view::npos) continue;
        TweetRecord r;
        try {
            r = parse_tweet_record(line, line_no);
        } catch (const ParseError& e) {
            ++report.rejected_parse;
            report.errors.emplace_back(e.what());
            continue;
        }
        if (store.contains(r.id) || !batch_ids.insert(r.id).second) {
            ++report.rejected_parse;
            report.errors.push_back("line " + std::to_string(line_no) + ": duplicate id " + r.id);
            continue;
        }
        if (!is_multimodal_latin(r, store.root())) {
            ++report.rejected_filter;
            continue;
        }
        accepted.push_back(std::move(r));
    }
    report.accepted = accepted.size();
    try {
        store.append(std::move(accepted));
    } catch (const IoError& e) {
        report.accepted = 0;
        throw IoError(std::string(e.what()) + " (parsed " + std::to_string(line_no) + " lines, " +
                      std::to_string(report.rejected_filter) + " filtered, " +
                      std::to_string(report.rejected_parse) + " unparseable, none stored)");
    }
    return report;
}

/// Three split fractions (train, validation, test) summing to 1.
class SplitSpec {
public:
    SplitSpec() = default;
    SplitSpec(double train, double validation, double test) : fractions_{train, validation, test} {
        for (double f : fractions_)
            if (!(f >= 0.0) || !std::isfinite(f)) throw ConfigError("split fractions must be nonnegative");
        if (std::abs(train + validation + test - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");
    }

    const std::array<double, 3>& fractions() const noexcept { return fractions_; }

private:
    std::array<double, 3> fractions_{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
};

struct Split {
    std::vector<TweetRecord> train;
    std::vector<TweetRecord> validation;
    std::vector<TweetRecord> test;
};

/// First floor(N*f1) records to train, next floor(N*f2) to validation, rest to test.
inline Split chronological_split(std::span<const TweetRecord> records, const SplitSpec& spec = {}) {
    if (records.empty()) throw DataError("cannot split an empty store");
    std::vector<TweetRecord> sorted(records.begin(), records.end());
    std::stable_sort(sorted.begin(), sorted.end(), chronological_less);
    const auto n = sorted.size();
    const auto& f = spec.fractions();
    // Guard the floor against representation error, e.g. 9 * (1/3) = 2.9999...
    auto floor_part = [n](double frac) {
        const double x = static_cast<double>(n) * frac;
        const double r = std::round(x);
        return static_cast<std::size_t>(std::abs(x - r) < 1e-9 ? r : std::floor(x));
    };
    const std::size_t n_train = std::min(n, floor_part(f[0]));
    const std::size_t n_val = std::min(n - n_train, floor_part(f[1]));
    Split s;
    s.train.assign(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.validation.assign(sorted.begin() + static_cast<std::ptrdiff_t>(n_train),
                        sorted.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    s.test.assign(sorted.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), sorted.end());
    return s;
}

inline Split chronological_split(const CorpusStore& store, const SplitSpec& spec = {}) {
    return chronological_split(std::span<const TweetRecord>(store.records()), spec);
}

} // namespace evdet
