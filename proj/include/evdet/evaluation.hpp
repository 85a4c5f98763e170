#pragma once

#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "evdet/error.hpp"

namespace evdet {

struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    std::size_t total() const noexcept { return tp + tn + fp + fn; }

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Counts against the given positive class (1 by default).
inline ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> truth, int positive = 1) {
    if (preds.size() != truth.size()) throw DataError("prediction/truth length mismatch");
    if (preds.empty()) throw DataError("confusion matrix of zero records");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const bool p = preds[i] == positive;
        const bool t = truth[i] == positive;
        if (p && t) ++cm.tp;
        else if (!p && !t) ++cm.tn;
        else if (p) ++cm.fp;
        else ++cm.fn;
    }
    return cm;
}

/// (TP + TN) / (TP + TN + FP + FN)
inline double accuracy(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw DataError("accuracy of an empty confusion matrix");
    return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
}

struct MethodResult {
    std::string method; // text, image or fusion
    ConfusionMatrix cm;
    double accuracy = 0.0;
};

struct ComparisonReport {
    std::vector<MethodResult> rows; // text, image, fusion
    std::size_t records = 0;
    std::string fingerprint;
    nlohmann::ordered_json config;
};

inline ComparisonReport make_report(std::span<const int> text, std::span<const int> image,
                                    std::span<const int> fused, std::span<const int> truth) {
    if (truth.empty()) throw DataError("cannot evaluate an empty test split");
    ComparisonReport r;
    r.records = truth.size();
    const std::pair<const char*, std::span<const int>> methods[] = {{"text", text}, {"image", image}, {"fusion", fused}};
    for (const auto& [name, preds] : methods) {
        const auto cm = confusion(preds, truth);
        r.rows.push_back({name, cm, accuracy(cm)});
    }
    return r;
}

/// Aligned plain-text accuracy table plus per-method confusion counts.
inline std::string format_table(const ComparisonReport& r) {
    static constexpr const char* kHeadings[] = {"Text Data", "Image Data", "Fusion Images and Text Data"};
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-10s  %-10s  %-10s  %-27s\n", "Data Type", kHeadings[0], kHeadings[1], kHeadings[2]);
    out += buf;
    std::snprintf(buf, sizeof buf, "%-10s  %-10.4f  %-10.4f  %-27.4f\n", "Accuracy", r.rows[0].accuracy,
                  r.rows[1].accuracy, r.rows[2].accuracy);
    out += buf;
    out += "\n";
    std::snprintf(buf, sizeof buf, "%-8s %6s %6s %6s %6s %9s\n", "method", "TP", "TN", "FP", "FN", "accuracy");
    out += buf;
    for (const auto& row : r.rows) {
        std::snprintf(buf, sizeof buf, "%-8s %6zu %6zu %6zu %6zu %9.4f\n", row.method.c_str(), row.cm.tp, row.cm.tn,
                      row.cm.fp, row.cm.fn, row.accuracy);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "\nrecords: %zu  config: %s\n", r.records, r.fingerprint.c_str());
    out += buf;
    return out;
}

inline nlohmann::ordered_json report_json(const ComparisonReport& r) {
    nlohmann::ordered_json j;
    j["records"] = r.records;
    j["fingerprint"] = r.fingerprint;
    j["methods"] = nlohmann::ordered_json::array();
    for (const auto& row : r.rows)
        j["methods"].push_back({{"method", row.method},
                                {"accuracy", row.accuracy},
                                {"tp", row.cm.tp},
                                {"tn", row.cm.tn},
                                {"fp", row.cm.fp},
                                {"fn", row.cm.fn}});
    j["config"] = r.config;
    return j;
}

} // namespace evdet
