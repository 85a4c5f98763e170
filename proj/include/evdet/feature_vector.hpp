#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "evdet/error.hpp"

namespace evdet {

/// Sparse index -> weight map with a fixed dimensionality.
///
/// Entries are kept sorted by index with no duplicates; zero weights are
/// allowed to be stored but never required.
class FeatureVector {
public:
    using Entry = std::pair<std::size_t, double>;

    FeatureVector() = default;
    explicit FeatureVector(std::size_t dim) : dim_(dim) {}

    /// Builds from unordered entries; duplicate indices are summed.
    FeatureVector(std::size_t dim, std::vector<Entry> entries) : dim_(dim), entries_(std::move(entries)) {
        std::sort(entries_.begin(), entries_.end(),
                  [](const Entry& a, const Entry& b) { return a.first < b.first; });
        std::vector<Entry> merged;
        merged.reserve(entries_.size());
        for (const auto& e : entries_) {
            if (e.first >= dim_) throw DataError("feature index out of range");
            if (!merged.empty() && merged.back().first == e.first)
                merged.back().second += e.second;
            else
                merged.push_back(e);
        }
        entries_ = std::move(merged);
    }

    static FeatureVector from_dense(std::span<const double> values) {
        FeatureVector v(values.size());
        v.entries_.reserve(values.size());
        for (std::size_t i = 0; i < values.size(); ++i)
            if (values[i] != 0.0) v.entries_.emplace_back(i, values[i]);
        return v;
    }

    std::size_t dim() const noexcept { return dim_; }
    const std::vector<Entry>& entries() const noexcept { return entries_; }

    double at(std::size_t index) const {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                                   [](const Entry& e, std::size_t i) { return e.first < i; });
        return (it != entries_.end() && it->first == index) ? it->second : 0.0;
    }

    std::vector<double> to_dense() const {
        std::vector<double> out(dim_, 0.0);
        for (const auto& [i, w] : entries_) out[i] = w;
        return out;
    }

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<Entry> entries_;
};

} // namespace evdet
