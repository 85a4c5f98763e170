#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "evdet/error.hpp"
#include "evdet/feature_vector.hpp"
#include "evdet/porter_stemmer.hpp"
#include "evdet/stoplist_data.hpp"
#include "evdet/unicode.hpp"

namespace evdet {

using TokenList = std::vector<std::string>;

/// Simple per-code-point lowercasing.
inline std::string normalize_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char32_t c : unicode::decode(text)) unicode::append_utf8(out, unicode::to_lower(c));
    return out;
}

/// Splits on Unicode whitespace, strips punctuation from every token and
/// drops tokens left empty.
inline TokenList tokenize(std::string_view text) {
    TokenList tokens;
    std::u32string current;
    auto flush = [&] {
        if (!current.empty()) tokens.push_back(unicode::encode(current));
        current.clear();
    };
    for (char32_t c : unicode::decode(text)) {
        if (unicode::is_whitespace(c))
            flush();
        else if (!unicode::is_punctuation(c))
            current.push_back(c);
    }
    flush();
    return tokens;
}

class Stoplist {
public:
    Stoplist() = default;

    template <typename Range>
    explicit Stoplist(const Range& terms) {
        for (const auto& t : terms) add(t);
    }

    /// The bundled English list (same content as data/stoplist.txt).
    static const Stoplist& english() {
        static const Stoplist list(detail::kDefaultStoplist);
        return list;
    }

    /// One term per line, UTF-8. Blank lines and lines starting with '#' are skipped.
    static Stoplist load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot read stoplist " + path.string());
        Stoplist list;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line[0] == '#') continue;
            list.add(line);
        }
        return list;
    }

    /// Entries go through the same lowercasing and punctuation stripping as
    /// tweet text, so "don't" matches the token "dont".
    void add(std::string_view term) {
        for (auto& tok : tokenize(normalize_text(term))) terms_.insert(std::move(tok));
    }

    bool contains(const std::string& token) const { return terms_.count(token) != 0; }
    std::size_t size() const noexcept { return terms_.size(); }

    std::vector<std::string> sorted_terms() const {
        std::vector<std::string> out(terms_.begin(), terms_.end());
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::unordered_set<std::string> terms_;
};

inline TokenList remove_stopwords(const TokenList& tokens, const Stoplist& stoplist) {
    TokenList out;
    out.reserve(tokens.size());
    for (const auto& t : tokens)
        if (!stoplist.contains(t)) out.push_back(t);
    return out;
}

/// Full text pipeline: lowercase, tokenize, drop stopwords, stem.
inline TokenList preprocess(std::string_view text, const Stoplist& stoplist = Stoplist::english()) {
    auto tokens = remove_stopwords(tokenize(normalize_text(text)), stoplist);
    for (auto& t : tokens) t = stem(t);
    return tokens;
}

/// Term -> (index, document frequency), plus the number of indexed documents.
class Vocabulary {
public:
    struct Term {
        std::size_t index;
        std::size_t df;
    };

    Vocabulary() = default;

    /// Rebuilds from terms in index order; used when loading models.
    Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> dfs, std::size_t n_docs)
        : n_docs_(n_docs), order_(std::move(terms)) {
        if (order_.size() != dfs.size()) throw DataError("vocabulary term/df length mismatch");
        for (std::size_t i = 0; i < order_.size(); ++i) {
            if (dfs[i] < 1 || dfs[i] > n_docs_) throw DataError("document frequency out of range for " + order_[i]);
            if (!terms_.emplace(order_[i], Term{i, dfs[i]}).second)
                throw DataError("duplicate vocabulary term " + order_[i]);
        }
    }

    std::size_t size() const noexcept { return order_.size(); }
    std::size_t n_docs() const noexcept { return n_docs_; }
    const std::vector<std::string>& terms() const noexcept { return order_; }

    const Term* find(const std::string& term) const {
        auto it = terms_.find(term);
        return it == terms_.end() ? nullptr : &it->second;
    }

    std::size_t df(const std::string& term) const {
        const auto* t = find(term);
        return t ? t->df : 0;
    }

    double idf(std::size_t df) const { return std::log(static_cast<double>(n_docs_) / static_cast<double>(df)); }

private:
    template <typename Docs>
    friend Vocabulary build_vocabulary(const Docs& docs);

    std::unordered_map<std::string, Term> terms_;
    std::size_t n_docs_ = 0;
    std::vector<std::string> order_;
};

/// Indices follow first appearance; df counts documents, not occurrences.
template <typename Docs>
Vocabulary build_vocabulary(const Docs& docs) {
    Vocabulary v;
    for (const auto& doc : docs) {
        ++v.n_docs_;
        std::unordered_set<std::string_view> seen;
        for (const auto& tok : doc) {
            if (!seen.insert(tok).second) continue;
            auto [it, inserted] = v.terms_.try_emplace(tok, Vocabulary::Term{v.order_.size(), 0});
            if (inserted) v.order_.push_back(tok);
            ++it->second.df;
        }
    }
    if (v.n_docs_ == 0) throw DataError("cannot build a vocabulary from zero documents");
    return v;
}

/// tf(t, doc) * ln(N / df(t)) with raw counts; out-of-vocabulary terms are skipped.
inline FeatureVector tfidf_vector(const TokenList& doc, const Vocabulary& vocab) {
    std::map<std::size_t, std::size_t> counts;
    for (const auto& tok : doc)
        if (const auto* t = vocab.find(tok)) ++counts[t->index];
    std::vector<FeatureVector::Entry> entries;
    entries.reserve(counts.size());
    for (const auto& [index, tf] : counts)
        entries.emplace_back(index, static_cast<double>(tf) * vocab.idf(vocab.df(vocab.terms()[index])));
    return FeatureVector(vocab.size(), std::move(entries));
}

struct Keyword {
    std::string term;
    double weight;

    friend bool operator==(const Keyword&, const Keyword&) = default;
};

using KeywordReport = std::vector<Keyword>;

/// Ranks vocabulary terms by summed TF-IDF weight over the positive
/// documents; ties go to the lexicographically smaller term.
template <typename Docs>
KeywordReport extract_event_keywords(const Docs& positive_docs, const Vocabulary& vocab, std::size_t k = 100) {
    std::vector<double> composite(vocab.size(), 0.0);
    for (const auto& doc : positive_docs) {
        const auto x = tfidf_vector(doc, vocab);
        for (const auto& [index, w] : x.entries()) composite[index] += w;
    }
    KeywordReport all;
    all.reserve(vocab.size());
    for (std::size_t i = 0; i < vocab.size(); ++i) all.push_back({vocab.terms()[i], composite[i]});
    const auto n = std::min(k, all.size());
    auto by_rank = [](const Keyword& a, const Keyword& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        return a.term < b.term;
    };
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(), by_rank);
    all.resize(n);
    return all;
}

inline void write_keywords_csv(std::ostream& out, const KeywordReport& report) {
    out << "term,weight\n";
    char buf[64];
    for (const auto& kw : report) {
        std::snprintf(buf, sizeof buf, "%.17g", kw.weight);
        out << kw.term << ',' << buf << '\n';
    }
}

} // namespace evdet
