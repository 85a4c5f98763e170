#pragma once

// End-to-end workflow: configuration, feature extraction, training with
// threshold calibration, three-way evaluation and detection.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "evdet/classifiers.hpp"
#include "evdet/corpus.hpp"
#include "evdet/evaluation.hpp"
#include "evdet/fusion.hpp"
#include "evdet/image_features.hpp"
#include "evdet/parallel.hpp"
#include "evdet/text_features.hpp"

namespace evdet {

struct RunConfig {
    std::string store;
    std::string stoplist; // empty: bundled English list
    ImageFeatureConfig image;
    ClassifierKind classifier = ClassifierKind::svm;
    std::size_t knn_k = 5;
    double svm_lambda = 1e-4;
    std::size_t svm_epochs = 100;
    bool standardize = true;
    FusionMode fusion = FusionMode::gate;
    std::uint64_t seed = 42;
    std::array<double, 3> split{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

    ClassifierParams classifier_params() const {
        ClassifierParams p;
        p.kind = classifier;
        p.k = knn_k;
        p.svm = {svm_lambda, svm_epochs, seed, standardize};
        return p;
    }

    SplitSpec split_spec() const { return SplitSpec(split[0], split[1], split[2]); }

    void validate() const {
        image.hog.validate();
        if (image.glcm_levels < 1 || image.glcm_levels > 256) throw ConfigError("glcm_levels must be in [1, 256]");
        if (image.histogram_bins == 0 || 256 % image.histogram_bins != 0)
            throw ConfigError("histogram_bins must divide 256");
        if (knn_k == 0 || knn_k % 2 == 0) throw ConfigError("knn_k must be a positive odd number");
        if (!(svm_lambda > 0.0)) throw ConfigError("svm_lambda must be positive");
        (void)split_spec();
    }
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> known, const char* where) {
    if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ConfigError(std::string("unknown key '") + key + "' in " + where);
    }
}

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) {
        try {
            out = it->get<T>();
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(std::string("bad value for '") + key + "'");
        }
    }
}

} // namespace detail

/// Serializable form. Paths are written only when include_paths is set, so
/// model files and report fingerprints do not depend on where data lives.
inline nlohmann::ordered_json config_json(const RunConfig& c, bool include_paths = true) {
    nlohmann::ordered_json j;
    if (include_paths) {
        j["store"] = c.store;
        j["stoplist"] = c.stoplist;
    }
    const auto& h = c.image.hog;
    j["hog"] = {{"resize_width", h.resize_width}, {"resize_height", h.resize_height}, {"cell", h.cell},
                {"block", h.block},               {"block_stride", h.block_stride},   {"bins", h.bins},
                {"clip", h.clip},                 {"epsilon", h.epsilon}};
    j["glcm_levels"] = c.image.glcm_levels;
    j["histogram_bins"] = c.image.histogram_bins;
    j["classifier"] = to_string(c.classifier);
    j["knn_k"] = c.knn_k;
    j["svm_lambda"] = c.svm_lambda;
    j["svm_epochs"] = c.svm_epochs;
    j["standardize"] = c.standardize;
    j["fusion"] = to_string(c.fusion);
    j["seed"] = c.seed;
    j["split"] = c.split;
    return j;
}

inline RunConfig parse_config(const nlohmann::json& j) {
    detail::reject_unknown_keys(j,
                                {"store", "stoplist", "hog", "glcm_levels", "histogram_bins", "classifier", "knn_k",
                                 "svm_lambda", "svm_epochs", "standardize", "fusion", "seed", "split"},
                                "config");
    RunConfig c;
    detail::read_opt(j, "store", c.store);
    detail::read_opt(j, "stoplist", c.stoplist);
    if (auto it = j.find("hog"); it != j.end()) {
        detail::reject_unknown_keys(
            *it, {"resize_width", "resize_height", "cell", "block", "block_stride", "bins", "clip", "epsilon"},
            "hog");
        auto& h = c.image.hog;
        detail::read_opt(*it, "resize_width", h.resize_width);
        detail::read_opt(*it, "resize_height", h.resize_height);
        detail::read_opt(*it, "cell", h.cell);
        detail::read_opt(*it, "block", h.block);
        detail::read_opt(*it, "block_stride", h.block_stride);
        detail::read_opt(*it, "bins", h.bins);
        detail::read_opt(*it, "clip", h.clip);
        detail::read_opt(*it, "epsilon", h.epsilon);
    }
    detail::read_opt(j, "glcm_levels", c.image.glcm_levels);
    detail::read_opt(j, "histogram_bins", c.image.histogram_bins);
    std::string s;
    if (j.contains("classifier")) {
        detail::read_opt(j, "classifier", s);
        c.classifier = parse_classifier_kind(s);
    }
    detail::read_opt(j, "knn_k", c.knn_k);
    detail::read_opt(j, "svm_lambda", c.svm_lambda);
    detail::read_opt(j, "svm_epochs", c.svm_epochs);
    detail::read_opt(j, "standardize", c.standardize);
    if (j.contains("fusion")) {
        detail::read_opt(j, "fusion", s);
        c.fusion = parse_fusion_mode(s);
    }
    detail::read_opt(j, "seed", c.seed);
    detail::read_opt(j, "split", c.split);
    c.validate();
    return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

/// 64-bit FNV-1a of the path-free configuration, as 16 hex digits.
inline std::string config_fingerprint(const RunConfig& c) {
    const auto text = config_json(c, false).dump();
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline Stoplist resolve_stoplist(const RunConfig& c) {
    return c.stoplist.empty() ? Stoplist::english() : Stoplist::load(c.stoplist);
}

// ---------------------------------------------------------------------------
// Features

inline std::vector<TokenList> text_tokens(std::span<const TweetRecord> records, const Stoplist& stoplist) {
    std::vector<TokenList> out(records.size());
    parallel_for(records.size(), [&](std::size_t i) { out[i] = preprocess(records[i].text, stoplist); });
    return out;
}

inline std::vector<FeatureVector> text_vectors(std::span<const TokenList> docs, const Vocabulary& vocab) {
    std::vector<FeatureVector> out(docs.size());
    parallel_for(docs.size(), [&](std::size_t i) { out[i] = tfidf_vector(docs[i], vocab); });
    return out;
}

/// Loads and describes every record's image; failures name the record id.
inline std::vector<FeatureVector> image_vectors(std::span<const TweetRecord> records,
                                                const std::filesystem::path& root,
                                                const ImageFeatureConfig& cfg) {
    std::vector<FeatureVector> out(records.size());
    parallel_for(records.size(), [&](std::size_t i) {
        try {
            out[i] = image_feature_vector(load_raster(root / records[i].image_path), cfg);
        } catch (const IoError& e) {
            throw IoError("record " + records[i].id + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError("record " + records[i].id + ": " + e.what());
        }
    });
    return out;
}

inline void write_feature_csv(std::ostream& out, std::span<const TweetRecord> records,
                              std::span<const FeatureVector> features) {
    char buf[40];
    for (std::size_t i = 0; i < records.size(); ++i) {
        out << records[i].id;
        for (double v : features[i].to_dense()) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            out << buf;
        }
        out << '\n';
    }
}

inline std::vector<TweetRecord> labeled_only(const std::vector<TweetRecord>& records) {
    std::vector<TweetRecord> out;
    for (const auto& r : records)
        if (r.label) out.push_back(r);
    return out;
}

inline std::vector<int> labels_of(std::span<const TweetRecord> records) {
    std::vector<int> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.label.value_or(0));
    return out;
}

/// Labeled training records of the chronological split.
inline std::vector<TweetRecord> training_records(const CorpusStore& store, const RunConfig& cfg) {
    return labeled_only(chronological_split(store, cfg.split_spec()).train);
}

/// Event keywords from the training split's positive records.
inline KeywordReport corpus_keywords(const CorpusStore& store, const RunConfig& cfg, std::size_t k) {
    const auto train = training_records(store, cfg);
    if (train.empty()) throw DataError("training split has no labeled records");
    const auto stoplist = resolve_stoplist(cfg);
    const auto docs = text_tokens(train, stoplist);
    const auto vocab = build_vocabulary(docs);
    std::vector<TokenList> positive;
    for (std::size_t i = 0; i < train.size(); ++i)
        if (train[i].label == 1) positive.push_back(docs[i]);
    return extract_event_keywords(positive, vocab, k);
}

// ---------------------------------------------------------------------------
// Model bundle

struct ModelBundle {
    static constexpr int kVersion = 1;

    RunConfig config;
    std::vector<std::string> stoplist;
    Vocabulary vocab;
    Classifier text;
    Classifier image;
    std::optional<Classifier> concat;
    FusionPolicy policy;
    double validation_accuracy = std::numeric_limits<double>::quiet_NaN();

    Stoplist stoplist_set() const { return Stoplist(stoplist); }
};

namespace detail {

// JSON has no infinities; they are written as the strings "inf" / "-inf".
inline nlohmann::ordered_json encode_real(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return nullptr;
    return v;
}

inline double decode_real(const nlohmann::json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw DataError("bad real value '" + s + "'");
    }
    return j.get<double>();
}

} // namespace detail

inline nlohmann::ordered_json bundle_json(const ModelBundle& m) {
    nlohmann::ordered_json j;
    j["format"] = "evdet-model";
    j["version"] = ModelBundle::kVersion;
    j["config"] = config_json(m.config, false);
    j["stoplist"] = m.stoplist;
    std::vector<std::size_t> dfs;
    dfs.reserve(m.vocab.size());
    for (const auto& t : m.vocab.terms()) dfs.push_back(m.vocab.df(t));
    j["vocabulary"] = {{"n_docs", m.vocab.n_docs()}, {"terms", m.vocab.terms()}, {"df", dfs}};
    j["fusion"] = {{"mode", to_string(m.policy.mode)},
                   {"tau", detail::encode_real(m.policy.tau)},
                   {"score_kind", to_string(m.policy.score_kind)},
                   {"validation_accuracy", detail::encode_real(m.validation_accuracy)}};
    j["text_classifier"] = nlohmann::json(m.text);
    j["image_classifier"] = nlohmann::json(m.image);
    if (m.concat) j["concat_classifier"] = nlohmann::json(*m.concat);
    return j;
}

inline std::string serialize_bundle(const ModelBundle& m) { return bundle_json(m).dump(1) + "\n"; }

inline ModelBundle parse_bundle(const nlohmann::json& j) {
    try {
        if (j.at("format").get<std::string>() != "evdet-model") throw DataError("not an evdet model file");
        if (j.at("version").get<int>() != ModelBundle::kVersion) throw DataError("unsupported model version");
        ModelBundle m;
        m.config = parse_config(j.at("config"));
        m.stoplist = j.at("stoplist").get<std::vector<std::string>>();
        const auto& v = j.at("vocabulary");
        m.vocab = Vocabulary(v.at("terms").get<std::vector<std::string>>(), v.at("df").get<std::vector<std::size_t>>(),
                             v.at("n_docs").get<std::size_t>());
        const auto& f = j.at("fusion");
        m.policy.mode = parse_fusion_mode(f.at("mode").get<std::string>());
        m.policy.tau = detail::decode_real(f.at("tau"));
        m.policy.score_kind = parse_score_kind(f.at("score_kind").get<std::string>());
        m.validation_accuracy = detail::decode_real(f.at("validation_accuracy"));
        m.text = j.at("text_classifier").get<Classifier>();
        m.image = j.at("image_classifier").get<Classifier>();
        if (j.contains("concat_classifier")) m.concat = j.at("concat_classifier").get<Classifier>();
        if (m.text.dim() != m.vocab.size()) throw DataError("text classifier does not match vocabulary size");
        if (m.image.dim() != m.config.image.length()) throw DataError("image classifier dimension mismatch");
        if (m.policy.mode == FusionMode::concat && !m.concat) throw DataError("concat model lacks its classifier");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed model file: ") + e.what());
    }
}

inline void save_bundle(const std::filesystem::path& path, const ModelBundle& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model " + path.string());
    out << serialize_bundle(m);
    if (!out) throw IoError("write failed on " + path.string());
}

inline ModelBundle load_bundle(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read model " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("model " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_bundle(j);
}

// ---------------------------------------------------------------------------
// Train / evaluate / detect

/// Channel predictions for a batch of records under a trained bundle.
struct ChannelPredictions {
    std::vector<Prediction> text;
    std::vector<Prediction> image;
    std::vector<int> fused;
    std::vector<std::string> decided_by; // text, image or concat
};

inline ChannelPredictions predict_records(const ModelBundle& m, std::span<const TweetRecord> records,
                                          const std::filesystem::path& image_root) {
    const auto docs = text_tokens(records, m.stoplist_set());
    const auto tv = text_vectors(docs, m.vocab);
    const auto iv = image_vectors(records, image_root, m.config.image);
    ChannelPredictions out;
    out.text.resize(records.size());
    out.image.resize(records.size());
    out.fused.resize(records.size());
    out.decided_by.resize(records.size());
    parallel_for(records.size(), [&](std::size_t i) {
        out.text[i] = m.text.predict(tv[i]);
        out.image[i] = m.image.predict(iv[i]);
        if (m.policy.mode == FusionMode::concat) {
            out.fused[i] = m.concat->predict(fuse_concat(tv[i], iv[i])).label;
            out.decided_by[i] = "concat";
        } else {
            const auto ch = gate_channel(out.text[i], m.policy.tau);
            out.fused[i] = ch == Channel::image ? out.image[i].label : out.text[i].label;
            out.decided_by[i] = to_string(ch);
        }
    });
    return out;
}

/// Fits both channel classifiers on the training split, then either
/// calibrates the gate threshold on the validation split or trains the
/// concatenated-feature classifier.
inline ModelBundle train_pipeline(const CorpusStore& store, const RunConfig& cfg) {
    cfg.validate();
    const auto split = chronological_split(store, cfg.split_spec());
    const auto train = labeled_only(split.train);
    const auto validation = labeled_only(split.validation);
    if (train.empty()) throw DataError("training split has no labeled records");

    ModelBundle m;
    m.config = cfg;
    m.config.store.clear();
    m.config.stoplist.clear();
    const auto stoplist = resolve_stoplist(cfg);
    m.stoplist = stoplist.sorted_terms();

    const auto docs = text_tokens(train, stoplist);
    m.vocab = build_vocabulary(docs);
    const auto tv = text_vectors(docs, m.vocab);
    const auto iv = image_vectors(train, store.root(), cfg.image);
    const auto y = labels_of(train);
    const auto params = cfg.classifier_params();

    m.text = Classifier::train(tv, y, params);
    m.image = Classifier::train(iv, y, params);
    m.policy.mode = cfg.fusion;
    m.policy.score_kind = score_kind_of(cfg.classifier);

    if (cfg.fusion == FusionMode::concat) {
        std::vector<FeatureVector> joint(train.size());
        for (std::size_t i = 0; i < joint.size(); ++i) joint[i] = fuse_concat(tv[i], iv[i]);
        m.concat = Classifier::train(joint, y, params);
    } else {
        if (validation.empty()) throw DataError("validation split has no labeled records for threshold calibration");
        const auto preds = predict_records(m, validation, store.root());
        const auto vy = labels_of(validation);
        const auto cal = calibrate_threshold(preds.text, preds.image, vy);
        m.policy.tau = cal.tau;
        m.validation_accuracy = cal.validation_accuracy;
    }
    return m;
}

/// Scores text-only, image-only and fused predictions on the labeled test split.
inline ComparisonReport compare_methods(const CorpusStore& store, const ModelBundle& m) {
    const auto test = labeled_only(chronological_split(store, m.config.split_spec()).test);
    if (test.empty()) throw DataError("test split has no labeled records");
    const auto preds = predict_records(m, test, store.root());
    std::vector<int> text, image;
    for (const auto& p : preds.text) text.push_back(p.label);
    for (const auto& p : preds.image) image.push_back(p.label);
    auto report = make_report(text, image, preds.fused, labels_of(test));
    report.fingerprint = config_fingerprint(m.config);
    report.config = config_json(m.config, false);
    if (m.policy.mode == FusionMode::gate) report.config["tau"] = detail::encode_real(m.policy.tau);
    return report;
}

struct Detection {
    std::string id;
    std::optional<int> label;  // empty when the record failed the filter
    std::string channel;       // text, image, concat or filtered
};

/// Classifies records with the fused model. Labels in the input are ignored.
inline std::vector<Detection> detect(const ModelBundle& m, std::span<const TweetRecord> records,
                                     const std::filesystem::path& image_root) {
    std::vector<TweetRecord> usable;
    std::vector<std::size_t> where;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (is_multimodal_latin(records[i], image_root)) {
            usable.push_back(records[i]);
            usable.back().label.reset();
            where.push_back(i);
        }
    const auto preds = predict_records(m, usable, image_root);
    std::vector<Detection> out(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) out[i] = {records[i].id, std::nullopt, "filtered"};
    for (std::size_t u = 0; u < usable.size(); ++u) out[where[u]] = {usable[u].id, preds.fused[u], preds.decided_by[u]};
    return out;
}

} // namespace evdet
