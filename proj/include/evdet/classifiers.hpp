#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "evdet/error.hpp"
#include "evdet/feature_vector.hpp"

namespace evdet {

/// Classifier output: a binary label and its reliability score.
struct Prediction {
    int label = 0;
    double score = 0.0;

    friend bool operator==(const Prediction&, const Prediction&) = default;
};

/// Per-dimension standardizer. Zero-variance dimensions keep std = kMinStd.
class Scaler {
public:
    static constexpr double kMinStd = 1e-9;

    Scaler() = default;
    Scaler(std::vector<double> mean, std::vector<double> stddev) : mean_(std::move(mean)), std_(std::move(stddev)) {
        if (mean_.size() != std_.size()) throw DataError("scaler mean/std length mismatch");
        for (double s : std_)
            if (!(s >= kMinStd)) throw DataError("scaler std below minimum");
    }

    /// Pass-through scaler for when standardization is disabled.
    static Scaler identity(std::size_t dim) { return Scaler(std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)); }

    std::size_t dim() const noexcept { return mean_.size(); }
    const std::vector<double>& mean() const noexcept { return mean_; }
    const std::vector<double>& stddev() const noexcept { return std_; }

    std::vector<double> transform(const FeatureVector& x) const {
        check_dim(x.dim());
        std::vector<double> out(dim());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = -mean_[i] / std_[i];
        for (const auto& [i, v] : x.entries()) out[i] = (v - mean_[i]) / std_[i];
        return out;
    }

    std::vector<double> transform(std::span<const double> x) const {
        check_dim(x.size());
        std::vector<double> out(dim());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = (x[i] - mean_[i]) / std_[i];
        return out;
    }

    friend bool operator==(const Scaler&, const Scaler&) = default;

private:
    void check_dim(std::size_t d) const {
        if (d != dim())
            throw DataError("dimension mismatch: expected " + std::to_string(dim()) + ", got " + std::to_string(d));
    }

    std::vector<double> mean_;
    std::vector<double> std_;
};

/// Population mean and standard deviation per dimension.
inline Scaler fit_scaler(std::span<const FeatureVector> xs) {
    if (xs.empty()) throw DataError("cannot fit a scaler on zero samples");
    const std::size_t dim = xs.front().dim();
    std::vector<double> sum(dim, 0.0);
    for (const auto& x : xs) {
        if (x.dim() != dim) throw DataError("inconsistent feature dimensions");
        for (const auto& [i, v] : x.entries()) sum[i] += v;
    }
    const auto n = static_cast<double>(xs.size());
    std::vector<double> mean(dim);
    for (std::size_t i = 0; i < dim; ++i) mean[i] = sum[i] / n;
    // Squared deviations; implicit zeros contribute mean^2 each.
    std::vector<double> ss(dim, 0.0);
    std::vector<std::size_t> nonzero(dim, 0);
    for (const auto& x : xs)
        for (const auto& [i, v] : x.entries()) {
            const double d = v - mean[i];
            ss[i] += d * d;
            ++nonzero[i];
        }
    std::vector<double> stddev(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        ss[i] += static_cast<double>(xs.size() - nonzero[i]) * mean[i] * mean[i];
        stddev[i] = std::max(std::sqrt(ss[i] / n), Scaler::kMinStd);
    }
    return Scaler(std::move(mean), std::move(stddev));
}

inline void check_labels(std::span<const FeatureVector> xs, std::span<const int> ys) {
    if (xs.size() != ys.size()) throw DataError("feature/label count mismatch");
    for (int y : ys)
        if (y != 0 && y != 1) throw DataError("labels must be 0 or 1");
    for (const auto& x : xs)
        if (x.dim() != xs.front().dim()) throw DataError("inconsistent feature dimensions");
}

// ---------------------------------------------------------------------------
// K nearest neighbours

struct KnnModel {
    std::size_t k = 5;
    Scaler scaler;
    std::vector<std::vector<double>> exemplars; // standardized
    std::vector<int> labels;

    friend bool operator==(const KnnModel&, const KnnModel&) = default;
};

inline KnnModel knn_train(std::span<const FeatureVector> xs, std::span<const int> ys, std::size_t k = 5,
                          bool standardize = true) {
    if (k == 0 || k % 2 == 0) throw ConfigError("k must be a positive odd number");
    if (xs.size() < k) throw ConfigError("k exceeds the number of training samples");
    check_labels(xs, ys);
    KnnModel m;
    m.k = k;
    m.scaler = standardize ? fit_scaler(xs) : Scaler::identity(xs.front().dim());
    m.exemplars.reserve(xs.size());
    for (const auto& x : xs) m.exemplars.push_back(m.scaler.transform(x));
    m.labels.assign(ys.begin(), ys.end());
    return m;
}

inline double euclidean(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

/// Majority vote of the k nearest exemplars (distance ties go to the lower
/// index); the score is the winning vote fraction.
inline Prediction knn_predict(const KnnModel& m, const FeatureVector& x) {
    const auto q = m.scaler.transform(x);
    std::vector<std::pair<double, std::size_t>> dist(m.exemplars.size());
    for (std::size_t i = 0; i < dist.size(); ++i) dist[i] = {euclidean(q, m.exemplars[i]), i};
    const auto k = static_cast<std::ptrdiff_t>(m.k);
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    std::size_t positive = 0;
    for (std::ptrdiff_t i = 0; i < k; ++i) positive += m.labels[dist[static_cast<std::size_t>(i)].second] == 1;
    const std::size_t negative = m.k - positive;
    Prediction p;
    p.label = positive > negative ? 1 : 0;
    p.score = static_cast<double>(std::max(positive, negative)) / static_cast<double>(m.k);
    return p;
}

// ---------------------------------------------------------------------------
// Linear SVM (Pegasos)

struct SvmOptions {
    double lambda = 1e-4;
    std::size_t epochs = 100;
    std::uint64_t seed = 0;
    bool standardize = true;
};

struct SvmModel {
    std::vector<double> w;
    double b = 0.0;
    double lambda = 1e-4;
    Scaler scaler;

    friend bool operator==(const SvmModel&, const SvmModel&) = default;
};

struct SvmFit {
    SvmModel model;
    /// Objective before training (w = 0, b = 0), then after each epoch.
    std::vector<double> objective;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// lambda/2 (|w|^2 + b^2) + mean hinge loss; labels in {-1, +1}.
inline double svm_objective(std::span<const double> w, double b, double lambda,
                            const std::vector<std::vector<double>>& xs, std::span<const double> ys) {
    double hinge = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) hinge += std::max(0.0, 1.0 - ys[i] * (dot(w, xs[i]) + b));
    return 0.5 * lambda * (dot(w, w) + b * b) + hinge / static_cast<double>(xs.size());
}

/// Pegasos stochastic subgradient descent on the primal hinge objective with
/// step 1/(lambda t). The bias is an extra weight on a constant feature and
/// shrinks with w; left unshrunk, its 1/(lambda t) steps random-walk and the
/// objective ends above its starting value.
inline SvmFit svm_fit(std::span<const FeatureVector> xs, std::span<const int> ys, const SvmOptions& opt = {}) {
    if (!(opt.lambda > 0.0) || !std::isfinite(opt.lambda)) throw ConfigError("lambda must be positive");
    check_labels(xs, ys);
    if (xs.size() < 2) throw DataError("SVM training needs at least two samples");
    const bool has_pos = std::find(ys.begin(), ys.end(), 1) != ys.end();
    const bool has_neg = std::find(ys.begin(), ys.end(), 0) != ys.end();
    if (!has_pos || !has_neg) throw DataError("SVM training set contains a single class");

    SvmFit fit;
    auto& m = fit.model;
    m.lambda = opt.lambda;
    m.scaler = opt.standardize ? fit_scaler(xs) : Scaler::identity(xs.front().dim());
    std::vector<std::vector<double>> data;
    data.reserve(xs.size());
    for (const auto& x : xs) data.push_back(m.scaler.transform(x));
    std::vector<double> y(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) y[i] = ys[i] == 1 ? 1.0 : -1.0;

    const std::size_t dim = m.scaler.dim();
    m.w.assign(dim, 0.0);
    m.b = 0.0;
    fit.objective.push_back(svm_objective(m.w, m.b, m.lambda, data, y));

    std::mt19937_64 rng(opt.seed);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t t = 0;
    for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i : order) {
            ++t;
            const double eta = 1.0 / (m.lambda * static_cast<double>(t));
            const double margin = y[i] * (dot(m.w, data[i]) + m.b);
            const double shrink = 1.0 - eta * m.lambda;
            for (double& wj : m.w) wj *= shrink;
            m.b *= shrink;
            if (margin < 1.0) {
                const double step = eta * y[i];
                for (std::size_t j = 0; j < dim; ++j) m.w[j] += step * data[i][j];
                m.b += step;
            }
        }
        fit.objective.push_back(svm_objective(m.w, m.b, m.lambda, data, y));
    }
    return fit;
}

inline SvmModel svm_train(std::span<const FeatureVector> xs, std::span<const int> ys, const SvmOptions& opt = {}) {
    return svm_fit(xs, ys, opt).model;
}

/// Label 1 when w.x + b >= 0; the score is the absolute margin.
inline Prediction svm_predict(const SvmModel& m, const FeatureVector& x) {
    const auto z = m.scaler.transform(x);
    if (z.size() != m.w.size()) throw DataError("SVM weight/feature dimension mismatch");
    const double d = dot(m.w, z) + m.b;
    return Prediction{d >= 0.0 ? 1 : 0, std::abs(d)};
}

// ---------------------------------------------------------------------------

enum class ClassifierKind { knn, svm };

inline std::string to_string(ClassifierKind k) { return k == ClassifierKind::knn ? "knn" : "svm"; }

inline ClassifierKind parse_classifier_kind(const std::string& s) {
    if (s == "knn") return ClassifierKind::knn;
    if (s == "svm") return ClassifierKind::svm;
    throw ConfigError("unknown classifier '" + s + "' (expected knn or svm)");
}

struct ClassifierParams {
    ClassifierKind kind = ClassifierKind::svm;
    std::size_t k = 5;
    SvmOptions svm;
};

/// Either trained model behind one predict interface.
class Classifier {
public:
    Classifier() = default;
    Classifier(KnnModel m) : model_(std::move(m)) {}
    Classifier(SvmModel m) : model_(std::move(m)) {}

    static Classifier train(std::span<const FeatureVector> xs, std::span<const int> ys, const ClassifierParams& p) {
        if (p.kind == ClassifierKind::knn) return knn_train(xs, ys, p.k, p.svm.standardize);
        return svm_train(xs, ys, p.svm);
    }

    ClassifierKind kind() const { return std::holds_alternative<KnnModel>(model_) ? ClassifierKind::knn : ClassifierKind::svm; }

    std::size_t dim() const {
        return std::visit([](const auto& m) { return m.scaler.dim(); }, model_);
    }

    Prediction predict(const FeatureVector& x) const {
        return std::visit(
            [&](const auto& m) {
                if constexpr (std::is_same_v<std::decay_t<decltype(m)>, KnnModel>)
                    return knn_predict(m, x);
                else
                    return svm_predict(m, x);
            },
            model_);
    }

    const std::variant<KnnModel, SvmModel>& model() const noexcept { return model_; }

    friend bool operator==(const Classifier&, const Classifier&) = default;

private:
    std::variant<KnnModel, SvmModel> model_;
};

// ---------------------------------------------------------------------------
// Serialization. nlohmann/json prints doubles in shortest round-trip form.

inline void to_json(nlohmann::json& j, const Scaler& s) { j = {{"mean", s.mean()}, {"std", s.stddev()}}; }

inline void from_json(const nlohmann::json& j, Scaler& s) {
    s = Scaler(j.at("mean").get<std::vector<double>>(), j.at("std").get<std::vector<double>>());
}

inline void to_json(nlohmann::json& j, const Classifier& c) {
    if (const auto* knn = std::get_if<KnnModel>(&c.model())) {
        j = {{"kind", "knn"}, {"k", knn->k}, {"scaler", knn->scaler}, {"labels", knn->labels},
             {"exemplars", knn->exemplars}};
    } else {
        const auto& svm = std::get<SvmModel>(c.model());
        j = {{"kind", "svm"}, {"lambda", svm.lambda}, {"bias", svm.b}, {"weights", svm.w}, {"scaler", svm.scaler}};
    }
}

inline void from_json(const nlohmann::json& j, Classifier& c) {
    const auto kind = parse_classifier_kind(j.at("kind").get<std::string>());
    if (kind == ClassifierKind::knn) {
        KnnModel m;
        m.k = j.at("k").get<std::size_t>();
        m.scaler = j.at("scaler").get<Scaler>();
        m.labels = j.at("labels").get<std::vector<int>>();
        m.exemplars = j.at("exemplars").get<std::vector<std::vector<double>>>();
        if (m.k == 0 || m.k % 2 == 0 || m.labels.size() != m.exemplars.size() || m.labels.size() < m.k)
            throw DataError("inconsistent KNN model");
        for (const auto& e : m.exemplars)
            if (e.size() != m.scaler.dim()) throw DataError("KNN exemplar dimension mismatch");
        c = Classifier(std::move(m));
    } else {
        SvmModel m;
        m.lambda = j.at("lambda").get<double>();
        m.b = j.at("bias").get<double>();
        m.w = j.at("weights").get<std::vector<double>>();
        m.scaler = j.at("scaler").get<Scaler>();
        if (m.w.size() != m.scaler.dim()) throw DataError("SVM weight/scaler dimension mismatch");
        c = Classifier(std::move(m));
    }
}

} // namespace evdet
