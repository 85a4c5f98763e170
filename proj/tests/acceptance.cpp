// Acceptance checks AC1..AC10. Prints one PASS/FAIL line per criterion and
// exits nonzero when any fails.
#include <chrono>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "evdet/cli.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace evdet;
using namespace evdet::oracle;

namespace {

// Returns an empty string on success, otherwise the reason for failure.
using Check = std::function<std::string()>;

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

int cli(std::vector<std::string> args, std::string* console = nullptr) {
    std::istringstream in;
    std::ostringstream out, err;
    const int code = cli::run_command(args, in, out, err);
    if (console) *console = out.str();
    if (code != 0) std::cerr << err.str();
    return code;
}

std::string ac1() {
    testing::TempDir d;
    const auto t0 = std::chrono::steady_clock::now();
    const auto dir = d.path().string();
    const auto model = (d / "model.json").string();
    const auto report = (d / "report.json").string();
    if (cli({"synth", "--out", dir, "--records", "600"}) != 0) return "synth failed";
    if (cli({"ingest", "--store", dir, "--in", (d / "tweets.jsonl").string()}) != 0) return "ingest failed";
    if (cli({"train", "--store", dir, "--out", model}) != 0) return "train failed";
    if (cli({"evaluate", "--store", dir, "--model", model, "--out", report}) != 0) return "evaluate failed";
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto j = nlohmann::json::parse(slurp(report));
    const double text = j["methods"][0]["accuracy"], image = j["methods"][1]["accuracy"],
                 fused = j["methods"][2]["accuracy"];
    const auto detail = fmt("text %.4f image %.4f fusion %.4f, %.1f s", text, image, fused, secs);
    std::cout << "      " << detail << '\n';
    if (fused < text || fused < image) return "fusion below a single channel: " + detail;
    if (fused - std::max(text, image) < 0.02) return "fusion margin under 0.02: " + detail;
    if (secs >= 60.0) return "runtime over 60 s: " + detail;
    return {};
}

std::string ac2() {
    if (accuracy({3, 4, 2, 1}) != 0.7) return "(3,4,2,1) != 0.7";
    if (accuracy({10, 7, 0, 0}) != 1.0) return "perfect != 1.0";
    if (accuracy(confusion(std::vector<int>{1, 1, 0, 0}, std::vector<int>{1, 0, 0, 1})) != 0.5) return "(1,1,1,1) != 0.5";
    return {};
}

std::string ac3() {
    std::mt19937_64 rng(3);
    const auto xs = random_points(300, 10, rng);
    std::vector<int> ys;
    for (std::size_t i = 0; i < xs.size(); ++i) ys.push_back(static_cast<int>(rng() % 2));
    const auto m = knn_train(xs, ys, 5);
    std::size_t bad = 0;
    for (const auto& q : random_points(200, 10, rng)) bad += !(knn_predict(m, q) == knn_oracle(m, q));
    return bad ? std::to_string(bad) + " of 200 queries differ from the oracle" : "";
}

std::string ac4() {
    std::mt19937_64 rng(4);
    for (int img = 0; img < 50; ++img) {
        const auto g = testing::random_gray(8, 8, rng);
        for (const auto& off : kStandardOffsets) {
            const auto m = glcm(g, off, 16);
            double sum = 0;
            for (std::size_t i = 0; i < 16; ++i)
                for (std::size_t j = 0; j < 16; ++j) {
                    sum += m(i, j);
                    if (m(i, j) != m(j, i)) return "matrix not symmetric";
                }
            if (std::abs(sum - 1.0) > 1e-12) return fmt("matrix sums to %.17g", sum);
            const auto got = haralick(m);
            const auto want = pair_oracle(g, off, 16);
            for (auto [a, b] : {std::pair{got.contrast, want.contrast}, std::pair{got.correlation, want.correlation},
                                std::pair{got.energy, want.energy}, std::pair{got.homogeneity, want.homogeneity}})
                if (std::abs(a - b) > 1e-12) return fmt("feature %.17g vs oracle %.17g", a, b);
        }
    }
    return {};
}

std::string ac5() {
    const auto zero = hog_dense(GrayRaster(64, 64, 128));
    if (zero.size() != 1764) return "descriptor length " + std::to_string(zero.size());
    for (double v : zero)
        if (v != 0.0) return "constant image gives a nonzero descriptor";
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto g = testing::random_gray(64, 64, rng, 0, 200);
        auto shifted = g;
        for (auto& v : shifted.intensities) v = static_cast<std::uint8_t>(v + 55);
        const auto a = hog_dense(g);
        if (a != hog_dense(shifted)) return "intensity shift changes the descriptor";
        for (std::size_t b = 0; b < a.size(); b += 36) {
            double ss = 0;
            for (std::size_t i = b; i < b + 36; ++i) ss += a[i] * a[i];
            if (std::sqrt(ss) > 1.0 + 1e-6) return fmt("block norm %.17g", std::sqrt(ss));
        }
    }
    return {};
}

std::string ac6() {
    const std::vector<TokenList> docs = {
        {"plane", "found", "black", "box"}, {"plane", "missing"}, {"rescue", "passenger", "found"}};
    const auto v = build_vocabulary(docs);
    const auto d1 = tfidf_vector(docs[0], v);
    if (std::abs(d1.at(v.find("found")->index) - std::log(1.5)) > 1e-12) return "found in d1 != ln(3/2)";
    for (const auto& d : docs) {
        const auto x = tfidf_vector(d, v);
        for (const auto& t : v.terms())
            if (std::abs(x.at(v.find(t)->index) - tfidf_weight(t, d, docs)) > 1e-12) return "weight of " + t;
    }
    const std::vector<TokenList> everywhere = {{"sea", "x"}, {"sea"}, {"y", "sea"}};
    const auto ve = build_vocabulary(everywhere);
    for (const auto& d : everywhere)
        if (tfidf_vector(d, ve).at(ve.find("sea")->index) != 0.0) return "df = N term has nonzero weight";
    return {};
}

std::string ac7() {
    std::ifstream in(std::string(EVDET_TEST_DATA) + "/porter_reference.tsv");
    if (!in) return "fixture missing";
    std::string word, expected;
    std::size_t n = 0, bad = 0;
    while (in >> word >> expected) {
        ++n;
        bad += stem(word) != expected;
    }
    std::cout << "      " << n - bad << "/" << n << " pairs agree\n";
    if (n < 100) return "fixture has fewer than 100 pairs";
    return bad ? std::to_string(bad) + " mismatches" : "";
}

std::string ac8() {
    std::vector<FeatureVector> xs;
    std::vector<int> ys;
    separable_fixture(8, xs, ys);
    const auto m = svm_train(xs, ys, {1e-4, 100, 8, true});
    std::size_t correct = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) correct += svm_predict(m, xs[i]).label == ys[i];
    if (correct != xs.size()) return "training accuracy " + std::to_string(correct) + "/100";
    std::vector<int> flipped(ys);
    for (auto& y : flipped) y ^= 1;
    const auto f = svm_train(xs, flipped, {1e-4, 100, 8, true});
    for (std::size_t i = 0; i < m.w.size(); ++i) {
        const double neg = -m.w[i];
        if (std::memcmp(&neg, &f.w[i], sizeof neg) != 0) return "w not bitwise negated";
    }
    const double neg_b = -m.b;
    if (std::memcmp(&neg_b, &f.b, sizeof neg_b) != 0) return "b not bitwise negated";
    return {};
}

std::string ac9() {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 20 + rng() % 80;
        std::vector<Prediction> text(n), image(n);
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            labels[i] = static_cast<int>(rng() % 2);
            text[i] = {static_cast<int>(rng() % 2), u(rng)};
            image[i] = {static_cast<int>(rng() % 2), u(rng)};
        }
        const auto c = calibrate_threshold(text, image, labels);
        const auto want = exhaustive_scan(text, image, labels);
        if (c.tau != want.tau || c.validation_accuracy != want.validation_accuracy)
            return "differs from the exhaustive scan";
        if (c.validation_accuracy < channel_accuracy(text, labels) ||
            c.validation_accuracy < channel_accuracy(image, labels))
            return fmt("calibrated %.4f below a single channel", c.validation_accuracy);
    }
    return {};
}

std::string ac10() {
    testing::TempDir d;
    const auto dir = d.path().string();
    if (cli({"synth", "--out", dir, "--records", "240"}) != 0) return "synth failed";
    if (cli({"ingest", "--store", dir, "--in", (d / "tweets.jsonl").string()}) != 0) return "ingest failed";
    std::string models[2], reports[2];
    for (int i = 0; i < 2; ++i) {
        const auto model = (d / ("m" + std::to_string(i) + ".json")).string();
        const auto report = (d / ("r" + std::to_string(i) + ".json")).string();
        std::string table;
        if (cli({"train", "--store", dir, "--seed", "42", "--out", model}) != 0) return "train failed";
        if (cli({"evaluate", "--store", dir, "--model", model, "--out", report}, &table) != 0) return "evaluate failed";
        models[i] = slurp(model);
        reports[i] = slurp(report) + table;
    }
    if (models[0] != models[1]) return "model files differ";
    if (reports[0] != reports[1]) return "reports differ";
    return {};
}

} // namespace

int main() {
    const std::pair<const char*, Check> checks[] = {
        {"AC1 fusion beats both single channels on the synthetic corpus", ac1},
        {"AC2 accuracy equation", ac2},
        {"AC3 KNN matches the brute-force oracle", ac3},
        {"AC4 GLCM/Haralick match the pair-enumeration oracle", ac4},
        {"AC5 HOG analytic checks", ac5},
        {"AC6 TF-IDF hand corpus", ac6},
        {"AC7 Porter stemmer reference vocabulary", ac7},
        {"AC8 SVM separable fixture and label-flip antisymmetry", ac8},
        {"AC9 threshold calibration dominates single channels", ac9},
        {"AC10 repeated runs are byte-identical", ac10},
    };
    int failures = 0;
    for (const auto& [name, check] : checks) {
        std::string why;
        try {
            why = check();
        } catch (const std::exception& e) {
            why = std::string("exception: ") + e.what();
        }
        std::cout << (why.empty() ? "[PASS] " : "[FAIL] ") << name;
        if (!why.empty()) std::cout << " (" << why << ")";
        std::cout << std::endl;
        failures += !why.empty();
    }
    std::cout << (10 - failures) << "/10 criteria passed\n";
    return failures == 0 ? 0 : 1;
}
