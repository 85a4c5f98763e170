#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "evdet/cli.hpp"
#include "test_util.hpp"

using namespace evdet;
using evdet::testing::TempDir;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run(std::vector<std::string> args, const std::string& stdin_text = "") {
    std::istringstream in(stdin_text);
    std::ostringstream out, err;
    const int code = cli::run_command(args, in, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

// One small synthetic corpus shared by the suite; the synth directory doubles as the store.
class PipelineTest : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = new TempDir;
        SynthOptions opt;
        opt.records = 150;
        opt.seed = 7;
        synthesize_corpus(dir_->path(), opt);
        const auto r = run({"ingest", "--store", dir_->path().string(), "--in", (*dir_ / "tweets.jsonl").string()});
        ASSERT_EQ(r.code, 0) << r.err;
    }
    static void TearDownTestSuite() {
        delete dir_;
        dir_ = nullptr;
    }
    static std::string store() { return dir_->path().string(); }

    static TempDir* dir_;
    TempDir scratch_;
};

TempDir* PipelineTest::dir_ = nullptr;

} // namespace

TEST(RunConfig, JsonRoundTripAndUnknownKeys) {
    RunConfig c;
    c.store = "s";
    c.classifier = ClassifierKind::knn;
    c.knn_k = 7;
    c.fusion = FusionMode::concat;
    c.seed = 99;
    c.image.hog.bins = 12;
    const auto back = parse_config(nlohmann::json::parse(config_json(c).dump()));
    EXPECT_EQ(config_json(back).dump(), config_json(c).dump());
    EXPECT_EQ(config_fingerprint(back), config_fingerprint(c));

    auto j = nlohmann::json::parse(config_json(c).dump());
    j["colour"] = 1;
    EXPECT_THROW(parse_config(j), ConfigError);
    j = nlohmann::json::parse(config_json(c).dump());
    j["image"]["hog"]["cells"] = 3;
    EXPECT_THROW(parse_config(j), ConfigError);
    EXPECT_THROW(parse_config(nlohmann::json{{"knn_k", 4}}), ConfigError);
}

TEST(RunConfig, FingerprintIgnoresPathsOnly) {
    RunConfig a, b;
    b.store = "elsewhere";
    EXPECT_EQ(config_fingerprint(a), config_fingerprint(b));
    b.seed = 1;
    EXPECT_NE(config_fingerprint(a), config_fingerprint(b));
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({"frobnicate"}).code, 1);
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"train", "--bogus"}).code, 1);
    EXPECT_EQ(run({"train", "--out", "m.json", "--classifier", "tree", "--store", "x"}).code, 1);
    EXPECT_EQ(run({"train", "--out", "m.json"}).code, 1); // no store
}

TEST(Cli, IngestFromStdinPrintsReport) {
    TempDir d;
    evdet::testing::touch_image(d / "img/a.png");
    const std::string lines =
        R"({"id":"a","timestamp":"2014-12-28T06:00:00Z","text":"plane found","image_path":"img/a.png","label":1})"
        "\n"
        R"({"id":"b","timestamp":"2014-12-28T06:01:00Z","text":"no image","image_path":"img/missing.png"})"
        "\n"
        "{not json\n";
    const auto r = run({"ingest", "--store", d.path().string()}, lines);
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "accepted 1, rejected by filter 1, rejected by parse 1\n");
    EXPECT_EQ(CorpusStore::open(d.path()).size(), 1u);
    EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST(Cli, IoAndDataErrorCodes) {
    TempDir d;
    EXPECT_EQ(run({"evaluate", "--store", d.path().string(), "--model", (d / "nope.json").string()}).code, 3);
    std::ofstream(d / "bad.json") << "{\"format\":\"evdet-model\",\"version\":1}";
    EXPECT_EQ(run({"evaluate", "--store", d.path().string(), "--model", (d / "bad.json").string()}).code, 2);
    std::ofstream(d / "garbage.json") << "not json at all";
    EXPECT_EQ(run({"evaluate", "--store", d.path().string(), "--model", (d / "garbage.json").string()}).code, 2);
    // Empty store: nothing to train on.
    EXPECT_EQ(run({"train", "--store", (d / "empty").string(), "--out", (d / "m.json").string()}).code, 2);
}

TEST_F(PipelineTest, TrainEvaluateDetectGate) {
    const auto model = scratch_ / "model.json";
    auto r = run({"train", "--store", store(), "--out", model.string(), "--features-out", (scratch_ / "f.csv").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("tau"), std::string::npos);
    const auto csv = slurp(scratch_ / "f.csv");
    // One row per labeled training record: id then 1828 values.
    std::istringstream rows(csv);
    std::string first;
    std::getline(rows, first);
    EXPECT_TRUE(first.starts_with("s0000,"));
    EXPECT_EQ(std::count(first.begin(), first.end(), ','), 1828);

    r = run({"evaluate", "--store", store(), "--model", model.string(), "--out", (scratch_ / "r.json").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("Accuracy"), std::string::npos);
    const auto report = nlohmann::json::parse(slurp(scratch_ / "r.json"));
    EXPECT_EQ(report["records"], 50);
    EXPECT_EQ(report["methods"].size(), 3u);

    // Labels in detect input are never read: an out-of-range label is accepted.
    std::ofstream(scratch_ / "new.jsonl")
        << R"({"id":"n1","timestamp":"2015-01-02T00:00:00Z","text":"wreckage found at sea","image_path":")"
        << (dir_->path() / "img/s0003.png").string() << R"(","label":7})" << "\n"
        << R"({"id":"n2","timestamp":"2015-01-02T00:01:00Z","text":"no picture","image_path":"missing.png"})" << "\n";
    r = run({"detect", "--model", model.string(), "--in", (scratch_ / "new.jsonl").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream lines(r.out);
    std::string header, row1, row2;
    std::getline(lines, header);
    std::getline(lines, row1);
    std::getline(lines, row2);
    EXPECT_EQ(header, "id\tlabel\tchannel");
    EXPECT_TRUE(row1.starts_with("n1\t0\t") || row1.starts_with("n1\t1\t")) << row1;
    EXPECT_TRUE(row1.ends_with("\ttext") || row1.ends_with("\timage")) << row1;
    EXPECT_EQ(row2, "n2\t-\tfiltered");
}

TEST_F(PipelineTest, DetectMatchesLibraryAndIgnoresLabels) {
    RunConfig cfg;
    cfg.store = store();
    const auto s = CorpusStore::open(store());
    const auto m = train_pipeline(s, cfg);
    std::vector<TweetRecord> records(s.records().begin(), s.records().begin() + 20);
    auto flipped = records;
    for (auto& r : flipped) r.label = r.label ? 1 - *r.label : 1;
    const auto a = detect(m, records, s.root());
    const auto b = detect(m, flipped, s.root());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].label, b[i].label);
        EXPECT_EQ(a[i].channel, b[i].channel);
    }
}

TEST_F(PipelineTest, BundleRoundTripIsLossless) {
    RunConfig cfg;
    cfg.store = store();
    const auto s = CorpusStore::open(store());
    auto m = train_pipeline(s, cfg);
    const auto text = serialize_bundle(m);
    save_bundle(scratch_ / "m.json", m);
    const auto back = load_bundle(scratch_ / "m.json");
    EXPECT_EQ(serialize_bundle(back), text);
    EXPECT_EQ(back.policy.tau, m.policy.tau);

    m.policy.tau = -std::numeric_limits<double>::infinity();
    save_bundle(scratch_ / "m2.json", m);
    EXPECT_EQ(load_bundle(scratch_ / "m2.json").policy.tau, -std::numeric_limits<double>::infinity());

    const auto r1 = compare_methods(s, m);
    const auto r2 = compare_methods(s, load_bundle(scratch_ / "m2.json"));
    EXPECT_EQ(report_json(r1).dump(), report_json(r2).dump());
}

TEST_F(PipelineTest, ConcatAndKnnModes) {
    for (const auto& [clf, fusion] : {std::pair{"svm", "concat"}, std::pair{"knn", "gate"}, std::pair{"knn", "concat"}}) {
        const auto model = scratch_ / (std::string(clf) + "-" + fusion + ".json");
        auto r = run({"train", "--store", store(), "--classifier", clf, "--fusion", fusion, "--k", "3", "--out",
                      model.string()});
        ASSERT_EQ(r.code, 0) << r.err;
        r = run({"evaluate", "--store", store(), "--model", model.string()});
        ASSERT_EQ(r.code, 0) << r.err;
        EXPECT_NE(r.out.find("fusion"), std::string::npos);
        const auto m = load_bundle(model);
        EXPECT_EQ(m.concat.has_value(), std::string(fusion) == "concat");
        if (m.concat) {
            EXPECT_EQ(m.concat->dim(), m.text.dim() + m.image.dim());
        }
    }
}

TEST_F(PipelineTest, KeywordsReport) {
    const auto r = run({"keywords", "--store", store(), "--k", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream lines(r.out);
    std::string l;
    std::size_t n = 0;
    std::getline(lines, l);
    EXPECT_EQ(l, "term,weight");
    while (std::getline(lines, l)) ++n;
    EXPECT_EQ(n, 5u);
}

TEST_F(PipelineTest, RepeatedRunsAreByteIdentical) {
    std::string models[2], reports[2];
    for (int i = 0; i < 2; ++i) {
        const auto model = scratch_ / ("m" + std::to_string(i) + ".json");
        const auto report = scratch_ / ("r" + std::to_string(i) + ".json");
        ASSERT_EQ(run({"train", "--store", store(), "--seed", "5", "--out", model.string()}).code, 0);
        const auto r = run({"evaluate", "--store", store(), "--model", model.string(), "--out", report.string()});
        ASSERT_EQ(r.code, 0);
        models[i] = slurp(model);
        reports[i] = slurp(report) + r.out;
    }
    EXPECT_EQ(models[0], models[1]);
    EXPECT_EQ(reports[0], reports[1]);
}
