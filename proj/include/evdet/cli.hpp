#pragma once

// Command-line front end. run_command() is the whole tool; main() only
// forwards argv and the standard streams.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evdet/pipeline.hpp"
#include "evdet/synth.hpp"

namespace evdet::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kIo = 3 };

namespace detail {

inline std::vector<std::string> read_lines(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(std::move(line));
    return lines;
}

inline std::vector<TweetRecord> read_records(const std::filesystem::path& path, ParseOptions opts) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::vector<TweetRecord> out;
    std::size_t n = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out.push_back(parse_tweet_record(line, n, opts));
    }
    return out;
}

/// Writes to --out when given, otherwise to the console stream.
inline void emit(const std::string& out_path, std::ostream& console, const std::string& text) {
    if (out_path.empty()) {
        console << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw IoError("cannot write " + out_path);
    f << text;
    if (!f) throw IoError("write failed on " + out_path);
}

struct Common {
    std::string store;
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    std::size_t k = 0;
    std::string classifier;
    std::string fusion;
};

inline bool given(const CLI::App& sub, const std::string& name) {
    const auto* opt = sub.get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
}

inline RunConfig resolve_config(const Common& c, const CLI::App& sub) {
    RunConfig cfg = c.config.empty() ? RunConfig{} : load_config(c.config);
    if (!c.store.empty()) cfg.store = c.store;
    if (given(sub, "--seed")) cfg.seed = c.seed;
    if (sub.get_name() == "train" && given(sub, "--k")) cfg.knn_k = c.k; // keywords reuses --k for its count
    if (given(sub, "--classifier")) cfg.classifier = parse_classifier_kind(c.classifier);
    if (given(sub, "--fusion")) cfg.fusion = parse_fusion_mode(c.fusion);
    cfg.validate();
    if (cfg.store.empty()) throw ConfigError("no store given (--store or config 'store')");
    return cfg;
}

} // namespace detail

inline int run_command(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multimodal (text + image) event detection for tweet corpora", "evdet"};
    app.require_subcommand(1);

    detail::Common c;
    std::string in_path, model_path, features_out;
    SynthOptions synth;

    auto add_store = [&](CLI::App* s, bool required) {
        auto* o = s->add_option("--store", c.store, "Corpus store directory (corpus.jsonl + images)");
        if (required) o->required();
    };

    auto* synth_cmd = app.add_subcommand("synth", "Generate the seeded synthetic benchmark corpus");
    synth_cmd->add_option("--out", c.out, "Output directory (tweets.jsonl + img/)")->required();
    synth_cmd->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
    synth_cmd->add_option("--records", synth.records, "Number of records")->capture_default_str();
    synth_cmd->add_option("--text-noise", synth.text_noise, "Fraction of texts without class cues")
        ->capture_default_str();
    synth_cmd->add_option("--image-noise", synth.image_noise, "Fraction of images showing the other class")
        ->capture_default_str();

    auto* ingest_cmd = app.add_subcommand("ingest", "Ingest JSON-Lines tweets into a store");
    add_store(ingest_cmd, true);
    ingest_cmd->add_option("--in", in_path, "Input JSONL file (default: standard input)");

    auto* keywords_cmd = app.add_subcommand("keywords", "Top-K event keywords from the training split");
    add_store(keywords_cmd, false);
    keywords_cmd->add_option("--config", c.config, "Run configuration file");
    std::size_t keyword_count = 100;
    keywords_cmd->add_option("--k", keyword_count, "Number of keywords")->capture_default_str();
    keywords_cmd->add_option("--out", c.out, "CSV output file (default: standard output)");

    auto* train_cmd = app.add_subcommand("train", "Train text/image classifiers and the fusion rule");
    add_store(train_cmd, false);
    train_cmd->add_option("--config", c.config, "Run configuration file");
    train_cmd->add_option("--seed", c.seed, "Training seed");
    train_cmd->add_option("--k", c.k, "Neighbours for the KNN classifier");
    train_cmd->add_option("--classifier", c.classifier, "knn or svm")->check(CLI::IsMember({"knn", "svm"}));
    train_cmd->add_option("--fusion", c.fusion, "gate or concat")->check(CLI::IsMember({"gate", "concat"}));
    train_cmd->add_option("--out", c.out, "Model file to write")->required();
    train_cmd->add_option("--features-out", features_out, "Also write training image features as CSV");

    auto* eval_cmd = app.add_subcommand("evaluate", "Compare text, image and fused accuracy on the test split");
    add_store(eval_cmd, true);
    eval_cmd->add_option("--model", model_path, "Model file")->required();
    eval_cmd->add_option("--out", c.out, "Also write the machine-readable report here");

    auto* detect_cmd = app.add_subcommand("detect", "Classify new records with a trained model");
    detect_cmd->add_option("--model", model_path, "Model file")->required();
    detect_cmd->add_option("--in", in_path, "Input JSONL file")->required();
    add_store(detect_cmd, false);
    detect_cmd->add_option("--out", c.out, "Output file (default: standard output)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kUsage;
    }

    try {
        if (*synth_cmd) {
            const auto records = synthesize_corpus(c.out, synth);
            out << "wrote " << records.size() << " records to " << (std::filesystem::path(c.out) / "tweets.jsonl").string()
                << '\n';
        } else if (*ingest_cmd) {
            auto store = CorpusStore::open(c.store);
            std::vector<std::string> lines;
            if (in_path.empty()) {
                lines = detail::read_lines(in);
            } else {
                std::ifstream f(in_path);
                if (!f) throw IoError("cannot read " + in_path);
                lines = detail::read_lines(f);
            }
            const auto report = ingest_stream(lines, store);
            for (const auto& e : report.errors) err << "rejected: " << e << '\n';
            out << "accepted " << report.accepted << ", rejected by filter " << report.rejected_filter
                << ", rejected by parse " << report.rejected_parse << '\n';
        } else if (*keywords_cmd) {
            const auto cfg = detail::resolve_config(c, *keywords_cmd);
            const auto store = CorpusStore::open(cfg.store);
            std::ostringstream csv;
            write_keywords_csv(csv, corpus_keywords(store, cfg, keyword_count));
            detail::emit(c.out, out, csv.str());
        } else if (*train_cmd) {
            const auto cfg = detail::resolve_config(c, *train_cmd);
            const auto store = CorpusStore::open(cfg.store);
            const auto model = train_pipeline(store, cfg);
            save_bundle(c.out, model);
            if (!features_out.empty()) {
                const auto train = training_records(store, cfg);
                std::ofstream f(features_out);
                if (!f) throw IoError("cannot write " + features_out);
                write_feature_csv(f, train, image_vectors(train, store.root(), cfg.image));
            }
            out << "trained " << to_string(cfg.classifier) << " / " << to_string(cfg.fusion) << " model";
            if (cfg.fusion == FusionMode::gate) {
                char buf[96];
                std::snprintf(buf, sizeof buf, ", tau %.6g, validation accuracy %.4f", model.policy.tau,
                              model.validation_accuracy);
                out << buf;
            }
            out << " -> " << c.out << '\n';
        } else if (*eval_cmd) {
            const auto model = load_bundle(model_path);
            const auto store = CorpusStore::open(c.store);
            const auto report = compare_methods(store, model);
            out << format_table(report);
            if (!c.out.empty()) detail::emit(c.out, out, report_json(report).dump(2) + "\n");
        } else if (*detect_cmd) {
            const auto model = load_bundle(model_path);
            const auto records = detail::read_records(in_path, ParseOptions{.ignore_label = true});
            const std::filesystem::path root =
                c.store.empty() ? std::filesystem::path(in_path).parent_path() : std::filesystem::path(c.store);
            std::ostringstream table;
            table << "id\tlabel\tchannel\n";
            for (const auto& d : detect(model, records, root))
                table << d.id << '\t' << (d.label ? std::to_string(*d.label) : "-") << '\t' << d.channel << '\n';
            detail::emit(c.out, out, table.str());
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kData;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kIo;
    }
    return kOk;
}

} // namespace evdet::cli
