// Copyright (C) 2026 The treeprompt Authors
// SPDX-License-Identifier: Apache-2.0

// treeprompt: compress documents to several ratios in one pass.
//
//   treeprompt --input doc.md --ratio 0.2,0.3,0.5 --out-dir out/
//   treeprompt --input doc.md --parses doc.conllu --entropy sidecar --sidecar doc.tsv
//   treeprompt bench --sizes 8x20,16x20,32x20

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "treeprompt/treeprompt.hpp"

namespace fs = std::filesystem;
using namespace treeprompt;

namespace {

struct RunConfig {
    std::vector<std::string> inputs;
    std::string parses;
    std::string entropy;
    std::string sidecar;
    std::string endpoint;
    std::string ngram_corpus;
    std::vector<double> ratios{0.5};
    double a1 = 4.0;
    double a2 = 100.0;
    std::string variant = "full";
    bool no_adjust = false;
    std::string eval_against;
    std::string dump_tree;
    std::string out_dir = ".";
    std::string report;
    bool unsafe_params = false;
    unsigned threads = 0;
};

std::string read_file(const fs::path& path, const std::string& module) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(module, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Files are staged next to their destination and renamed only once every
/// output of the run exists, so a failed run leaves nothing behind.
class StagedWriter {
public:
    ~StagedWriter() {
        std::error_code ec;
        for (const auto& [tmp, dst] : staged_) fs::remove(tmp, ec);
    }

    void add(const fs::path& dst, const std::string& content) {
        if (dst.has_parent_path()) fs::create_directories(dst.parent_path());
        fs::path tmp = dst;
        tmp += ".partial";
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        out.close();
        if (!out) throw Error("cli", "cannot write " + dst.string());
        staged_.emplace_back(tmp, dst);
    }

    void commit() {
        for (const auto& [tmp, dst] : staged_) fs::rename(tmp, dst);
        staged_.clear();
    }

private:
    std::vector<std::pair<fs::path, fs::path>> staged_;
};

std::string resolve_entropy(const RunConfig& cfg) {
    std::string mode = cfg.entropy;
    if (mode.empty()) {
        if (!cfg.sidecar.empty() && !cfg.endpoint.empty()) {
            throw Error("cli", "both --sidecar and --endpoint given; choose one with --entropy");
        }
        mode = !cfg.sidecar.empty() ? "sidecar" : !cfg.endpoint.empty() ? "remote" : "ngram";
    }
    if (mode == "sidecar" && cfg.sidecar.empty()) throw Error("cli", "--entropy sidecar needs --sidecar <path>");
    if (mode == "remote" && cfg.endpoint.empty()) throw Error("cli", "--entropy remote needs --endpoint <url>");
    if (mode != "ngram" && mode != "sidecar" && mode != "remote") {
        throw Error("cli", "unknown entropy provider '" + mode + "'");
    }
    return mode;
}

SegmentedDocument load_document(const fs::path& path) {
    const std::string text = read_file(path, "segmenter");
    if (path.extension() == ".json") {
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw Error("segmenter", std::string("malformed pre-segmented input: ") + e.what());
        }
        return load_segmented(record);
    }
    return segment(text);
}

/// Runs one document and stages its outputs into `writer`.
nlohmann::json run_document(const RunConfig& cfg, const fs::path& input, const fs::path& out_dir,
                            StagedWriter& writer) {
    const std::string mode = resolve_entropy(cfg);
    SegmentedDocument doc = load_document(input);

    std::optional<std::string> conllu;
    std::vector<std::string> dropped;
    if (!cfg.parses.empty()) {
        conllu = read_file(cfg.parses, "parse_ingest");
    } else {
        // The sidecar is indexed against the sentences that will actually be scored.
        dropped = drop_empty_sentences(doc);
    }

    std::unique_ptr<EntropyProvider> provider;
    if (mode == "sidecar") {
        provider = std::make_unique<SidecarProvider>(read_sidecar(read_file(cfg.sidecar, "scoring"), doc));
    } else if (mode == "remote") {
        provider = std::make_unique<RemoteProvider>(cfg.endpoint);
    } else {
        std::string corpus = cfg.ngram_corpus.empty() ? doc.source_text : read_file(cfg.ngram_corpus, "scoring");
        provider = std::make_unique<NGramProvider>(train_ngram(corpus));
    }

    PipelineOptions opts;
    opts.ratios = cfg.ratios;
    opts.variant = parse_variant(cfg.no_adjust ? "no-adjust" : cfg.variant);
    opts.params = {cfg.a1, cfg.a2};
    opts.unsafe_params = cfg.unsafe_params;
    opts.scoring_threads = cfg.threads;
    if (cfg.no_adjust && cfg.variant != "full" && cfg.variant != "no-adjust") {
        throw Error("cli", "--no-adjust conflicts with --variant " + cfg.variant);
    }

    auto result = run_pipeline(std::move(doc), *provider, conllu, opts);
    result.warnings.insert(result.warnings.begin(), dropped.begin(), dropped.end());

    std::optional<std::string> reference;
    if (cfg.eval_against == "original") {
        reference = result.doc.source_text;
    } else if (cfg.eval_against.rfind("file:", 0) == 0) {
        reference = read_file(cfg.eval_against.substr(5), "evalkit");
    } else if (!cfg.eval_against.empty()) {
        throw Error("cli", "--eval-against expects 'original' or 'file:<path>'");
    }

    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : result.results) {
        fs::path path = out_dir / compressed_file_name(r.ratio);
        writer.add(path, r.compressed_text + "\n");
        std::optional<MetricReport> metrics;
        if (reference) metrics = evaluate(r, result.tree, *reference);
        records.push_back(ratio_record(r, path.string(), metrics));
    }
    if (!cfg.dump_tree.empty()) {
        fs::path dump = cfg.inputs.size() > 1 ? out_dir / fs::path(cfg.dump_tree).filename() : fs::path(cfg.dump_tree);
        writer.add(dump, dump.extension() == ".dot" ? dump_dot(result.tree) : dump_text(result.tree));
    }
    for (const auto& w : result.warnings) std::cerr << "warning: " << input.string() << ": " << w << '\n';

    return {{"input", input.string()},
            {"variant", to_string(opts.variant)},
            {"a1", cfg.a1},
            {"a2", cfg.a2},
            {"entropy", mode},
            {"sentences", result.doc.sentences.size()},
            {"nodes", result.tree.size()},
            {"total_length", result.tree.total_length()},
            {"warnings", result.warnings},
            {"ratios", records}};
}

int run(const RunConfig& cfg) {
    if (cfg.inputs.empty()) throw Error("cli", "--input is required");
    if (cfg.inputs.size() > 1 && (!cfg.parses.empty() || !cfg.sidecar.empty())) {
        throw Error("cli", "--parses and --sidecar describe one document; use a single --input");
    }
    for (double r : cfg.ratios) validate_ratio(r);

    const fs::path out_dir = cfg.out_dir;
    StagedWriter writer;
    std::vector<std::unique_ptr<StagedWriter>> batch_writers;
    nlohmann::json documents = nlohmann::json::array();
    if (cfg.inputs.size() == 1) {
        documents.push_back(run_document(cfg, cfg.inputs[0], out_dir, writer));
    } else {
        // Documents are independent; each gets its own output directory.
        std::vector<std::future<std::pair<nlohmann::json, std::unique_ptr<StagedWriter>>>> jobs;
        for (const auto& input : cfg.inputs) {
            jobs.push_back(std::async(std::launch::async, [&cfg, input, &out_dir] {
                auto local = std::make_unique<StagedWriter>();
                auto rec = run_document(cfg, input, out_dir / fs::path(input).stem(), *local);
                return std::make_pair(std::move(rec), std::move(local));
            }));
        }
        std::vector<std::unique_ptr<StagedWriter>> writers;
        std::exception_ptr first_error;
        for (auto& job : jobs) {
            try {
                auto [rec, local] = job.get();
                documents.push_back(std::move(rec));
                writers.push_back(std::move(local));
            } catch (...) {
                if (!first_error) first_error = std::current_exception();
            }
        }
        if (first_error) std::rethrow_exception(first_error);
        batch_writers = std::move(writers);
    }

    nlohmann::json report = cfg.inputs.size() == 1 ? documents[0] : nlohmann::json{{"documents", documents}};
    fs::path report_path = cfg.report.empty() ? out_dir / "report.json" : fs::path(cfg.report);
    writer.add(report_path, report.dump(2) + "\n");
    for (auto& w : batch_writers) w->commit();
    writer.commit();
    return 0;
}

int run_bench(const std::vector<std::string>& sizes, int runs, const std::string& variant, double a1, double a2) {
    PipelineOptions opts;
    opts.variant = parse_variant(variant);
    opts.params = {a1, a2};
    std::printf("%6s %6s %8s %10s %10s %10s %10s %10s %10s %10s\n", "m", "n", "C(V)", "segment", "parse", "score",
                "align", "adjust", "solve", "total");
    for (const auto& size : sizes) {
        auto x = size.find('x');
        if (x == std::string::npos) throw Error("cli", "bench sizes look like <m>x<n>, got '" + size + "'");
        std::size_t m = std::stoul(size.substr(0, x));
        std::size_t n = std::stoul(size.substr(x + 1));
        auto row = bench_size(m, n, opts, runs);
        std::printf("%6zu %6zu %8lld %10.6f %10.6f %10.6f %10.6f %10.6f %10.6f %10.6f\n", m, n,
                    static_cast<long long>(row.total_length), row.segment, row.parse, row.score, row.align,
                    row.adjust, row.solve, row.total);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Selective prompt compression by parse-tree pruning"};
    app.set_config("--config", "", "TOML/INI file with default flag values");
    RunConfig cfg;
    app.add_option("--input", cfg.inputs, "Document(s): UTF-8 text, or .json pre-segmented records");
    app.add_option("--parses", cfg.parses, "CoNLL-U parses, one block per sentence");
    app.add_option("--entropy", cfg.entropy, "Entropy provider")->check(CLI::IsMember({"ngram", "sidecar", "remote"}));
    app.add_option("--sidecar", cfg.sidecar, "Entropy sidecar (sentence_index, token, entropy)");
    app.add_option("--endpoint", cfg.endpoint, "Remote scorer URL (bearer token from $TREEPROMPT_SCORER_TOKEN)");
    app.add_option("--ngram-corpus", cfg.ngram_corpus, "Training corpus for the n-gram scorer (default: the input)");
    app.add_option("--ratio", cfg.ratios, "Compression ratios in (0,1)")->delimiter(',');
    app.add_option("--a1", cfg.a1, "Leaf-ward exponent");
    app.add_option("--a2", cfg.a2, "First-child multiplier");
    app.add_option("--variant", cfg.variant, "Selection mode")
        ->check(CLI::IsMember({"full", "no-adjust", "local", "flat", "parse-only", "parse-only-local"}));
    app.add_flag("--no-adjust", cfg.no_adjust, "Skip node value adjustment");
    app.add_option("--eval-against", cfg.eval_against, "original | file:<path>");
    app.add_option("--dump-tree", cfg.dump_tree, "Write the global tree (indented text, or DOT for *.dot)");
    app.add_option("--out-dir", cfg.out_dir, "Directory for compressed outputs");
    app.add_option("--report", cfg.report, "Report path (default <out-dir>/report.json)");
    app.add_flag("--unsafe-params", cfg.unsafe_params, "Allow a1/a2 outside their typical ranges");
    app.add_option("--threads", cfg.threads, "Scoring threads (0 = all cores)");

    auto* bench = app.add_subcommand("bench", "Time each pipeline stage on synthetic documents");
    std::vector<std::string> sizes{"8x20", "16x20", "32x20"};
    int runs = 5;
    bench->add_option("--sizes", sizes, "Sizes as <sentences>x<tokens>")->delimiter(',');
    bench->add_option("--runs", runs, "Runs per size (median reported)");
    app.require_subcommand(0, 1);

    CLI11_PARSE(app, argc, argv);

    try {
        if (bench->parsed()) return run_bench(sizes, runs, cfg.variant, cfg.a1, cfg.a2);
        return run(cfg);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
