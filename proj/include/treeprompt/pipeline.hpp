// Copyright (C) 2026 The treeprompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "treeprompt/adjustment.hpp"
#include "treeprompt/compress.hpp"
#include "treeprompt/error.hpp"
#include "treeprompt/global_tree.hpp"
#include "treeprompt/parse_ingest.hpp"
#include "treeprompt/scoring.hpp"
#include "treeprompt/segmenter.hpp"
#include "treeprompt/tokenize.hpp"

namespace treeprompt {

struct PipelineOptions {
    std::vector<double> ratios{0.5};
    Variant variant = Variant::Full;
    AdjustmentParams params;
    bool unsafe_params = false;
    unsigned scoring_threads = 0;  // 0 = hardware concurrency
};

struct StageTimings {
    double parse = 0.0;
    double score = 0.0;
    double build = 0.0;
    double align = 0.0;
    double adjust = 0.0;
    double solve = 0.0;
    double reconstruct = 0.0;
};

struct PipelineResult {
    SegmentedDocument doc;
    GlobalTree tree;
    std::vector<CompressionResult> results;
    std::vector<std::string> warnings;
    StageTimings timings;
};

/// Removes sentences without a single token (they would become empty local
/// trees) and re-numbers the rest. Returns one warning per dropped sentence.
inline std::vector<std::string> drop_empty_sentences(SegmentedDocument& doc) {
    std::vector<std::string> warnings;
    std::vector<SentenceRecord> kept;
    for (auto& s : doc.sentences) {
        if (tokenize_words(utf8::decode(s.text)).empty()) {
            warnings.push_back("parse_ingest [sentence " + std::to_string(s.index) +
                               "]: empty sentence dropped");
            continue;
        }
        s.index = kept.size();
        kept.push_back(std::move(s));
    }
    doc.sentences = std::move(kept);
    return warnings;
}

namespace detail {

class Stopwatch {
public:
    double lap() {
        auto now = std::chrono::steady_clock::now();
        double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace detail

/// segment -> parse -> score -> build tree -> align -> adjust -> prune.
/// `doc` must already be segmented. When `conllu` is given it supplies the
/// local parse trees; otherwise the flat fallback parser is used and
/// token-less sentences are dropped with a warning.
inline PipelineResult run_pipeline(SegmentedDocument doc, const EntropyProvider& provider,
                                   const std::optional<std::string>& conllu, const PipelineOptions& opts) {
    if (opts.ratios.empty()) throw Error("cli", "at least one compression ratio is required");
    for (double r : opts.ratios) validate_ratio(r);
    const auto plan = select_variant(opts.variant);
    if (plan.adjust) opts.params.validate(opts.unsafe_params);

    PipelineResult out;
    detail::Stopwatch clock;

    std::vector<LocalParseTree> parses;
    if (conllu) {
        validate(doc);
        parses = read_conllu(*conllu, doc);
    } else {
        out.warnings = drop_empty_sentences(doc);
        parses.reserve(doc.sentences.size());
        for (const auto& s : doc.sentences) parses.push_back(fallback_parse(s));
    }
    out.timings.parse = clock.lap();

    auto scored = score_document(provider, doc, opts.scoring_threads);
    out.timings.score = clock.lap();

    out.tree = build_global_tree(doc, parses, plan.shape);
    out.timings.build = clock.lap();

    apply_alignment(out.tree, parses, scored);
    out.timings.align = clock.lap();

    if (plan.adjust) {
        adjust(out.tree, opts.params);
    } else {
        skip_adjustment(out.tree);
    }
    out.timings.adjust = clock.lap();

    Compressor compressor(out.tree, {plan.unit_values, plan.per_sentence});
    out.timings.solve = clock.lap();

    out.results = compressor.compress(opts.ratios);
    for (const auto& r : out.results) {
        if (r.warning) out.warnings.push_back("pruner: " + *r.warning);
    }
    out.timings.reconstruct = clock.lap();
    out.doc = std::move(doc);
    return out;
}

}  // namespace treeprompt
