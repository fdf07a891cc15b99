// Copyright (C) 2026 The treeprompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "treeprompt/ngram.hpp"
#include "treeprompt/pipeline.hpp"

namespace treeprompt {

/// Deterministic synthetic document: m sentences of exactly n word tokens
/// each (the last being "."), four sentences per paragraph and three
/// paragraphs per `#` section.
inline std::string synthetic_document(std::size_t m, std::size_t n, std::uint32_t seed = 7) {
    static const char* kSyllables[] = {"ka", "lo", "mi", "ru", "te", "sa", "no", "vi", "de", "po",
                                       "an", "el", "ur", "is", "om", "ba", "ce", "fu", "gi", "ho"};
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> syllable(0, 19);
    std::uniform_int_distribution<int> syllable_count(1, 3);
    std::vector<std::string> vocab;
    for (int i = 0; i < 300; ++i) {
        std::string w;
        for (int k = syllable_count(rng); k > 0; --k) w += kSyllables[syllable(rng)];
        vocab.push_back(w);
    }
    std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);

    std::string out;
    for (std::size_t j = 0; j < m; ++j) {
        if (j % 12 == 0) {
            if (j > 0) out += "\n\n";
            out += "# Part " + std::to_string(j / 12 + 1) + "\n\n";
        } else if (j % 4 == 0) {
            out += "\n\n";
        } else {
            out += ' ';
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            std::string w = vocab[pick(rng)];
            if (i == 0) w[0] = static_cast<char>(w[0] - 'a' + 'A');
            if (i > 0) out += ' ';
            out += w;
        }
        out += n > 1 ? "." : "Ok.";
    }
    out += '\n';
    return out;
}

struct BenchRow {
    std::size_t sentences = 0;
    std::size_t tokens_per_sentence = 0;
    std::int64_t total_length = 0;
    double segment = 0.0;
    double parse = 0.0;
    double score = 0.0;
    double build = 0.0;
    double align = 0.0;
    double adjust = 0.0;
    double solve = 0.0;
    double reconstruct = 0.0;
    double total = 0.0;
};

namespace detail {

inline double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t k = xs.size() / 2;
    return xs.size() % 2 == 1 ? xs[k] : 0.5 * (xs[k - 1] + xs[k]);
}

}  // namespace detail

/// Median per-stage wall time over `runs` pipeline runs on a synthetic
/// document of the given size. The solve stage is re-timed in a loop of at
/// least `min_solve_seconds` per run so small trees still give stable numbers.
inline BenchRow bench_size(std::size_t m, std::size_t n, PipelineOptions opts, int runs = 5,
                           double min_solve_seconds = 0.02) {
    using clock = std::chrono::steady_clock;
    const std::string text = synthetic_document(m, n);
    std::vector<std::vector<double>> samples(9);
    BenchRow row;
    row.sentences = m;
    row.tokens_per_sentence = n;
    for (int r = 0; r < runs; ++r) {
        auto t0 = clock::now();
        auto doc = segment(text);
        double seg = std::chrono::duration<double>(clock::now() - t0).count();
        NGramProvider provider(train_ngram(text));
        auto t1 = clock::now();
        auto res = run_pipeline(doc, provider, std::nullopt, opts);
        double total = seg + std::chrono::duration<double>(clock::now() - t1).count();

        const auto plan = select_variant(opts.variant);
        int iterations = 0;
        auto s0 = clock::now();
        double elapsed = 0.0;
        do {
            Compressor c(res.tree, {plan.unit_values, plan.per_sentence});
            ++iterations;
            elapsed = std::chrono::duration<double>(clock::now() - s0).count();
        } while (elapsed < min_solve_seconds);

        samples[0].push_back(seg);
        samples[1].push_back(res.timings.parse);
        samples[2].push_back(res.timings.score);
        samples[3].push_back(res.timings.build);
        samples[4].push_back(res.timings.align);
        samples[5].push_back(res.timings.adjust);
        samples[6].push_back(elapsed / iterations);
        samples[7].push_back(res.timings.reconstruct);
        samples[8].push_back(total);
        row.total_length = res.tree.total_length();
    }
    row.segment = detail::median(samples[0]);
    row.parse = detail::median(samples[1]);
    row.score = detail::median(samples[2]);
    row.build = detail::median(samples[3]);
    row.align = detail::median(samples[4]);
    row.adjust = detail::median(samples[5]);
    row.solve = detail::median(samples[6]);
    row.reconstruct = detail::median(samples[7]);
    row.total = detail::median(samples[8]);
    return row;
}

}  // namespace treeprompt
