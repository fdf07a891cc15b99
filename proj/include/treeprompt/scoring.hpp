// Copyright (C) 2026 The treeprompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "treeprompt/error.hpp"
#include "treeprompt/global_tree.hpp"
#include "treeprompt/parse_ingest.hpp"
#include "treeprompt/segmenter.hpp"
#include "treeprompt/utf8.hpp"

namespace treeprompt {

/// One scorer-tokenizer piece with its surprisal in nats.
struct ScoredToken {
    std::string text;
    utf8::Span span;  // into the sentence text
    double entropy = 0.0;

    friend bool operator==(const ScoredToken&, const ScoredToken&) = default;
};

using ScoredSentence = std::vector<ScoredToken>;

/// Source of per-token entropies. Implementations see exactly one sentence
/// per call; nothing from the rest of the document is available to them.
class EntropyProvider {
public:
    virtual ~EntropyProvider() = default;
    virtual ScoredSentence score_sentence(std::string_view sentence, std::size_t sentence_index) const = 0;
    /// False if score_sentence must not be called from several threads.
    virtual bool concurrent() const { return true; }
};

/// Rejects overlapping/out-of-order spans, spans whose text disagrees with
/// the sentence, and negative or non-finite entropies.
inline void validate_scored(const ScoredSentence& tokens, std::u32string_view sentence, std::size_t sentence_index,
                            std::string_view module = "scoring") {
    std::size_t prev_end = 0;
    for (std::size_t k = 0; k < tokens.size(); ++k) {
        const auto& t = tokens[k];
        if (!std::isfinite(t.entropy) || t.entropy < 0.0) {
            throw Error(std::string(module), "token '" + t.text + "' has invalid entropy " + std::to_string(t.entropy),
                        sentence_index);
        }
        if (t.span.start >= t.span.end || t.span.end > sentence.size()) {
            throw Error(std::string(module), "span mismatch: token '" + t.text + "' has an empty or out-of-range span",
                        sentence_index);
        }
        if (k > 0 && t.span.start < prev_end) {
            throw Error(std::string(module), "span mismatch: token '" + t.text + "' overlaps its predecessor",
                        sentence_index);
        }
        if (utf8::substr(sentence, t.span) != t.text) {
            throw Error(std::string(module), "span mismatch: token '" + t.text + "' does not match the sentence text",
                        sentence_index);
        }
        prev_end = t.span.end;
    }
}

/// Per-sentence scoring with bounded parallelism; results keep sentence order.
/// The first failure (lowest sentence index) is rethrown.
inline std::vector<ScoredSentence> score_document(const EntropyProvider& provider, const SegmentedDocument& doc,
                                                  unsigned max_threads = 0) {
    const std::size_t m = doc.sentences.size();
    std::vector<ScoredSentence> out(m);
    std::vector<std::exception_ptr> errors(m);
    if (max_threads == 0) max_threads = std::max(1u, std::thread::hardware_concurrency());
    unsigned threads = provider.concurrent() ? static_cast<unsigned>(std::min<std::size_t>(max_threads, m)) : 1u;

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t j = next++; j < m; j = next++) {
            try {
                out[j] = provider.score_sentence(doc.sentences[j].text, j);
            } catch (...) {
                errors[j] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

struct AlignedToken {
    double e_aligned = 0.0;
    std::int64_t length = 0;

    friend bool operator==(const AlignedToken&, const AlignedToken&) = default;
};

/// Maps scorer tokens onto parse tokens.
///
/// Each scorer token belongs to the parse token containing its first
/// character, which accumulates its entropy and counts it once toward C.
/// A parse token that receives no scorer token because a longer scorer token
/// runs across it gets C = 1 and a character-proportional share of that
/// token's entropy; the owner keeps the remainder. Entropy is conserved.
inline std::vector<AlignedToken> align(const LocalParseTree& parse, const ScoredSentence& scored) {
    const std::size_t n = parse.tokens.size();
    const auto sentence = parse.sentence_index;
    std::vector<AlignedToken> out(n);
    std::vector<std::size_t> owner(scored.size());

    for (std::size_t k = 0; k < scored.size(); ++k) {
        const auto start = scored[k].span.start;
        auto it = std::upper_bound(parse.tokens.begin(), parse.tokens.end(), start,
                                   [](std::size_t s, const ParseToken& t) { return s < t.span.start; });
        if (it == parse.tokens.begin() || !std::prev(it)->span.contains(start)) {
            throw Error("scoring",
                        "disjoint span coverage: scorer token '" + scored[k].text +
                            "' does not start inside any parse token (tokenizers saw different text?)",
                        sentence);
        }
        owner[k] = static_cast<std::size_t>(std::prev(it) - parse.tokens.begin());
        out[owner[k]].length += 1;
    }

    std::vector<bool> assigned(n, false);
    for (auto p : owner) assigned[p] = true;

    for (std::size_t k = 0; k < scored.size(); ++k) {
        const auto& tok = scored[k];
        double shared = 0.0;
        for (std::size_t q = owner[k] + 1; q < n && parse.tokens[q].span.start < tok.span.end; ++q) {
            if (assigned[q]) continue;
            auto overlap = parse.tokens[q].span.overlap(tok.span);
            if (overlap == 0) continue;
            double share = tok.entropy * static_cast<double>(overlap) / static_cast<double>(tok.span.size());
            out[q].e_aligned += share;
            out[q].length = 1;
            shared += share;
        }
        out[owner[k]].e_aligned += tok.entropy - shared;
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (out[i].length == 0) {
            throw Error("scoring",
                        "disjoint span coverage: parse token '" + parse.tokens[i].text + "' received no scorer token",
                        sentence);
        }
    }
    return out;
}

/// Writes aligned (e_aligned, length) onto the actual nodes of `tree`.
inline void apply_alignment(GlobalTree& tree, const std::vector<LocalParseTree>& parses,
                            const std::vector<ScoredSentence>& scored) {
    if (scored.size() != parses.size()) throw Error("scoring", "scored/parse sentence count mismatch");
    for (std::size_t j = 0; j < parses.size(); ++j) {
        auto aligned = align(parses[j], scored[j]);
        for (std::size_t i = 0; i < aligned.size(); ++i) {
            auto& node = tree.nodes[tree.token_nodes[j][i]];
            node.e_aligned = aligned[i].e_aligned;
            node.length = aligned[i].length;
            node.e_adjusted = node.e_aligned;
        }
    }
}

}  // namespace treeprompt
