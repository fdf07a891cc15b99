// Copyright (C) 2026 The treeprompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "treeprompt/error.hpp"
#include "treeprompt/scoring.hpp"
#include "treeprompt/segmenter.hpp"
#include "treeprompt/tokenize.hpp"

namespace treeprompt {

struct NGramOptions {
    /// Additive smoothing constant; 0 disables smoothing.
    double add_k = 1.0;
    /// Reserve one vocabulary slot for unseen words.
    bool oov_slot = true;
    /// Interpolation weights for trigram, bigram, unigram estimates.
    std::array<double, 3> weights{0.5, 0.3, 0.2};
};

/// Unigram/bigram/trigram counts over sentence-bounded token streams. Each
/// sentence is padded with two begin-of-sentence markers so that context
/// never crosses a sentence boundary.
class NGramCounts {
public:
    using WordId = std::uint32_t;
    static constexpr WordId kBos = 0;
    static constexpr WordId kUnknown = 0xFFFFFFFFu;

    NGramCounts() { names_.push_back("<s>"); }

    void add_sentence(const std::vector<std::string>& words) {
        WordId h2 = kBos;
        WordId h1 = kBos;
        for (const auto& w : words) {
            WordId id = intern(w);
            ++unigram_[id];
            ++total_;
            ++bigram_[key(h1, id)];
            ++bigram_context_[h1];
            ++trigram_[key(h2, h1, id)];
            ++trigram_context_[key(h2, h1)];
            h2 = h1;
            h1 = id;
        }
    }

    WordId lookup(const std::string& w) const {
        auto it = ids_.find(w);
        return it == ids_.end() ? kUnknown : it->second;
    }

    /// Number of distinct word types (the sentence marker is not a type).
    std::size_t vocabulary_size() const { return ids_.size(); }
    std::uint64_t total_tokens() const { return total_; }

    std::uint64_t unigram(WordId w) const { return find(unigram_, w); }
    std::uint64_t bigram(WordId h1, WordId w) const { return find(bigram_, key(h1, w)); }
    std::uint64_t trigram(WordId h2, WordId h1, WordId w) const { return find(trigram_, key(h2, h1, w)); }
    std::uint64_t bigram_context(WordId h1) const { return find(bigram_context_, h1); }
    std::uint64_t trigram_context(WordId h2, WordId h1) const { return find(trigram_context_, key(h2, h1)); }

    std::uint64_t bigram(const std::string& a, const std::string& b) const {
        auto ia = lookup(a);
        auto ib = lookup(b);
        return ia == kUnknown || ib == kUnknown ? 0 : bigram(ia, ib);
    }

private:
    static constexpr unsigned kBits = 21;

    WordId intern(const std::string& w) {
        auto [it, inserted] = ids_.try_emplace(w, static_cast<WordId>(names_.size()));
        if (inserted) {
            if (names_.size() >= (1u << kBits) - 1) throw Error("scoring", "n-gram vocabulary exceeds 2^21 types");
            names_.push_back(w);
        }
        return it->second;
    }
    // Unknown words never enter n-gram tables, so packing only sees real ids.
    static std::uint64_t key(WordId a, WordId b) { return (std::uint64_t{a} << kBits) | b; }
    static std::uint64_t key(WordId a, WordId b, WordId c) {
        return (std::uint64_t{a} << (2 * kBits)) | (std::uint64_t{b} << kBits) | c;
    }
    template <class Map, class Key>
    static std::uint64_t find(const Map& map, Key k) {
        auto it = map.find(k);
        return it == map.end() ? 0 : it->second;
    }

    std::unordered_map<std::string, WordId> ids_;
    std::vector<std::string> names_;
    std::unordered_map<WordId, std::uint64_t> unigram_;
    std::unordered_map<std::uint64_t, std::uint64_t> bigram_;
    std::unordered_map<WordId, std::uint64_t> bigram_context_;
    std::unordered_map<std::uint64_t, std::uint64_t> trigram_;
    std::unordered_map<std::uint64_t, std::uint64_t> trigram_context_;
    std::uint64_t total_ = 0;
};

/// Counts n-grams over `corpus`, segmented into sentences with the default
/// segmenter and tokenized with tokenize_words.
inline NGramCounts train_ngram(std::string_view corpus) {
    NGramCounts counts;
    for (const auto& s : segment(corpus).sentences) {
        auto words = tokenize_word_strings(s.text);
        if (!words.empty()) counts.add_sentence(words);
    }
    if (counts.total_tokens() == 0) throw Error("scoring", "cannot train an n-gram model on an empty corpus");
    return counts;
}

/// -ln p(w | h2, h1) under interpolated add-k trigram/bigram/unigram
/// estimates. A history never seen in training falls back to the next lower
/// order estimate.
inline double ngram_entropy(const NGramCounts& counts, NGramCounts::WordId h2, NGramCounts::WordId h1,
                            NGramCounts::WordId w, const NGramOptions& opts) {
    const double k = opts.add_k;
    const double vocab = static_cast<double>(counts.vocabulary_size() + (opts.oov_slot ? 1 : 0));
    const bool unknown = w == NGramCounts::kUnknown;

    double p1 = (static_cast<double>(unknown ? 0 : counts.unigram(w)) + k) /
                (static_cast<double>(counts.total_tokens()) + k * vocab);

    double p2 = p1;
    bool h1_known = h1 != NGramCounts::kUnknown;
    if (h1_known) {
        if (auto ctx = counts.bigram_context(h1); ctx > 0) {
            p2 = (static_cast<double>(unknown ? 0 : counts.bigram(h1, w)) + k) / (static_cast<double>(ctx) + k * vocab);
        }
    }
    double p3 = p2;
    if (h1_known && h2 != NGramCounts::kUnknown) {
        if (auto ctx = counts.trigram_context(h2, h1); ctx > 0) {
            p3 = (static_cast<double>(unknown ? 0 : counts.trigram(h2, h1, w)) + k) /
                 (static_cast<double>(ctx) + k * vocab);
        }
    }
    const double p = opts.weights[0] * p3 + opts.weights[1] * p2 + opts.weights[2] * p1;
    if (!(p > 0.0)) return HUGE_VAL;
    return std::max(0.0, -std::log(p));
}

inline ScoredSentence ngram_score(std::string_view sentence, const NGramCounts& counts, const NGramOptions& opts = {},
                                  std::size_t sentence_index = 0) {
    const auto text = utf8::decode(sentence);
    ScoredSentence out;
    NGramCounts::WordId h2 = NGramCounts::kBos;
    NGramCounts::WordId h1 = NGramCounts::kBos;
    for (const auto& span : tokenize_words(text)) {
        ScoredToken tok;
        tok.text = utf8::substr(text, span);
        tok.span = span;
        auto w = counts.lookup(tok.text);
        tok.entropy = ngram_entropy(counts, h2, h1, w, opts);
        if (!std::isfinite(tok.entropy)) {
            throw Error("scoring", "token '" + tok.text + "' has zero probability (smoothing disabled)",
                        sentence_index);
        }
        out.push_back(std::move(tok));
        h2 = h1;
        h1 = w;
    }
    return out;
}

class NGramProvider final : public EntropyProvider {
public:
    explicit NGramProvider(NGramCounts counts, NGramOptions opts = {}) : counts_(std::move(counts)), opts_(opts) {}

    ScoredSentence score_sentence(std::string_view sentence, std::size_t sentence_index) const override {
        return ngram_score(sentence, counts_, opts_, sentence_index);
    }

    const NGramCounts& counts() const noexcept { return counts_; }

private:
    NGramCounts counts_;
    NGramOptions opts_;
};

}  // namespace treeprompt
