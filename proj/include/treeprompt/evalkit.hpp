// Copyright (C) 2026 The treeprompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "treeprompt/compress.hpp"
#include "treeprompt/error.hpp"
#include "treeprompt/global_tree.hpp"

namespace treeprompt {

struct BleuScore {
    std::array<double, 4> precisions{};  // percent
    double bleu = 0.0;                   // percent
    double brevity_penalty = 0.0;
};

struct RougeScore {
    double rouge1 = 0.0;
    double rouge2 = 0.0;
    double rougeL = 0.0;
};

struct MetricReport {
    BleuScore bleu;
    RougeScore rouge;
    std::int64_t tokens = 0;
    double inv_ratio = 0.0;
};

/// Lowercased (ASCII) whitespace tokens.
inline std::vector<std::string> metric_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f' || ch == '\v') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(ch >= 'A' && ch <= 'Z' ? static_cast<char>(ch - 'A' + 'a') : ch);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

namespace detail {

using NGramBag = std::map<std::vector<std::string>, std::int64_t>;

inline NGramBag ngram_bag(const std::vector<std::string>& toks, std::size_t n) {
    NGramBag bag;
    for (std::size_t i = 0; i + n <= toks.size(); ++i) {
        ++bag[std::vector<std::string>(toks.begin() + static_cast<std::ptrdiff_t>(i),
                                       toks.begin() + static_cast<std::ptrdiff_t>(i + n))];
    }
    return bag;
}

inline std::int64_t clipped_overlap(const NGramBag& hyp, const NGramBag& ref) {
    std::int64_t n = 0;
    for (const auto& [gram, count] : hyp) {
        auto it = ref.find(gram);
        if (it != ref.end()) n += std::min(count, it->second);
    }
    return n;
}

inline double f1(double overlap, double hyp_total, double ref_total) {
    if (overlap <= 0.0 || hyp_total <= 0.0 || ref_total <= 0.0) return 0.0;
    double p = overlap / hyp_total;
    double r = overlap / ref_total;
    return 2.0 * p * r / (p + r);
}

inline std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::size_t> row(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = 0;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t up = row[j];
            row[j] = a[i - 1] == b[j - 1] ? diag + 1 : std::max(row[j], row[j - 1]);
            diag = up;
        }
    }
    return row[b.size()];
}

}  // namespace detail

/// Clipped 1-4 gram precisions and the composite BLEU (brevity penalty times
/// the geometric mean of the precisions). A precision with no matches is
/// replaced by 1e-9. Orders longer than the hypothesis contribute no n-grams
/// at all; they are left out of the geometric mean and reported as 100 only
/// when the reference has no n-grams of that order either.
inline BleuScore bleu(std::string_view hypothesis, std::string_view reference) {
    constexpr double kEpsilon = 1e-9;
    const auto hyp = metric_tokens(hypothesis);
    const auto ref = metric_tokens(reference);
    if (ref.empty()) throw Error("evalkit", "empty reference");
    BleuScore out;
    if (hyp.empty()) return out;

    double log_sum = 0.0;
    std::size_t orders = 0;
    for (std::size_t n = 1; n <= 4; ++n) {
        if (hyp.size() < n) {
            out.precisions[n - 1] = ref.size() < n ? 100.0 : 0.0;
            continue;
        }
        auto hyp_bag = detail::ngram_bag(hyp, n);
        auto ref_bag = detail::ngram_bag(ref, n);
        double matches = static_cast<double>(detail::clipped_overlap(hyp_bag, ref_bag));
        double total = static_cast<double>(hyp.size() - n + 1);
        double p = matches > 0.0 ? matches / total : kEpsilon;
        out.precisions[n - 1] = 100.0 * (matches / total);
        log_sum += std::log(p);
        ++orders;
    }
    const double c = static_cast<double>(hyp.size());
    const double r = static_cast<double>(ref.size());
    out.brevity_penalty = c > r ? 1.0 : std::exp(1.0 - r / c);
    out.bleu = 100.0 * out.brevity_penalty * std::exp(log_sum / static_cast<double>(orders));
    return out;
}

/// ROUGE-1/2 (clipped n-gram overlap F1) and ROUGE-L (LCS F1), in percent.
inline RougeScore rouge(std::string_view hypothesis, std::string_view reference) {
    const auto hyp = metric_tokens(hypothesis);
    const auto ref = metric_tokens(reference);
    if (ref.empty()) throw Error("evalkit", "empty reference");
    RougeScore out;
    for (std::size_t n : {1u, 2u}) {
        double overlap = static_cast<double>(detail::clipped_overlap(detail::ngram_bag(hyp, n), detail::ngram_bag(ref, n)));
        double hyp_total = hyp.size() >= n ? static_cast<double>(hyp.size() - n + 1) : 0.0;
        double ref_total = ref.size() >= n ? static_cast<double>(ref.size() - n + 1) : 0.0;
        (n == 1 ? out.rouge1 : out.rouge2) = 100.0 * detail::f1(overlap, hyp_total, ref_total);
    }
    out.rougeL = 100.0 * detail::f1(static_cast<double>(detail::lcs_length(hyp, ref)), static_cast<double>(hyp.size()),
                                    static_cast<double>(ref.size()));
    return out;
}

struct CompressionStats {
    std::int64_t tokens = 0;
    double inv_ratio = 0.0;
};

inline CompressionStats compression_stats(const CompressionResult& result, const GlobalTree& tree) {
    if (result.realized_length <= 0) throw Error("evalkit", "zero-length compression has no inverse ratio");
    return {result.realized_length,
            static_cast<double>(tree.total_length()) / static_cast<double>(result.realized_length)};
}

inline MetricReport evaluate(const CompressionResult& result, const GlobalTree& tree, std::string_view reference) {
    MetricReport m;
    m.bleu = bleu(result.compressed_text, reference);
    m.rouge = rouge(result.compressed_text, reference);
    m.tokens = result.realized_length;
    if (result.realized_length > 0) m.inv_ratio = compression_stats(result, tree).inv_ratio;
    return m;
}

}  // namespace treeprompt
