// Copyright (C) 2026 The treeprompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "treeprompt/error.hpp"
#include "treeprompt/global_tree.hpp"
#include "treeprompt/pruner.hpp"
#include "treeprompt/utf8.hpp"

namespace treeprompt {

/// Selection modes, mirroring the ablation chain:
///   full            hierarchical tree, adjusted values
///   no-adjust       local trees under one virtual root, aligned values
///   local           each sentence pruned on its own, budgets proportional to length
///   flat            every token under one root: plain 0/1 knapsack on aligned values
///   parse-only      no-adjust with every token worth 1.0
///   parse-only-local local with every token worth 1.0
enum class Variant { Full, NoAdjust, Local, Flat, ParseOnly, ParseOnlyLocal };

struct VariantPlan {
    TreeShape shape = TreeShape::Hierarchical;
    bool adjust = true;
    bool unit_values = false;
    bool per_sentence = false;
};

inline VariantPlan select_variant(Variant v) {
    switch (v) {
        case Variant::Full: return {TreeShape::Hierarchical, true, false, false};
        case Variant::NoAdjust: return {TreeShape::SingleRoot, false, false, false};
        case Variant::Local: return {TreeShape::Hierarchical, false, false, true};
        case Variant::Flat: return {TreeShape::Flat, false, false, false};
        case Variant::ParseOnly: return {TreeShape::SingleRoot, false, true, false};
        case Variant::ParseOnlyLocal: return {TreeShape::Hierarchical, false, true, true};
    }
    throw Error("pruner", "unknown variant");
}

inline Variant parse_variant(std::string_view name) {
    if (name == "full") return Variant::Full;
    if (name == "no-adjust") return Variant::NoAdjust;
    if (name == "local") return Variant::Local;
    if (name == "flat") return Variant::Flat;
    if (name == "parse-only") return Variant::ParseOnly;
    if (name == "parse-only-local") return Variant::ParseOnlyLocal;
    throw Error("pruner", "unknown variant '" + std::string(name) + "'");
}

inline std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::Full: return "full";
        case Variant::NoAdjust: return "no-adjust";
        case Variant::Local: return "local";
        case Variant::Flat: return "flat";
        case Variant::ParseOnly: return "parse-only";
        case Variant::ParseOnlyLocal: return "parse-only-local";
    }
    return "?";
}

/// floor(ratio * total). Products within 1e-9 (relative) of an integer are
/// treated as that integer so that decimal ratios such as 0.29 * 100 give 29.
inline std::int64_t budget_for(double ratio, std::int64_t total) {
    double x = ratio * static_cast<double>(total);
    return static_cast<std::int64_t>(std::floor(x + 1e-9 * std::max(1.0, x)));
}

inline void validate_ratio(double ratio) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw Error("pruner", "compression ratio " + std::to_string(ratio) + " outside (0, 1)");
    }
}

struct CompressionResult {
    double ratio = 0.0;
    std::int64_t budget = 0;
    std::vector<NodeId> retained;         // all retained nodes, ascending
    std::vector<NodeId> retained_tokens;  // retained actual nodes, document order
    std::int64_t realized_length = 0;
    double realized_ratio = 0.0;
    double objective_value = 0.0;
    std::string compressed_text;
    std::optional<std::string> warning;
};

namespace detail {

inline bool glues_to_previous(std::string_view token) {
    static constexpr std::string_view kClosing[] = {".", ",", ";", ":", "!", "?", ")", "]", "}", "%",
                                                    "\xE2\x80\x9D", "\xE2\x80\x99", "\xC2\xBB", "..."};
    for (auto c : kClosing) {
        if (token == c) return true;
    }
    return token.starts_with('\'') || token.starts_with("\xE2\x80\x99");
}

}  // namespace detail

/// Joins retained tokens in document order: closing punctuation and
/// apostrophe-initial forms attach to the previous token, other tokens are
/// separated by one space, and paragraphs by a blank line.
inline std::string detokenize(const GlobalTree& tree, std::span<const NodeId> tokens_in_order) {
    std::string out;
    std::optional<std::size_t> prev_paragraph;
    for (NodeId id : tokens_in_order) {
        const auto& node = tree.nodes[id];
        std::size_t paragraph =
            node.sentence_index < tree.sentence_paragraph.size() ? tree.sentence_paragraph[node.sentence_index] : 0;
        if (prev_paragraph) {
            if (paragraph != *prev_paragraph) {
                out += "\n\n";
            } else if (!detail::glues_to_previous(node.token_text)) {
                out += ' ';
            }
        }
        out += node.token_text;
        prev_paragraph = paragraph;
    }
    return out;
}

struct CompressOptions {
    bool unit_values = false;
    bool per_sentence = false;
};

/// Per-node DP values: actual nodes carry e_adjusted (or 1.0 in unit mode),
/// virtual nodes are free connectors worth 0.
inline std::vector<double> dp_values(const GlobalTree& tree, bool unit_values) {
    std::vector<double> values(tree.size(), 0.0);
    for (const auto& n : tree.nodes) {
        if (!n.is_virtual()) values[n.id] = unit_values ? 1.0 : n.e_adjusted;
    }
    return values;
}

/// Solves the tree once and reads every requested ratio off the same
/// solution table, so a batch of ratios gives exactly the single-ratio
/// results.
class Compressor {
public:
    Compressor(const GlobalTree& tree, CompressOptions opts = {}) : tree_(&tree), opts_(opts) {
        auto values = dp_values(tree, opts.unit_values);
        std::vector<std::int64_t> lengths(tree.size());
        for (const auto& n : tree.nodes) lengths[n.id] = n.length;
        total_length_ = tree.total_length();
        if (!opts.per_sentence) {
            solvers_.emplace_back(tree, std::span<const double>(values), std::span<const std::int64_t>(lengths));
            return;
        }
        for (const auto& n : tree.nodes) {
            if (n.kind != NodeKind::VirtualSentence) continue;
            solvers_.emplace_back(tree, std::span<const double>(values), std::span<const std::int64_t>(lengths), n.id);
        }
        if (solvers_.empty() && tree.size() > 1) {
            throw Error("pruner", "per-sentence selection needs a tree with virtual sentence nodes");
        }
    }

    std::int64_t total_length() const noexcept { return total_length_; }

    CompressionResult compress(double ratio) const {
        validate_ratio(ratio);
        CompressionResult r;
        r.ratio = ratio;
        r.budget = budget_for(ratio, total_length_);
        for (const auto& solver : solvers_) {
            std::int64_t budget = opts_.per_sentence ? budget_for(ratio, solver.max_budget()) : r.budget;
            r.objective_value += solver.value_at(budget);
            auto kept = solver.retained(budget);
            if (opts_.per_sentence && !kept.empty()) {
                // Zero-length virtual ancestors keep the union parent-closed.
                for (NodeId p = tree_->nodes[solver.scope()].parent; p != kNoNode; p = tree_->nodes[p].parent) {
                    kept.push_back(p);
                }
            }
            r.retained.insert(r.retained.end(), kept.begin(), kept.end());
        }
        std::sort(r.retained.begin(), r.retained.end());
        r.retained.erase(std::unique(r.retained.begin(), r.retained.end()), r.retained.end());
        for (NodeId id : r.retained) r.realized_length += tree_->nodes[id].length;

        std::vector<char> kept(tree_->size(), 0);
        for (NodeId id : r.retained) kept[id] = 1;
        for (NodeId id : tree_->actual_in_document_order()) {
            if (kept[id]) r.retained_tokens.push_back(id);
        }
        r.realized_ratio =
            total_length_ == 0 ? 0.0 : static_cast<double>(r.realized_length) / static_cast<double>(total_length_);
        r.compressed_text = detokenize(*tree_, r.retained_tokens);
        if (r.budget == 0) {
            r.warning = "budget is 0 at ratio " + std::to_string(ratio) + "; compression is empty";
        }
        return r;
    }

    std::vector<CompressionResult> compress(std::span<const double> ratios) const {
        for (double ratio : ratios) validate_ratio(ratio);
        std::vector<CompressionResult> out;
        out.reserve(ratios.size());
        for (double ratio : ratios) out.push_back(compress(ratio));
        return out;
    }

private:
    const GlobalTree* tree_;
    CompressOptions opts_;
    std::int64_t total_length_ = 0;
    std::vector<TreeKnapsack<double>> solvers_;
};

inline std::vector<CompressionResult> compress(const GlobalTree& tree, std::span<const double> ratios,
                                               CompressOptions opts = {}) {
    for (double ratio : ratios) validate_ratio(ratio);
    return Compressor(tree, opts).compress(ratios);
}

}  // namespace treeprompt
