// Copyright (C) 2026 The treeprompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "treeprompt/error.hpp"
#include "treeprompt/global_tree.hpp"

namespace treeprompt {

template <class Value>
struct MergedSolution {
    std::vector<Value> value;
    /// split[l]: budget handed to the left operand at total budget l; the
    /// right operand receives l - split[l].
    std::vector<std::int32_t> split;
};

/// Max-plus convolution of two budget-indexed solution lists of disjoint
/// sibling subtrees: S_l = max_j (Q_j + P_{l-j}) for l = 0..|Q|+|P|-2.
/// Ties go to the smallest j.
template <class Value>
MergedSolution<Value> merge_solutions(std::span<const Value> q, std::span<const Value> p) {
    MergedSolution<Value> out;
    if (q.empty() || p.empty()) return out;
    const std::size_t size = q.size() + p.size() - 1;
    out.value.resize(size);
    out.split.resize(size);
    const std::size_t p_last = p.size() - 1;
    for (std::size_t l = 0; l < size; ++l) {
        std::size_t lo = l > p_last ? l - p_last : 0;
        std::size_t hi = std::min(l, q.size() - 1);
        Value best = q[lo] + p[l - lo];
        std::size_t best_j = lo;
        for (std::size_t j = lo + 1; j <= hi; ++j) {
            Value cand = q[j] + p[l - j];
            if (cand > best) {
                best = cand;
                best_j = j;
            }
        }
        out.value[l] = best;
        out.split[l] = static_cast<std::int32_t>(best_j);
    }
    return out;
}

template <class Value>
MergedSolution<Value> merge_solutions(const std::vector<Value>& q, const std::vector<Value>& p) {
    return merge_solutions(std::span<const Value>(q), std::span<const Value>(p));
}

/// Exact tree knapsack over the subtree rooted at `scope`: for every integer
/// budget l = 0..C(subtree) the maximum total value of a parent-closed node
/// set of length <= l. A node is only ever kept together with its parent, so
/// descendants cannot survive without their ancestors.
///
/// Instead of materializing the optimal node set per budget, each node keeps
/// one include flag per budget and one split vector per child merge; the set
/// for any budget is rebuilt on demand by walking those backpointers.
template <class Value = double>
class TreeKnapsack {
public:
    TreeKnapsack(const GlobalTree& tree, std::span<const Value> values, std::span<const std::int64_t> lengths,
                 NodeId scope = kNoNode)
        : tree_(&tree), lengths_(lengths.begin(), lengths.end()) {
        if (values.size() != tree.size() || lengths.size() != tree.size()) {
            throw Error("pruner", "value/length arrays must cover every node");
        }
        scope_ = scope == kNoNode ? tree.root : scope;
        if (scope_ >= tree.size()) throw Error("pruner", "unknown scope node");
        tables_.resize(tree.size());
        solve(values);
    }

    NodeId scope() const noexcept { return scope_; }

    /// Q_{l,1} for l = 0..max_budget().
    const std::vector<Value>& values() const noexcept { return root_values_; }
    std::int64_t max_budget() const noexcept { return static_cast<std::int64_t>(root_values_.size()) - 1; }

    Value value_at(std::int64_t budget) const {
        if (budget < 0) throw Error("pruner", "negative budget");
        return root_values_[static_cast<std::size_t>(std::min(budget, max_budget()))];
    }

    /// Q_{l,2}: the optimal retained node set at `budget`, ascending ids.
    std::vector<NodeId> retained(std::int64_t budget) const {
        if (budget < 0) throw Error("pruner", "negative budget");
        std::vector<NodeId> out;
        std::vector<std::pair<NodeId, std::int64_t>> stack{{scope_, std::min(budget, max_budget())}};
        while (!stack.empty()) {
            auto [v, b] = stack.back();
            stack.pop_back();
            const auto& table = tables_[v];
            if (!table.include[static_cast<std::size_t>(b)]) continue;
            out.push_back(v);
            b -= lengths_[v];
            const auto& children = tree_->nodes[v].children;
            for (std::size_t k = children.size(); k-- > 1;) {
                std::int64_t to_child = table.splits[k][static_cast<std::size_t>(b)];
                stack.push_back({children[k], to_child});
                b -= to_child;
            }
            if (!children.empty()) stack.push_back({children[0], b});
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    struct NodeTable {
        std::vector<char> include;
        std::vector<std::vector<std::int32_t>> splits;  // budget given to child k; splits[0] unused
    };

    void solve(std::span<const Value> values) {
        const auto scope_nodes = subtree_nodes(*tree_, scope_);
        std::vector<std::vector<Value>> lists(tree_->size());
        for (auto it = scope_nodes.rbegin(); it != scope_nodes.rend(); ++it) {
            const NodeId v = *it;
            const auto& children = tree_->nodes[v].children;
            auto& table = tables_[v];
            std::vector<Value> acc{Value{}};
            table.splits.resize(children.size());
            for (std::size_t k = 0; k < children.size(); ++k) {
                auto& child = lists[children[k]];
                if (k == 0) {
                    acc = std::move(child);
                } else {
                    // The later sibling is the left operand, so ties hand it
                    // the smaller budget and earlier siblings win.
                    auto merged = merge_solutions(std::span<const Value>(child), std::span<const Value>(acc));
                    acc = std::move(merged.value);
                    table.splits[k] = std::move(merged.split);
                }
                std::vector<Value>().swap(child);
            }
            const std::int64_t c = lengths_[v];
            if (c < 0) throw Error("pruner", "negative node length");
            const std::size_t size = acc.size() + static_cast<std::size_t>(c);
            if (size > static_cast<std::size_t>(INT32_MAX)) throw Error("pruner", "subtree length exceeds 2^31");
            std::vector<Value> out(size, Value{});
            table.include.assign(size, 0);
            for (std::size_t l = static_cast<std::size_t>(c); l < size; ++l) {
                Value with = values[v] + acc[l - static_cast<std::size_t>(c)];
                // At equal value the node (and so its subtree) is left out.
                if (with > Value{}) {
                    out[l] = with;
                    table.include[l] = 1;
                }
            }
            lists[v] = std::move(out);
        }
        root_values_ = std::move(lists[scope_]);
    }

    const GlobalTree* tree_;
    std::vector<std::int64_t> lengths_;
    NodeId scope_ = kNoNode;
    std::vector<NodeTable> tables_;
    std::vector<Value> root_values_;
};

}  // namespace treeprompt
