// Copyright (C) 2026 The treeprompt Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "test_support.hpp"
#include "treeprompt/adjustment.hpp"
#include "treeprompt/compress.hpp"
#include "treeprompt/pruner.hpp"

namespace treeprompt {
namespace {

using testing::brute_force_best;
using testing::parent_closed;
using testing::random_tree;

TEST(MergeSolutions, TwoSingletons) {
    auto s = merge_solutions(std::vector<double>{0, 5}, std::vector<double>{0, 3});
    EXPECT_EQ(s.value, (std::vector<double>{0, 5, 8}));
}

TEST(MergeSolutions, UnitListIsIdentity) {
    std::vector<double> q{0, 2, 2, 7};
    EXPECT_EQ(merge_solutions(q, std::vector<double>{0}).value, q);
    EXPECT_EQ(merge_solutions(std::vector<double>{0}, q).value, q);
}

TEST(MergeSolutions, TiesTakeSmallestSplit) {
    auto s = merge_solutions(std::vector<double>{0, 4}, std::vector<double>{0, 4});
    EXPECT_EQ(s.split[1], 0);
}

TEST(MergeSolutions, BruteForceOverSplits) {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> v(0.0, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> q(8), p(8);
        for (auto& x : q) x = v(rng);
        for (auto& x : p) x = v(rng);
        auto s = merge_solutions(q, p);
        ASSERT_EQ(s.value.size(), 15u);
        for (std::size_t l = 0; l < 15; ++l) {
            double best = -1.0;
            for (std::size_t j = 0; j < 8; ++j) {
                if (l >= j && l - j < 8) best = std::max(best, q[j] + p[l - j]);
            }
            EXPECT_EQ(s.value[l], best);
            EXPECT_EQ(q[s.split[l]] + p[l - s.split[l]], best);
        }
    }
}

TEST(TreeKnapsack, SingleNode) {
    GlobalTree t;
    t.add_node(NodeKind::Actual);
    std::vector<double> e{7.0};
    std::vector<std::int64_t> c{2};
    TreeKnapsack<double> dp(t, e, c);
    EXPECT_EQ(dp.values(), (std::vector<double>{0, 0, 7}));
    EXPECT_TRUE(dp.retained(1).empty());
    EXPECT_EQ(dp.retained(2), std::vector<NodeId>{0});
}

TEST(TreeKnapsack, ChainKeepsParentFirst) {
    GlobalTree t;
    auto r = t.add_node(NodeKind::Actual);
    t.add_node(NodeKind::Actual, r);
    std::vector<double> e{1.0, 10.0};
    std::vector<std::int64_t> c{1, 1};
    TreeKnapsack<double> dp(t, e, c);
    EXPECT_EQ(dp.value_at(1), 1.0);
    EXPECT_EQ(dp.retained(1), std::vector<NodeId>{0});
    EXPECT_EQ(dp.value_at(2), 11.0);
    EXPECT_EQ(dp.retained(2), (std::vector<NodeId>{0, 1}));
    EXPECT_EQ(dp.value_at(50), 11.0);
}

TEST(TreeKnapsack, MatchesExhaustiveOracle) {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<std::size_t> size(1, 14);
    for (int trial = 0; trial < 200; ++trial) {
        auto t = random_tree(rng, size(rng));
        TreeKnapsack<double> dp(t.tree, std::span<const double>(t.values), std::span<const std::int64_t>(t.lengths));
        auto oracle = brute_force_best(t.tree, t.values, t.lengths);
        ASSERT_EQ(dp.values().size(), oracle.size());
        for (std::size_t l = 0; l < oracle.size(); ++l) {
            EXPECT_NEAR(dp.values()[l], oracle[l], 1e-9) << "trial " << trial << " budget " << l;
            auto kept = dp.retained(static_cast<std::int64_t>(l));
            EXPECT_TRUE(parent_closed(t.tree, kept));
            double v = 0.0;
            std::int64_t len = 0;
            for (auto id : kept) {
                v += t.values[id];
                len += t.lengths[id];
            }
            EXPECT_LE(len, static_cast<std::int64_t>(l));
            EXPECT_NEAR(v, dp.values()[l], 1e-9);
        }
    }
}

TEST(TreeKnapsack, ScopedSubtree) {
    std::mt19937 rng(9);
    auto t = random_tree(rng, 12);
    NodeId scope = t.tree.nodes[0].children.front();
    TreeKnapsack<double> dp(t.tree, std::span<const double>(t.values), std::span<const std::int64_t>(t.lengths), scope);
    for (std::int64_t b = 0; b <= dp.max_budget(); ++b) {
        for (auto id : dp.retained(b)) {
            auto sub = subtree_nodes(t.tree, scope);
            EXPECT_TRUE(std::binary_search(sub.begin(), sub.end(), id));
        }
    }
}

TEST(Budget, Floor) {
    EXPECT_EQ(budget_for(0.3, 10), 3);
    EXPECT_EQ(budget_for(0.29, 100), 29);
    EXPECT_EQ(budget_for(0.5, 7), 3);
    EXPECT_EQ(budget_for(0.1, 5), 0);
    EXPECT_THROW(validate_ratio(0.0), Error);
    EXPECT_THROW(validate_ratio(1.0), Error);
}

GlobalTree valued_document(std::mt19937& rng, TreeShape shape = TreeShape::Hierarchical) {
    auto t = testing::random_document_tree(rng, 0.5, 3.0, shape);
    std::uniform_int_distribution<std::int64_t> len(1, 3);
    for (auto& n : t.nodes) {
        if (!n.is_virtual()) n.length = len(rng);
    }
    return t;
}

TEST(Compress, MultiRatioEqualsSingleRatio) {
    std::mt19937 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        auto t = valued_document(rng);
        std::vector<double> ratios{0.2, 0.5, 0.8};
        auto batch = compress(t, ratios);
        for (std::size_t k = 0; k < ratios.size(); ++k) {
            auto single = compress(t, std::span<const double>(&ratios[k], 1));
            EXPECT_EQ(batch[k].retained, single[0].retained);
            EXPECT_EQ(batch[k].compressed_text, single[0].compressed_text);
        }
    }
}

TEST(Compress, ConstraintsHold) {
    std::mt19937 rng(6);
    for (int trial = 0; trial < 30; ++trial) {
        auto t = valued_document(rng);
        for (auto variant : {Variant::Full, Variant::NoAdjust, Variant::Local, Variant::ParseOnly,
                             Variant::ParseOnlyLocal}) {
            auto plan = select_variant(variant);
            Compressor c(t, {plan.unit_values, plan.per_sentence});
            for (double r : {0.1, 0.3, 0.5, 0.7, 0.9}) {
                auto res = c.compress(r);
                EXPECT_LE(res.realized_length, budget_for(r, t.total_length()));
                EXPECT_TRUE(parent_closed(t, res.retained));
            }
        }
    }
}

TEST(Compress, ZeroBudgetWarns) {
    GlobalTree t;
    auto root = t.add_node(NodeKind::VirtualDocument);
    auto a = t.add_node(NodeKind::Actual, root);
    t.nodes[a].length = 3;
    t.nodes[a].e_adjusted = 1.0;
    auto res = Compressor(t).compress(0.2);
    EXPECT_EQ(res.budget, 0);
    EXPECT_TRUE(res.retained.empty());
    EXPECT_TRUE(res.warning.has_value());
}

TEST(Compress, PerSentenceMatchesOracleOnBbcSlices) {
    // Each sentence is cut to at most 12 tokens so the oracle stays small.
    auto doc = segment(testing::read_fixture("bbc_style.md"));
    std::mt19937 rng(17);
    std::vector<LocalParseTree> parses;
    for (auto& s : doc.sentences) {
        parses.push_back(testing::random_parse(rng, s));
    }
    auto t = build_global_tree(doc, parses);
    std::uniform_real_distribution<double> e(0.0, 5.0);
    for (auto& n : t.nodes) {
        if (!n.is_virtual()) n.e_aligned = e(rng);
    }
    adjust(t, {1.0, 2.0});

    for (const auto& n : t.nodes) {
        if (n.kind != NodeKind::VirtualSentence) continue;
        auto sub = subtree_nodes(t, n.id);
        // Keep the sentence node plus its first 12 actual nodes in pre-order,
        // which is parent-closed because pre-order lists parents first.
        sub.resize(std::min<std::size_t>(sub.size(), 13));
        GlobalTree slice;
        std::vector<double> values;
        std::vector<std::int64_t> lengths;
        std::vector<NodeId> remap(t.size(), kNoNode);
        for (NodeId id : sub) {
            const auto& src = t.nodes[id];
            remap[id] = slice.add_node(src.kind, src.parent == kNoNode || id == n.id ? kNoNode : remap[src.parent]);
            values.push_back(src.is_virtual() ? 0.0 : src.e_adjusted);
            lengths.push_back(src.length);
        }
        TreeKnapsack<double> dp(slice, std::span<const double>(values), std::span<const std::int64_t>(lengths));
        auto oracle = brute_force_best(slice, values, lengths);
        auto b = budget_for(0.5, dp.max_budget());
        EXPECT_NEAR(dp.value_at(b), oracle[static_cast<std::size_t>(b)], 1e-9);
    }
}

TEST(Variants, TopKWithUnitLengths) {
    auto doc = segment("x y z");
    std::vector<LocalParseTree> parses{fallback_parse(doc.sentences[0])};
    auto t = build_global_tree(doc, parses, TreeShape::Flat);
    const double values[] = {3.0, 1.0, 2.0};
    for (std::size_t i = 0; i < 3; ++i) {
        auto& n = t.nodes[t.token_nodes[0][i]];
        n.e_aligned = values[i];
        n.length = 1;
    }
    skip_adjustment(t);
    auto res = Compressor(t).compress(0.7);  // budget 2
    ASSERT_EQ(res.retained_tokens.size(), 2u);
    EXPECT_EQ(res.compressed_text, "x z");
}

TEST(Variants, NoAdjustMatchesShiftedFull) {
    // With a1 = 0 and a2 = 1 every token gains exactly 1, so on trees with
    // distinct values and unit lengths the chosen sets coincide.
    std::mt19937 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        auto t = testing::random_document_tree(rng, 0.5, 3.0, TreeShape::SingleRoot);
        auto plain = t;
        skip_adjustment(plain);
        auto shifted = t;
        adjust(shifted, {0.0, 1.0});
        for (auto& n : shifted.nodes) {
            if (n.is_virtual()) n.e_adjusted = 0.0;
        }
        Compressor a(plain), b(shifted);
        for (double r : {0.2, 0.4, 0.6, 0.8}) {
            auto x = a.compress(r);
            auto y = b.compress(r);
            EXPECT_EQ(x.retained, y.retained) << "trial " << trial << " ratio " << r;
        }
    }
}

TEST(Variants, ParseOnlyChainTakesAncestorsFirst) {
    GlobalTree t;
    auto root = t.add_node(NodeKind::VirtualDocument);
    NodeId prev = root;
    for (int i = 0; i < 5; ++i) {
        prev = t.add_node(NodeKind::Actual, prev);
        t.nodes[prev].length = 1;
        t.nodes[prev].e_aligned = 10.0 - i;
    }
    auto plan = select_variant(Variant::ParseOnly);
    Compressor c(t, {plan.unit_values, plan.per_sentence});
    for (double r : {0.2, 0.4, 0.6, 0.8}) {
        auto res = c.compress(r);
        std::vector<NodeId> expected{0};
        for (NodeId id = 1; id <= static_cast<NodeId>(res.budget); ++id) expected.push_back(id);
        EXPECT_EQ(res.retained, expected);
    }
}

TEST(Variants, LocalSpendsPerSentenceBudgets) {
    std::mt19937 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        auto t = valued_document(rng);
        skip_adjustment(t);
        Compressor c(t, {false, true});
        auto res = c.compress(0.5);
        for (const auto& n : t.nodes) {
            if (n.kind != NodeKind::VirtualSentence) continue;
            std::int64_t total = 0, kept = 0;
            for (auto id : subtree_nodes(t, n.id)) {
                total += t.nodes[id].length;
                if (std::binary_search(res.retained.begin(), res.retained.end(), id)) kept += t.nodes[id].length;
            }
            EXPECT_LE(kept, budget_for(0.5, total));
        }
        EXPECT_TRUE(parent_closed(t, res.retained));
    }
}

TEST(Variants, Names) {
    for (auto v : {Variant::Full, Variant::NoAdjust, Variant::Local, Variant::Flat, Variant::ParseOnly,
                   Variant::ParseOnlyLocal}) {
        EXPECT_EQ(parse_variant(to_string(v)), v);
    }
    EXPECT_THROW(parse_variant("bogus"), Error);
}

TEST(Detokenize, Punctuation) {
    auto doc = segment("Hello , world ( ok ) .\n\nNext one!");
    std::vector<LocalParseTree> parses;
    for (const auto& s : doc.sentences) parses.push_back(fallback_parse(s));
    auto t = build_global_tree(doc, parses);
    auto order = t.actual_in_document_order();
    EXPECT_EQ(detokenize(t, order), "Hello, world ( ok).\n\nNext one!");
}

}  // namespace
}  // namespace treeprompt
