// Copyright (C) 2026 The treeprompt Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "treeprompt/global_tree.hpp"
#include "treeprompt/parse_ingest.hpp"
#include "treeprompt/segmenter.hpp"

namespace treeprompt {
namespace {

GlobalTree build(const std::string& text, TreeShape shape = TreeShape::Hierarchical) {
    auto doc = segment(text);
    std::vector<LocalParseTree> parses;
    for (const auto& s : doc.sentences) parses.push_back(fallback_parse(s));
    return build_global_tree(doc, parses, shape);
}

std::size_t count_kind(const GlobalTree& t, NodeKind k) {
    std::size_t n = 0;
    for (const auto& node : t.nodes) n += node.kind == k;
    return n;
}

TEST(GlobalTree, OneSentence) {
    auto t = build("the cat sat");
    EXPECT_EQ(t.size(), 7u);
    EXPECT_EQ(count_kind(t, NodeKind::Actual), 3u);
    EXPECT_TRUE(satisfies_kind_constraints(t));
}

TEST(GlobalTree, TwoParagraphs) {
    auto t = build("Ab cd\n\nEf gh");
    EXPECT_EQ(t.size(), 10u);
    EXPECT_EQ(count_kind(t, NodeKind::VirtualSentence), 2u);
    EXPECT_EQ(count_kind(t, NodeKind::VirtualParagraph), 2u);
    EXPECT_EQ(count_kind(t, NodeKind::VirtualSection), 1u);
    EXPECT_EQ(count_kind(t, NodeKind::VirtualDocument), 1u);
}

TEST(GlobalTree, BbcFixtureMatchesIndependentCount) {
    // 182 tokens + 14 sentences + 6 paragraphs + 3 sections + 1 (oracles/count_nodes.py).
    auto t = build(testing::read_fixture("bbc_style.md"));
    EXPECT_EQ(t.size(), 206u);
    EXPECT_EQ(count_kind(t, NodeKind::Actual), 182u);
}

TEST(GlobalTree, VirtualNodesStartEmpty) {
    auto t = build(testing::read_fixture("bbc_style.md"));
    for (const auto& n : t.nodes) {
        if (n.is_virtual()) {
            EXPECT_EQ(n.length, 0);
            EXPECT_EQ(n.e_aligned, 0.0);
        } else {
            EXPECT_EQ(n.length, 1);
        }
    }
}

TEST(SubtreeNodes, LeafRootAndParagraph) {
    auto t = build("Ab cd\n\nEf gh");
    auto leaf = t.token_nodes[0][1];
    EXPECT_EQ(subtree_nodes(t, leaf), std::vector<NodeId>{leaf});
    EXPECT_EQ(subtree_nodes(t, t.root).size(), t.size());

    // 0 doc, 1 section, 2 paragraph, 3 sentence, 4 "Ab", 5 "cd", 6 paragraph...
    ASSERT_EQ(t.nodes[2].kind, NodeKind::VirtualParagraph);
    EXPECT_EQ(subtree_nodes(t, 2), (std::vector<NodeId>{2, 3, 4, 5}));
    EXPECT_THROW(subtree_nodes(t, 99), Error);
}

TEST(SubtreeNodes, ParagraphWithTwoSentences) {
    // One paragraph: itself + 2 sentence nodes + 4 tokens.
    auto t = build("Ab. Cd.");
    ASSERT_EQ(t.size(), 9u);
    ASSERT_EQ(t.nodes[2].kind, NodeKind::VirtualParagraph);
    EXPECT_EQ(subtree_nodes(t, 2).size(), 7u);
}

TEST(GlobalTree, PreorderIdsFollowDocument) {
    auto t = build(testing::read_fixture("three_sections.md"));
    for (const auto& n : t.nodes) {
        if (!n.is_root()) {
            EXPECT_LT(n.parent, n.id);
        }
    }
    std::string text;
    for (NodeId id : t.actual_in_document_order()) text += t.nodes[id].token_text + " ";
    EXPECT_EQ(text.substr(0, 38), "Trees organize text . They also guide ");
}

TEST(GlobalTree, ConllTreeKeepsHeads) {
    auto doc = segment("What if Google Morphed Into GoogleOS?");
    auto parses = read_conllu(testing::read_fixture("ud_sample.conllu"), doc);
    auto t = build_global_tree(doc, parses);
    const auto& nodes = t.token_nodes[0];
    for (std::size_t i = 0; i < parses[0].tokens.size(); ++i) {
        std::size_t head = parses[0].tokens[i].head;
        NodeId expected = head == 0 ? 3 : nodes[head - 1];
        EXPECT_EQ(t.nodes[nodes[i]].parent, expected) << i;
    }
    EXPECT_TRUE(satisfies_kind_constraints(t));
}

TEST(GlobalTree, Shapes) {
    const std::string text = testing::read_fixture("three_sections.md");
    auto single = build(text, TreeShape::SingleRoot);
    auto flat = build(text, TreeShape::Flat);
    EXPECT_EQ(single.size(), flat.size());
    std::size_t root_children = 0;
    for (const auto& n : flat.nodes) {
        if (!n.is_root()) {
            EXPECT_EQ(n.parent, flat.root);
            ++root_children;
        }
    }
    EXPECT_EQ(root_children, flat.size() - 1);
    EXPECT_EQ(single.nodes[single.root].children.size(), 12u);
}

TEST(GlobalTree, KindConstraintsOverRandomParses) {
    std::mt19937 rng(11);
    auto doc = segment(testing::read_fixture("bbc_style.md"));
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<LocalParseTree> parses;
        for (const auto& s : doc.sentences) {
            auto p = fallback_parse(s);
            // Random heads that always point to an earlier token keep it a tree.
            for (std::size_t i = 1; i < p.tokens.size(); ++i) {
                std::uniform_int_distribution<std::size_t> head(1, i);
                p.tokens[i].head = head(rng);
            }
            validate_tree(p);
            parses.push_back(p);
        }
        auto t = build_global_tree(doc, parses);
        EXPECT_TRUE(satisfies_kind_constraints(t));
        EXPECT_EQ(t.size(), 206u);
        EXPECT_EQ(subtree_nodes(t, t.root).size(), t.size());
    }
}

TEST(GlobalTree, KindConstraintViolationDetected) {
    GlobalTree t;
    auto root = t.add_node(NodeKind::VirtualDocument);
    t.add_node(NodeKind::VirtualParagraph, root);
    EXPECT_FALSE(satisfies_kind_constraints(t));
    EXPECT_THROW(t.add_node(NodeKind::VirtualDocument), Error);
}

TEST(GlobalTree, Dumps) {
    auto t = build("Ab cd");
    EXPECT_NE(dump_text(t).find("Ab"), std::string::npos);
    auto dot = dump_dot(t);
    EXPECT_EQ(dot.rfind("digraph", 0), 0u);
    EXPECT_NE(dot.find("->"), std::string::npos);
}

}  // namespace
}  // namespace treeprompt
