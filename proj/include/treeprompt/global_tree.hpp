// Copyright (C) 2026 The treeprompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "treeprompt/error.hpp"
#include "treeprompt/parse_ingest.hpp"
#include "treeprompt/segmenter.hpp"

namespace treeprompt {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

enum class NodeKind { Actual, VirtualSentence, VirtualParagraph, VirtualSection, VirtualDocument };

inline bool is_virtual(NodeKind k) noexcept { return k != NodeKind::Actual; }

inline std::string_view to_string(NodeKind k) noexcept {
    switch (k) {
        case NodeKind::Actual: return "actual";
        case NodeKind::VirtualSentence: return "sentence";
        case NodeKind::VirtualParagraph: return "paragraph";
        case NodeKind::VirtualSection: return "section";
        case NodeKind::VirtualDocument: return "document";
    }
    return "?";
}

/// Hierarchical: actual -> sentence -> paragraph -> section -> document.
/// SingleRoot: local trees hang directly off one virtual root.
/// Flat: every actual node is a child of the one virtual root.
enum class TreeShape { Hierarchical, SingleRoot, Flat };

struct TreeNode {
    NodeId id = 0;
    NodeKind kind = NodeKind::Actual;
    NodeId parent = kNoNode;
    std::vector<NodeId> children;
    std::string token_text;
    std::size_t sentence_index = 0;
    std::size_t token_index = 0;  // 1-based within the sentence; actual nodes only
    std::int64_t length = 0;      // scorer-token units
    double e_aligned = 0.0;
    double e_adjusted = 0.0;

    bool is_virtual() const noexcept { return treeprompt::is_virtual(kind); }
    bool is_root() const noexcept { return parent == kNoNode; }
};

class GlobalTree {
public:
    std::vector<TreeNode> nodes;
    NodeId root = kNoNode;
    /// token_nodes[j][i] is the node holding token i+1 of sentence j.
    std::vector<std::vector<NodeId>> token_nodes;
    /// paragraph id of every sentence, for output layout.
    std::vector<std::size_t> sentence_paragraph;

    std::size_t size() const noexcept { return nodes.size(); }
    const TreeNode& operator[](NodeId id) const { return nodes.at(id); }
    TreeNode& operator[](NodeId id) { return nodes.at(id); }

    /// Appends a node. Parents must be added before their children, so a
    /// parent's id is always smaller than its children's ids.
    NodeId add_node(NodeKind kind, NodeId parent = kNoNode) {
        NodeId id = static_cast<NodeId>(nodes.size());
        TreeNode node;
        node.id = id;
        node.kind = kind;
        node.parent = parent;
        if (parent == kNoNode) {
            if (root != kNoNode) throw Error("global_tree", "tree already has a root");
            root = id;
        } else {
            if (parent >= id) throw Error("global_tree", "parent must precede child");
            nodes[parent].children.push_back(id);
        }
        nodes.push_back(std::move(node));
        return id;
    }

    bool is_first_child(NodeId id) const {
        const auto& n = nodes.at(id);
        return n.parent != kNoNode && nodes[n.parent].children.front() == id;
    }

    /// Σ C(v) over all nodes.
    std::int64_t total_length() const {
        std::int64_t sum = 0;
        for (const auto& n : nodes) sum += n.length;
        return sum;
    }

    /// Actual node ids ordered by (sentence, token position).
    std::vector<NodeId> actual_in_document_order() const {
        std::vector<NodeId> out;
        for (const auto& sentence : token_nodes) out.insert(out.end(), sentence.begin(), sentence.end());
        return out;
    }
};

namespace detail {

/// Pre-order of a local tree with children in token order.
inline std::vector<std::size_t> local_preorder(const LocalParseTree& parse) {
    const std::size_t n = parse.tokens.size();
    std::vector<std::vector<std::size_t>> kids(n + 1);
    for (const auto& t : parse.tokens) kids[t.head].push_back(t.index);
    std::vector<std::size_t> order;
    order.reserve(n);
    std::vector<std::size_t> stack(kids[0].rbegin(), kids[0].rend());
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        order.push_back(v);
        for (auto it = kids[v].rbegin(); it != kids[v].rend(); ++it) stack.push_back(*it);
    }
    return order;
}

inline void attach_local_tree(GlobalTree& tree, const LocalParseTree& parse, NodeId anchor, bool flat) {
    const std::size_t j = parse.sentence_index;
    auto& slots = tree.token_nodes[j];
    slots.assign(parse.tokens.size(), kNoNode);
    auto add = [&](std::size_t token, NodeId parent) {
        const auto& tok = parse.tokens[token - 1];
        NodeId id = tree.add_node(NodeKind::Actual, parent);
        auto& node = tree.nodes[id];
        node.token_text = tok.text;
        node.sentence_index = j;
        node.token_index = tok.index;
        node.length = 1;
        slots[token - 1] = id;
    };
    if (flat) {
        for (const auto& tok : parse.tokens) add(tok.index, anchor);
        return;
    }
    for (auto token : local_preorder(parse)) {
        auto head = parse.tokens[token - 1].head;
        add(token, head == 0 ? anchor : slots[head - 1]);
    }
}

}  // namespace detail

/// Merges the per-sentence local parse trees into one rooted tree. Node ids
/// follow document pre-order. Actual nodes start with length 1 and zero
/// entropy until alignment fills them.
inline GlobalTree build_global_tree(const SegmentedDocument& doc, const std::vector<LocalParseTree>& parses,
                                    TreeShape shape = TreeShape::Hierarchical) {
    if (parses.size() != doc.sentences.size()) {
        throw Error("global_tree", "parse/sentence count mismatch: " + std::to_string(parses.size()) + " parses for " +
                                       std::to_string(doc.sentences.size()) + " sentences");
    }
    for (std::size_t j = 0; j < parses.size(); ++j) {
        if (parses[j].sentence_index != j) throw Error("global_tree", "parses out of sentence order", j);
    }
    GlobalTree tree;
    tree.token_nodes.resize(doc.sentences.size());
    for (const auto& s : doc.sentences) tree.sentence_paragraph.push_back(s.paragraph_id);
    NodeId root = tree.add_node(NodeKind::VirtualDocument);

    if (shape != TreeShape::Hierarchical) {
        for (const auto& parse : parses) detail::attach_local_tree(tree, parse, root, shape == TreeShape::Flat);
        return tree;
    }

    NodeId section = kNoNode;
    NodeId paragraph = kNoNode;
    for (std::size_t j = 0; j < doc.sentences.size(); ++j) {
        const auto& s = doc.sentences[j];
        bool new_section = j == 0 || s.section_id != doc.sentences[j - 1].section_id;
        bool new_paragraph = new_section || s.paragraph_id != doc.sentences[j - 1].paragraph_id;
        if (new_section) section = tree.add_node(NodeKind::VirtualSection, root);
        if (new_paragraph) paragraph = tree.add_node(NodeKind::VirtualParagraph, section);
        NodeId sentence = tree.add_node(NodeKind::VirtualSentence, paragraph);
        tree.nodes[sentence].sentence_index = j;
        detail::attach_local_tree(tree, parses[j], sentence, false);
    }
    return tree;
}

/// The node itself plus all of its descendants, ascending.
inline std::vector<NodeId> subtree_nodes(const GlobalTree& tree, NodeId id) {
    if (id >= tree.size()) throw Error("global_tree", "unknown node id " + std::to_string(id));
    std::vector<NodeId> out;
    std::vector<NodeId> stack{id};
    while (!stack.empty()) {
        NodeId v = stack.back();
        stack.pop_back();
        out.push_back(v);
        for (NodeId c : tree.nodes[v].children) stack.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// True when every edge of a hierarchical tree respects the
/// actual -> sentence -> paragraph -> section -> document ordering.
inline bool satisfies_kind_constraints(const GlobalTree& tree) {
    std::size_t documents = 0;
    for (const auto& n : tree.nodes) {
        if (n.kind == NodeKind::VirtualDocument) {
            ++documents;
            if (!n.is_root()) return false;
            continue;
        }
        if (n.is_root()) return false;
        NodeKind p = tree.nodes[n.parent].kind;
        switch (n.kind) {
            case NodeKind::Actual:
                if (p != NodeKind::Actual && p != NodeKind::VirtualSentence) return false;
                break;
            case NodeKind::VirtualSentence:
                if (p != NodeKind::VirtualParagraph) return false;
                break;
            case NodeKind::VirtualParagraph:
                if (p != NodeKind::VirtualSection) return false;
                break;
            case NodeKind::VirtualSection:
                if (p != NodeKind::VirtualDocument) return false;
                break;
            default: break;
        }
    }
    return documents == 1;
}

inline std::string dump_text(const GlobalTree& tree) {
    std::ostringstream out;
    std::vector<std::pair<NodeId, std::size_t>> stack{{tree.root, 0}};
    while (!stack.empty()) {
        auto [id, depth] = stack.back();
        stack.pop_back();
        const auto& n = tree.nodes[id];
        out << std::string(2 * depth, ' ') << '#' << id << ' ' << to_string(n.kind);
        if (!n.is_virtual()) out << " \"" << n.token_text << '"';
        out << " C=" << n.length << " E=" << n.e_aligned << " E'=" << n.e_adjusted << '\n';
        for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back({*it, depth + 1});
    }
    return out.str();
}

inline std::string dump_dot(const GlobalTree& tree) {
    auto escape = [](const std::string& s) {
        std::string out;
        for (char c : s) {
            if (c == '"' || c == '\\') out.push_back('\\');
            out.push_back(c);
        }
        return out;
    };
    std::ostringstream out;
    out << "digraph global_tree {\n  node [shape=box];\n";
    for (const auto& n : tree.nodes) {
        out << "  n" << n.id << " [label=\"";
        if (n.is_virtual()) {
            out << to_string(n.kind);
        } else {
            out << escape(n.token_text);
        }
        out << "\\nC=" << n.length << " E'=" << n.e_adjusted << '"';
        if (n.is_virtual()) out << " style=dashed";
        out << "];\n";
    }
    for (const auto& n : tree.nodes) {
        for (NodeId c : n.children) out << "  n" << n.id << " -> n" << c << ";\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace treeprompt
