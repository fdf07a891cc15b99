// Copyright (C) 2026 The treeprompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <charconv>
#include <cstddef>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "treeprompt/error.hpp"
#include "treeprompt/segmenter.hpp"
#include "treeprompt/tokenize.hpp"
#include "treeprompt/utf8.hpp"

namespace treeprompt {

struct ParseToken {
    std::size_t index = 0;  // 1-based
    std::string text;
    std::size_t head = 0;  // 0 = sentence root
    utf8::Span span;       // into the sentence text

    friend bool operator==(const ParseToken&, const ParseToken&) = default;
};

struct LocalParseTree {
    std::size_t sentence_index = 0;
    std::vector<ParseToken> tokens;
    std::size_t root = 0;

    friend bool operator==(const LocalParseTree&, const LocalParseTree&) = default;
};

/// Verifies the single-root, acyclic head structure and span order.
/// Fills `tree.root`.
inline void validate_tree(LocalParseTree& tree) {
    const std::size_t n = tree.tokens.size();
    const auto sentence = tree.sentence_index;
    if (n == 0) throw Error("parse_ingest", "empty parse tree", sentence);
    std::size_t roots = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& tok = tree.tokens[i];
        if (tok.index != i + 1) throw Error("parse_ingest", "token ids must be 1..n in order", sentence);
        if (tok.head > n) {
            throw Error("parse_ingest", "head " + std::to_string(tok.head) + " out of range", sentence);
        }
        if (tok.head == tok.index) throw Error("parse_ingest", "token is its own head (cycle)", sentence);
        if (tok.head == 0) {
            ++roots;
            tree.root = tok.index;
        }
        if (i > 0 && tok.span.start < tree.tokens[i - 1].span.end) {
            throw Error("parse_ingest", "token spans overlap or are out of order", sentence);
        }
    }
    if (roots != 1) {
        throw Error("parse_ingest", "expected exactly one head-0 token, found " + std::to_string(roots), sentence);
    }
    // 0 = unvisited, 1 = on current path, 2 = reaches root
    std::vector<char> state(n + 1, 0);
    state[0] = 2;
    for (std::size_t start = 1; start <= n; ++start) {
        std::vector<std::size_t> path;
        std::size_t v = start;
        while (state[v] == 0) {
            state[v] = 1;
            path.push_back(v);
            v = tree.tokens[v - 1].head;
        }
        if (state[v] == 1) throw Error("parse_ingest", "cyclic head links", sentence);
        for (auto p : path) state[p] = 2;
    }
}

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        auto tab = line.find('\t', pos);
        if (tab == std::string_view::npos) {
            out.push_back(line.substr(pos));
            break;
        }
        out.push_back(line.substr(pos, tab - pos));
        pos = tab + 1;
    }
    return out;
}

inline bool parse_size(std::string_view s, std::size_t& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

inline void recover_spans(LocalParseTree& tree, std::string_view sentence_text) {
    const auto text = utf8::decode(sentence_text);
    std::vector<std::u32string> forms;
    forms.reserve(tree.tokens.size());
    for (const auto& t : tree.tokens) forms.push_back(utf8::decode(t.text));
    std::vector<utf8::Span> spans;
    auto failed = locate_pieces(text, forms, spans);
    if (failed != forms.size()) {
        throw Error("parse_ingest", "FORM '" + tree.tokens[failed].text + "' cannot be located in the sentence text",
                    tree.sentence_index);
    }
    for (std::size_t i = 0; i < spans.size(); ++i) tree.tokens[i].span = spans[i];
}

}  // namespace detail

/// Reads one CoNLL-U block per sentence of `doc`, in order. Multiword-token
/// ranges ("3-4") and empty nodes ("3.1") are skipped; only FORM and HEAD are
/// consumed. Token spans are recovered by greedy matching against the
/// sentence text.
inline std::vector<LocalParseTree> read_conllu(std::string_view source, const SegmentedDocument& doc) {
    std::vector<std::vector<ParseToken>> blocks;
    std::vector<ParseToken> current;
    std::size_t line_no = 0;
    auto close_block = [&] {
        if (!current.empty()) blocks.push_back(std::move(current));
        current.clear();
    };

    std::size_t pos = 0;
    while (pos <= source.size()) {
        auto nl = source.find('\n', pos);
        if (nl == std::string_view::npos) nl = source.size();
        std::string_view line = source.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;

        if (line.empty()) {
            close_block();
        } else if (line.front() != '#') {
            auto cols = detail::split_tabs(line);
            if (cols.size() != 10) {
                throw Error("parse_ingest", "line " + std::to_string(line_no) + ": expected 10 tab-separated columns");
            }
            if (cols[0].find_first_of("-.") == std::string_view::npos) {
                ParseToken tok;
                if (!detail::parse_size(cols[0], tok.index)) {
                    throw Error("parse_ingest", "line " + std::to_string(line_no) + ": bad ID column");
                }
                if (!detail::parse_size(cols[6], tok.head)) {
                    throw Error("parse_ingest", "line " + std::to_string(line_no) + ": bad HEAD column");
                }
                tok.text = std::string(cols[1]);
                current.push_back(std::move(tok));
            }
        }
        if (nl == source.size()) break;
        pos = nl + 1;
    }
    close_block();

    if (blocks.size() != doc.sentences.size()) {
        throw Error("parse_ingest", "sentence-count mismatch: " + std::to_string(blocks.size()) +
                                        " CoNLL-U blocks for " + std::to_string(doc.sentences.size()) + " sentences");
    }
    std::vector<LocalParseTree> trees;
    trees.reserve(blocks.size());
    for (std::size_t j = 0; j < blocks.size(); ++j) {
        LocalParseTree tree;
        tree.sentence_index = j;
        tree.tokens = std::move(blocks[j]);
        // Structure first so cycles are reported even when spans would also fail.
        validate_tree(tree);
        detail::recover_spans(tree, doc.sentences[j].text);
        trees.push_back(std::move(tree));
    }
    return trees;
}

/// Flat fallback parse: the first token is the root and every other token
/// attaches to it. Throws for a sentence with no tokens.
inline LocalParseTree fallback_parse(const SentenceRecord& sentence) {
    const auto text = utf8::decode(sentence.text);
    const auto spans = tokenize_words(text);
    if (spans.empty()) throw Error("parse_ingest", "empty sentence has no tokens", sentence.index);
    LocalParseTree tree;
    tree.sentence_index = sentence.index;
    tree.root = 1;
    for (std::size_t i = 0; i < spans.size(); ++i) {
        tree.tokens.push_back({i + 1, utf8::substr(text, spans[i]), i == 0 ? 0u : 1u, spans[i]});
    }
    return tree;
}

/// Serializes trees as CoNLL-U with FORM, HEAD and a placeholder DEPREL.
inline std::string write_conllu(const std::vector<LocalParseTree>& trees) {
    std::ostringstream out;
    for (const auto& tree : trees) {
        for (const auto& t : tree.tokens) {
            out << t.index << '\t' << t.text << "\t_\t_\t_\t_\t" << t.head << '\t'
                << (t.head == 0 ? "root" : "dep") << "\t_\t_\n";
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace treeprompt
