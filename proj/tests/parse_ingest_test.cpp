// Copyright (C) 2026 The treeprompt Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "treeprompt/parse_ingest.hpp"
#include "treeprompt/segmenter.hpp"

namespace treeprompt {
namespace {

std::string row(std::size_t id, const std::string& form, std::size_t head) {
    return std::to_string(id) + "\t" + form + "\t_\t_\t_\t_\t" + std::to_string(head) + "\t_\t_\t_\n";
}

SentenceRecord sentence(const std::string& text) {
    SentenceRecord s;
    s.text = text;
    s.span = {0, utf8::length(text)};
    return s;
}

TEST(ReadConllu, HeadColumnDefinesRoot) {
    auto doc = segment("cats sleep");
    auto trees = read_conllu(row(1, "cats", 2) + row(2, "sleep", 0), doc);
    ASSERT_EQ(trees.size(), 1u);
    const auto& t = trees[0];
    EXPECT_EQ(t.tokens[t.root - 1].text, "sleep");
    EXPECT_EQ(t.tokens[0].head, 2u);
    EXPECT_EQ(t.tokens[0].span, (utf8::Span{0, 4}));
    EXPECT_EQ(t.tokens[1].span, (utf8::Span{5, 10}));
}

TEST(ReadConllu, CycleIsRejected) {
    auto doc = segment("a b c");
    try {
        read_conllu(row(1, "a", 2) + row(2, "b", 3) + row(3, "c", 1), doc);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_EQ(e.module(), "parse_ingest");
    }
}

TEST(ReadConllu, TwoRootsRejected) {
    auto doc = segment("a b");
    EXPECT_THROW(read_conllu(row(1, "a", 0) + row(2, "b", 0), doc), Error);
}

TEST(ReadConllu, HeadOutOfRangeRejected) {
    auto doc = segment("a b");
    EXPECT_THROW(read_conllu(row(1, "a", 0) + row(2, "b", 7), doc), Error);
}

TEST(ReadConllu, SentenceCountMismatch) {
    auto doc = segment("One. Two.");
    EXPECT_THROW(read_conllu(row(1, "One", 0) + row(2, ".", 1), doc), Error);
}

TEST(ReadConllu, FormsMustMatchText) {
    auto doc = segment("cats sleep");
    EXPECT_THROW(read_conllu(row(1, "dogs", 2) + row(2, "sleep", 0), doc), Error);
}

TEST(ReadConllu, UniversalDependenciesSample) {
    auto doc = segment("What if Google Morphed Into GoogleOS?");
    auto trees = read_conllu(testing::read_fixture("ud_sample.conllu"), doc);
    ASSERT_EQ(trees.size(), 1u);
    const std::vector<std::size_t> heads{0, 4, 4, 1, 6, 4, 4};
    const std::vector<std::string> forms{"What", "if", "Google", "Morphed", "Into", "GoogleOS", "?"};
    ASSERT_EQ(trees[0].tokens.size(), heads.size());
    for (std::size_t i = 0; i < heads.size(); ++i) {
        EXPECT_EQ(trees[0].tokens[i].head, heads[i]);
        EXPECT_EQ(trees[0].tokens[i].text, forms[i]);
    }
    EXPECT_EQ(trees[0].root, 1u);
    EXPECT_EQ(trees[0].tokens[6].span, (utf8::Span{36, 37}));
}

TEST(ReadConllu, MultiwordAndEmptyNodesSkipped) {
    auto doc = segment("I don't know.\n\nOk.");
    std::string src = "# text = I don't know.\n" + row(1, "I", 3) + "2-3\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n" +
                      row(2, "do", 3) + row(3, "n't", 0) + "3.1\tx\t_\t_\t_\t_\t_\t_\t_\t_\n" + row(4, "know", 3) +
                      row(5, ".", 3) + "\n" + row(1, "Ok", 0) + row(2, ".", 1) + "\n";
    // Tokens "do" and "n't" are carved out of "don't".
    auto trees = read_conllu(src, doc);
    ASSERT_EQ(trees.size(), 2u);
    ASSERT_EQ(trees[0].tokens.size(), 5u);
    EXPECT_EQ(trees[0].tokens[1].span, (utf8::Span{2, 4}));
    EXPECT_EQ(trees[0].tokens[2].span, (utf8::Span{4, 7}));
    EXPECT_EQ(trees[1].sentence_index, 1u);
}

TEST(ReadConllu, WriteReadRoundTrip) {
    auto doc = segment("What if Google Morphed Into GoogleOS?");
    auto trees = read_conllu(testing::read_fixture("ud_sample.conllu"), doc);
    EXPECT_EQ(read_conllu(write_conllu(trees), doc), trees);
}

TEST(FallbackParse, FirstTokenIsRoot) {
    auto t = fallback_parse(sentence("the cat sat"));
    ASSERT_EQ(t.tokens.size(), 3u);
    EXPECT_EQ(t.root, 1u);
    EXPECT_EQ(t.tokens[0].text, "the");
    EXPECT_EQ(t.tokens[1].head, 1u);
    EXPECT_EQ(t.tokens[2].head, 1u);
}

TEST(FallbackParse, PunctuationIsAToken) {
    auto t = fallback_parse(sentence("Hi!"));
    ASSERT_EQ(t.tokens.size(), 2u);
    EXPECT_EQ(t.tokens[0].text, "Hi");
    EXPECT_EQ(t.tokens[1].text, "!");
    EXPECT_EQ(t.root, 1u);
}

TEST(FallbackParse, TenTokens) {
    auto t = fallback_parse(sentence("one two three four five six seven eight nine ten"));
    ASSERT_EQ(t.tokens.size(), 10u);
    std::size_t roots = 0, children = 0;
    for (const auto& tok : t.tokens) (tok.head == 0 ? roots : children)++;
    EXPECT_EQ(roots, 1u);
    EXPECT_EQ(children, 9u);
}

TEST(FallbackParse, EmptySentenceRejected) { EXPECT_THROW(fallback_parse(sentence("   ")), Error); }

TEST(LocalTree, EveryPathReachesRoot) {
    auto doc = segment(testing::read_fixture("bbc_style.md"));
    for (const auto& s : doc.sentences) {
        auto t = fallback_parse(s);
        std::size_t edges = 0;
        for (const auto& tok : t.tokens) {
            if (tok.head != 0) ++edges;
            std::size_t cur = tok.index, steps = 0;
            while (cur != 0 && steps <= t.tokens.size()) {
                cur = t.tokens[cur - 1].head;
                ++steps;
            }
            EXPECT_EQ(cur, 0u);
        }
        EXPECT_EQ(edges, t.tokens.size() - 1);
    }
}

}  // namespace
}  // namespace treeprompt
