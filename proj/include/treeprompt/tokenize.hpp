// Copyright (C) 2026 The treeprompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "treeprompt/utf8.hpp"

namespace treeprompt {

/// Whitespace/punctuation word tokenizer shared by the fallback parser and the
/// built-in n-gram scorer. A token is either a maximal run of word characters
/// (with `.`, `'`, `’` or `-` allowed between two word characters, so "U.S",
/// "it's" and "well-known" stay whole) or a single punctuation character.
/// Every non-whitespace character lands in exactly one token.
inline std::vector<utf8::Span> tokenize_words(std::u32string_view text) {
    auto joiner = [](char32_t c) { return c == U'.' || c == U'\'' || c == 0x2019 || c == U'-'; };
    std::vector<utf8::Span> spans;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        char32_t c = text[i];
        if (utf8::is_space(c)) {
            ++i;
            continue;
        }
        if (!utf8::is_word_char(c)) {
            spans.push_back({i, i + 1});
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < n) {
            if (utf8::is_word_char(text[j])) {
                ++j;
            } else if (joiner(text[j]) && j + 1 < n && utf8::is_word_char(text[j + 1])) {
                j += 2;
            } else {
                break;
            }
        }
        spans.push_back({i, j});
        i = j;
    }
    return spans;
}

inline std::vector<std::string> tokenize_word_strings(std::string_view utf8_text) {
    auto text = utf8::decode(utf8_text);
    std::vector<std::string> out;
    for (const auto& span : tokenize_words(text)) {
        out.push_back(utf8::substr(text, span));
    }
    return out;
}

/// Greedy left-to-right location of `pieces` inside `text`: each piece must
/// start at the cursor after skipping whitespace. Returns the index of the
/// first piece that cannot be located, or pieces.size() on success.
inline std::size_t locate_pieces(std::u32string_view text, const std::vector<std::u32string>& pieces,
                                 std::vector<utf8::Span>& spans) {
    spans.clear();
    std::size_t cursor = 0;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        while (cursor < text.size() && utf8::is_space(text[cursor])) ++cursor;
        const auto& piece = pieces[k];
        if (piece.empty() || text.substr(cursor, piece.size()) != piece) {
            return k;
        }
        spans.push_back({cursor, cursor + piece.size()});
        cursor += piece.size();
    }
    return pieces.size();
}

}  // namespace treeprompt
