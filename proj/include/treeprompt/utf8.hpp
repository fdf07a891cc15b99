// Copyright (C) 2026 The treeprompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "treeprompt/error.hpp"

// All character offsets in treeprompt count Unicode scalar values, never bytes.
namespace treeprompt::utf8 {

/// Half-open [start, end) range of code point offsets.
struct Span {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end - start; }
    bool contains(std::size_t offset) const noexcept { return offset >= start && offset < end; }
    std::size_t overlap(const Span& other) const noexcept {
        std::size_t lo = start > other.start ? start : other.start;
        std::size_t hi = end < other.end ? end : other.end;
        return hi > lo ? hi - lo : 0;
    }
    friend bool operator==(const Span&, const Span&) = default;
};

inline std::u32string decode(std::string_view bytes) {
    std::u32string out;
    out.reserve(bytes.size());
    std::size_t i = 0;
    while (i < bytes.size()) {
        auto lead = static_cast<unsigned char>(bytes[i]);
        char32_t cp = 0;
        std::size_t extra = 0;
        if (lead < 0x80) {
            cp = lead;
        } else if ((lead & 0xE0) == 0xC0) {
            cp = lead & 0x1F;
            extra = 1;
        } else if ((lead & 0xF0) == 0xE0) {
            cp = lead & 0x0F;
            extra = 2;
        } else if ((lead & 0xF8) == 0xF0) {
            cp = lead & 0x07;
            extra = 3;
        } else {
            throw Error("utf8", "invalid lead byte at offset " + std::to_string(i));
        }
        for (std::size_t k = 1; k <= extra; ++k) {
            if (i + k >= bytes.size()) {
                throw Error("utf8", "truncated sequence at offset " + std::to_string(i));
            }
            auto cont = static_cast<unsigned char>(bytes[i + k]);
            if ((cont & 0xC0) != 0x80) {
                throw Error("utf8", "invalid continuation byte at offset " + std::to_string(i + k));
            }
            cp = (cp << 6) | (cont & 0x3F);
        }
        if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            throw Error("utf8", "invalid scalar value at offset " + std::to_string(i));
        }
        out.push_back(cp);
        i += extra + 1;
    }
    return out;
}

inline void append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline std::string encode(std::u32string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char32_t cp : text) {
        append(out, cp);
    }
    return out;
}

inline std::size_t length(std::string_view bytes) { return decode(bytes).size(); }

inline std::string substr(std::u32string_view text, Span span) {
    return encode(text.substr(span.start, span.size()));
}

inline bool is_space(char32_t c) noexcept {
    switch (c) {
        case U' ': case U'\t': case U'\n': case U'\r': case U'\v': case U'\f':
        case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return c >= 0x2000 && c <= 0x200A;
    }
}

inline bool is_ascii_alnum(char32_t c) noexcept {
    return (c >= U'0' && c <= U'9') || (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z');
}

/// Punctuation as seen by the word tokenizer: ASCII punctuation plus the
/// general punctuation block, Latin-1 punctuation, and CJK full stops.
inline bool is_punct(char32_t c) noexcept {
    if (c < 0x80) {
        return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
               (c >= 0x7B && c <= 0x7E);
    }
    return (c >= 0xA1 && c <= 0xBF && c != 0xAA && c != 0xB5 && c != 0xBA) || (c >= 0x2010 && c <= 0x2027) ||
           (c >= 0x2030 && c <= 0x205E) || (c >= 0x3001 && c <= 0x3003) || c == 0xD7 || c == 0xF7;
}

inline bool is_word_char(char32_t c) noexcept { return !is_space(c) && !is_punct(c); }

inline std::u32string_view trim(std::u32string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return s.substr(b, e - b);
}

}  // namespace treeprompt::utf8
