// Copyright (C) 2026 The treeprompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "treeprompt/error.hpp"
#include "treeprompt/utf8.hpp"

namespace treeprompt {

struct SentenceRecord {
    std::size_t index = 0;
    std::string text;
    utf8::Span span;  // into SegmentedDocument::source_text, code points
    std::size_t paragraph_id = 0;
    std::size_t section_id = 0;

    friend bool operator==(const SentenceRecord&, const SentenceRecord&) = default;
};

struct SegmentedDocument {
    std::vector<SentenceRecord> sentences;
    std::string source_text;

    std::size_t paragraph_count() const {
        std::size_t n = 0;
        for (std::size_t i = 0; i < sentences.size(); ++i) {
            if (i == 0 || sentences[i].paragraph_id != sentences[i - 1].paragraph_id) ++n;
        }
        return n;
    }
    std::size_t section_count() const {
        std::size_t n = 0;
        for (std::size_t i = 0; i < sentences.size(); ++i) {
            if (i == 0 || sentences[i].section_id != sentences[i - 1].section_id) ++n;
        }
        return n;
    }

    friend bool operator==(const SegmentedDocument&, const SegmentedDocument&) = default;
};

struct SegmenterOptions {
    std::vector<std::string> abbreviations{"e.g.", "i.e.", "Dr.", "Mr.", "Ms.", "Fig.", "Eq.", "et al."};
    bool hash_headings = true;
    bool caps_headings = true;
    std::size_t max_caps_heading_words = 8;
};

namespace detail {

inline bool is_sentence_terminal(char32_t c) { return c == U'.' || c == U'!' || c == U'?'; }

inline bool is_closing_mark(char32_t c) {
    return c == U'"' || c == U'\'' || c == U')' || c == U']' || c == U'}' || c == 0x201D || c == 0x2019 ||
           c == 0xBB;
}

inline bool is_heading(std::u32string_view line, const SegmenterOptions& opts) {
    auto t = utf8::trim(line);
    if (t.empty()) return false;
    if (opts.hash_headings && t.front() == U'#') return true;
    if (!opts.caps_headings || is_sentence_terminal(t.back())) return false;
    std::size_t upper = 0;
    std::size_t words = 0;
    bool in_word = false;
    for (char32_t c : t) {
        if (c >= U'a' && c <= U'z') return false;
        if (c >= U'A' && c <= U'Z') ++upper;
        bool space = utf8::is_space(c);
        if (!space && !in_word) ++words;
        in_word = !space;
    }
    return upper >= 2 && words <= opts.max_caps_heading_words;
}

inline bool ends_with_abbreviation(std::u32string_view text, std::size_t sentence_start, std::size_t dot_end,
                                   const std::vector<std::u32string>& abbreviations) {
    for (const auto& abbr : abbreviations) {
        if (abbr.size() > dot_end - sentence_start) continue;
        std::size_t begin = dot_end - abbr.size();
        if (text.substr(begin, abbr.size()) != abbr) continue;
        if (begin == sentence_start || utf8::is_space(text[begin - 1])) return true;
    }
    return false;
}

/// Sentence spans within [begin, end) of `text`.
inline std::vector<utf8::Span> split_sentences(std::u32string_view text, std::size_t begin, std::size_t end,
                                               const std::vector<std::u32string>& abbreviations) {
    std::vector<utf8::Span> out;
    auto emit = [&](std::size_t s, std::size_t e) {
        while (s < e && utf8::is_space(text[s])) ++s;
        while (e > s && utf8::is_space(text[e - 1])) --e;
        if (e > s) out.push_back({s, e});
    };
    std::size_t start = begin;
    std::size_t i = begin;
    while (i < end) {
        if (!is_sentence_terminal(text[i])) {
            ++i;
            continue;
        }
        std::size_t run_end = i + 1;
        while (run_end < end && is_sentence_terminal(text[run_end])) ++run_end;
        std::size_t stop = run_end;
        while (stop < end && is_closing_mark(text[stop])) ++stop;
        bool at_boundary = stop == end || utf8::is_space(text[stop]);
        if (at_boundary && run_end == i + 1 && text[i] == U'.') {
            std::size_t s = start;
            while (s < i && utf8::is_space(text[s])) ++s;
            if (ends_with_abbreviation(text, s, i + 1, abbreviations)) at_boundary = false;
        }
        if (at_boundary) {
            emit(start, stop);
            start = stop;
        }
        i = stop;
    }
    emit(start, end);
    return out;
}

}  // namespace detail

/// Splits raw text into sections (heading lines), paragraphs (blank lines),
/// and sentences (terminal punctuation followed by whitespace or end of
/// text). Heading lines delimit sections and are not emitted as sentences.
/// Paragraph and section ids are dense and document-global.
inline SegmentedDocument segment(std::string_view text, const SegmenterOptions& opts = {}) {
    SegmentedDocument doc;
    doc.source_text = std::string(text);
    const std::u32string chars = utf8::decode(text);

    std::vector<std::u32string> abbreviations;
    abbreviations.reserve(opts.abbreviations.size());
    for (const auto& a : opts.abbreviations) abbreviations.push_back(utf8::decode(a));

    std::size_t next_section = 0;
    std::size_t next_paragraph = 0;
    bool section_open = false;
    std::size_t section_id = 0;

    bool in_block = false;
    std::size_t block_begin = 0;
    std::size_t block_end = 0;

    auto flush = [&] {
        if (!in_block) return;
        in_block = false;
        auto spans = detail::split_sentences(chars, block_begin, block_end, abbreviations);
        if (spans.empty()) return;
        if (!section_open) {
            section_id = next_section++;
            section_open = true;
        }
        std::size_t paragraph_id = next_paragraph++;
        for (const auto& span : spans) {
            SentenceRecord rec;
            rec.index = doc.sentences.size();
            rec.text = utf8::substr(chars, span);
            rec.span = span;
            rec.paragraph_id = paragraph_id;
            rec.section_id = section_id;
            doc.sentences.push_back(std::move(rec));
        }
    };

    std::size_t line_begin = 0;
    while (line_begin <= chars.size()) {
        std::size_t line_end = chars.find(U'\n', line_begin);
        if (line_end == std::u32string::npos) line_end = chars.size();
        std::u32string_view line(chars.data() + line_begin, line_end - line_begin);

        if (utf8::trim(line).empty()) {
            flush();
        } else if (detail::is_heading(line, opts)) {
            flush();
            section_open = false;
        } else {
            if (!in_block) {
                in_block = true;
                block_begin = line_begin;
            }
            block_end = line_end;
        }
        if (line_end == chars.size()) break;
        line_begin = line_end + 1;
    }
    flush();
    return doc;
}

/// Checks every SegmentedDocument invariant; throws Error("segmenter", ...)
/// naming the first violation.
inline void validate(const SegmentedDocument& doc) {
    const auto source = utf8::decode(doc.source_text);
    for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
        const auto& s = doc.sentences[i];
        if (s.index != i) {
            throw Error("segmenter", "sentence indices must be dense 0..m-1, found " + std::to_string(s.index), i);
        }
        if (s.span.end < s.span.start || s.span.end > source.size()) {
            throw Error("segmenter", "sentence span outside the source text", i);
        }
        if (utf8::substr(source, s.span) != s.text) {
            throw Error("segmenter", "sentence text does not match its span in the source text", i);
        }
        if (i == 0) continue;
        const auto& prev = doc.sentences[i - 1];
        if (s.section_id < prev.section_id) {
            throw Error("segmenter", "structure-order error: section ids decrease", i);
        }
        if (s.paragraph_id < prev.paragraph_id) {
            throw Error("segmenter", "structure-order error: paragraph ids decrease", i);
        }
        if (s.section_id != prev.section_id && s.paragraph_id == prev.paragraph_id) {
            throw Error("segmenter", "paragraph " + std::to_string(s.paragraph_id) + " spans two sections", i);
        }
        if (s.span.start < prev.span.end || s.span.start <= prev.span.start) {
            throw Error("segmenter", "sentence spans overlap or are out of order", i);
        }
    }
}

inline nlohmann::json to_json(const SegmentedDocument& doc) {
    nlohmann::json sentences = nlohmann::json::array();
    for (const auto& s : doc.sentences) {
        sentences.push_back({{"index", s.index},
                             {"text", s.text},
                             {"paragraph", s.paragraph_id},
                             {"section", s.section_id},
                             {"start", s.span.start},
                             {"end", s.span.end}});
    }
    return {{"source_text", doc.source_text}, {"sentences", std::move(sentences)}};
}

/// Ingests a pre-segmented record `{"sentences": [{text, paragraph, section}]}`
/// without running the heuristics. `index`, `start`/`end` and `source_text`
/// are optional; when absent, spans are located in the source text (or a
/// source text is synthesized by joining sentences).
inline SegmentedDocument load_segmented(const nlohmann::json& record) {
    if (!record.is_object() || !record.contains("sentences") || !record["sentences"].is_array()) {
        throw Error("segmenter", "pre-segmented record must be an object with a 'sentences' array");
    }
    const auto& rows = record["sentences"];
    SegmentedDocument doc;
    bool any_span = false;
    bool all_spans = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (!row.is_object() || !row.contains("text") || !row.contains("paragraph") || !row.contains("section")) {
            throw Error("segmenter", "sentence record needs text, paragraph and section fields", i);
        }
        SentenceRecord s;
        try {
            s.index = row.value("index", i);
            s.text = row.at("text").get<std::string>();
            s.paragraph_id = row.at("paragraph").get<std::size_t>();
            s.section_id = row.at("section").get<std::size_t>();
            bool has_span = row.contains("start") && row.contains("end");
            any_span = any_span || has_span;
            all_spans = all_spans && has_span;
            if (has_span) s.span = {row.at("start").get<std::size_t>(), row.at("end").get<std::size_t>()};
        } catch (const nlohmann::json::exception& e) {
            throw Error("segmenter", std::string("malformed sentence record: ") + e.what(), i);
        }
        doc.sentences.push_back(std::move(s));
    }
    if (any_span && !all_spans) {
        throw Error("segmenter", "either every sentence or no sentence may carry start/end offsets");
    }

    if (record.contains("source_text")) {
        doc.source_text = record["source_text"].get<std::string>();
        if (!any_span) {
            const auto source = utf8::decode(doc.source_text);
            std::size_t cursor = 0;
            for (auto& s : doc.sentences) {
                auto text = utf8::decode(s.text);
                auto pos = source.find(text, cursor);
                if (pos == std::u32string::npos) {
                    throw Error("segmenter", "sentence text not found in source_text", s.index);
                }
                s.span = {pos, pos + text.size()};
                cursor = s.span.end;
            }
        }
    } else {
        if (any_span) throw Error("segmenter", "start/end offsets require a source_text field");
        std::u32string source;
        for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
            auto& s = doc.sentences[i];
            if (i > 0) {
                bool same_paragraph = s.paragraph_id == doc.sentences[i - 1].paragraph_id;
                source += same_paragraph ? U" " : U"\n\n";
            }
            auto text = utf8::decode(s.text);
            s.span = {source.size(), source.size() + text.size()};
            source += text;
        }
        doc.source_text = utf8::encode(source);
    }
    validate(doc);
    return doc;
}

}  // namespace treeprompt
