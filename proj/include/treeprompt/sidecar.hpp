// Copyright (C) 2026 The treeprompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "treeprompt/error.hpp"
#include "treeprompt/parse_ingest.hpp"
#include "treeprompt/scoring.hpp"
#include "treeprompt/segmenter.hpp"
#include "treeprompt/tokenize.hpp"

namespace treeprompt {

/// Reads precomputed entropies: `sentence_index<TAB>token<TAB>entropy` per
/// line, `#` comments and blank lines ignored. Rows must cover every sentence
/// of `doc` in order. A leading SentencePiece word marker (U+2581) on a token
/// is dropped before the token is located in its sentence.
inline std::vector<ScoredSentence> read_sidecar(std::string_view source, const SegmentedDocument& doc) {
    const std::size_t m = doc.sentences.size();
    std::vector<std::vector<std::pair<std::string, double>>> rows(m);
    std::size_t line_no = 0;
    std::size_t last_index = 0;
    bool any = false;

    std::size_t pos = 0;
    while (pos <= source.size()) {
        auto nl = source.find('\n', pos);
        if (nl == std::string_view::npos) nl = source.size();
        std::string_view line = source.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        const std::string where = "sidecar line " + std::to_string(line_no);

        if (!line.empty() && line.front() != '#') {
            auto t1 = line.find('\t');
            auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
            if (t2 == std::string_view::npos || line.find('\t', t2 + 1) != std::string_view::npos) {
                throw Error("scoring", where + ": expected 3 tab-separated fields");
            }
            std::size_t index = 0;
            if (!detail::parse_size(line.substr(0, t1), index)) {
                throw Error("scoring", where + ": bad sentence index");
            }
            std::string token(line.substr(t1 + 1, t2 - t1 - 1));
            auto field = line.substr(t2 + 1);
            double entropy = 0.0;
            auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), entropy);
            if (ec != std::errc() || ptr != field.data() + field.size()) {
                throw Error("scoring", where + ": bad entropy value", index);
            }
            if (!std::isfinite(entropy) || entropy < 0.0) {
                throw Error("scoring", where + ": entropy must be finite and non-negative", index);
            }
            if (index >= m) throw Error("scoring", where + ": sentence index beyond document", index);
            if (any && index < last_index) throw Error("scoring", where + ": sentence indices out of order", index);
            if (index > (any ? last_index + 1 : 0)) {
                throw Error("scoring", where + ": sentence index gap before " + std::to_string(index), index);
            }
            constexpr std::string_view kMarker = "\xE2\x96\x81";
            if (token.starts_with(kMarker)) token.erase(0, kMarker.size());
            rows[index].emplace_back(std::move(token), entropy);
            last_index = index;
            any = true;
        }
        if (nl == source.size()) break;
        pos = nl + 1;
    }
    if (m > 0 && (!any || last_index + 1 != m)) {
        throw Error("scoring", "sidecar is missing rows for the trailing sentences", any ? last_index + 1 : 0);
    }

    std::vector<ScoredSentence> out(m);
    for (std::size_t j = 0; j < m; ++j) {
        const auto text = utf8::decode(doc.sentences[j].text);
        std::vector<std::u32string> pieces;
        for (const auto& r : rows[j]) pieces.push_back(utf8::decode(r.first));
        std::vector<utf8::Span> spans;
        auto failed = locate_pieces(text, pieces, spans);
        if (failed != pieces.size()) {
            throw Error("scoring", "sidecar token '" + rows[j][failed].first + "' cannot be located in the sentence", j);
        }
        for (std::size_t k = 0; k < spans.size(); ++k) {
            out[j].push_back({std::move(rows[j][k].first), spans[k], rows[j][k].second});
        }
    }
    return out;
}

/// Inverse of read_sidecar; entropies are printed in shortest round-trip form.
inline std::string write_sidecar(const std::vector<ScoredSentence>& sentences) {
    std::string out = "# sentence_index\ttoken\tentropy\n";
    char buf[64];
    for (std::size_t j = 0; j < sentences.size(); ++j) {
        for (const auto& t : sentences[j]) {
            auto [end, ec] = std::to_chars(buf, buf + sizeof buf, t.entropy);
            out += std::to_string(j);
            out += '\t';
            out += t.text;
            out += '\t';
            out.append(buf, end);
            out += '\n';
        }
    }
    return out;
}

/// Serves entropies read from a sidecar file.
class SidecarProvider final : public EntropyProvider {
public:
    explicit SidecarProvider(std::vector<ScoredSentence> sentences) : sentences_(std::move(sentences)) {}

    ScoredSentence score_sentence(std::string_view, std::size_t sentence_index) const override {
        if (sentence_index >= sentences_.size()) {
            throw Error("scoring", "no sidecar entropies for this sentence", sentence_index);
        }
        return sentences_[sentence_index];
    }

private:
    std::vector<ScoredSentence> sentences_;
};

}  // namespace treeprompt
