// Copyright (C) 2026 The treeprompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "treeprompt/error.hpp"
#include "treeprompt/scoring.hpp"
#include "treeprompt/utf8.hpp"

namespace treeprompt {

/// Environment variable holding a bearer token for the remote scorer.
inline constexpr const char* kScorerTokenEnv = "TREEPROMPT_SCORER_TOKEN";

/// Parses a scorer response body
/// `{"tokens": [{"text", "start", "end", "entropy"}, ...]}` where offsets are
/// code points into `sentence`.
inline ScoredSentence parse_scorer_response(std::string_view body, std::string_view sentence,
                                            std::size_t sentence_index) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw Error("scoring", std::string("malformed scorer response: ") + e.what(), sentence_index);
    }
    if (!doc.is_object() || !doc.contains("tokens") || !doc["tokens"].is_array()) {
        throw Error("scoring", "malformed scorer response: missing 'tokens' array", sentence_index);
    }
    ScoredSentence out;
    try {
        for (const auto& t : doc["tokens"]) {
            out.push_back({t.at("text").get<std::string>(),
                           {t.at("start").get<std::size_t>(), t.at("end").get<std::size_t>()},
                           t.at("entropy").get<double>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error("scoring", std::string("malformed scorer response: ") + e.what(), sentence_index);
    }
    validate_scored(out, utf8::decode(sentence), sentence_index);
    return out;
}

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

inline Endpoint parse_endpoint(std::string_view url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos) throw Error("scoring", "endpoint must be an absolute http URL");
    auto scheme = url.substr(0, scheme_end);
    if (scheme != "http") {
        throw Error("scoring", "unsupported endpoint scheme '" + std::string(scheme) + "' (only http is built in)");
    }
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string_view::npos) return {std::string(url), "/"};
    return {std::string(url.substr(0, path_start)), std::string(url.substr(path_start))};
}

/// Scores sentences by POSTing `{"sentence": text}` to an HTTP endpoint.
/// Each call opens its own connection, so calls may run concurrently.
class RemoteProvider final : public EntropyProvider {
public:
    explicit RemoteProvider(std::string url, std::optional<std::string> bearer_token = std::nullopt)
        : endpoint_(parse_endpoint(url)), url_(std::move(url)), token_(std::move(bearer_token)) {
        if (!token_) {
            if (const char* env = std::getenv(kScorerTokenEnv); env != nullptr && *env != '\0') token_ = env;
        }
    }

    ScoredSentence score_sentence(std::string_view sentence, std::size_t sentence_index) const override {
        httplib::Client client(endpoint_.origin);
        client.set_connection_timeout(10);
        client.set_read_timeout(60);
        httplib::Headers headers;
        if (token_) headers.emplace("Authorization", "Bearer " + *token_);
        const std::string body = nlohmann::json{{"sentence", sentence}}.dump();
        auto res = client.Post(endpoint_.path, headers, body, "application/json");
        if (!res) {
            throw Error("scoring", "transport failure contacting " + url_ + ": " + httplib::to_string(res.error()),
                        sentence_index);
        }
        if (res->status < 200 || res->status >= 300) {
            throw Error("scoring", "scorer returned HTTP " + std::to_string(res->status), sentence_index);
        }
        return parse_scorer_response(res->body, sentence, sentence_index);
    }

private:
    Endpoint endpoint_;
    std::string url_;
    std::optional<std::string> token_;
};

}  // namespace treeprompt
