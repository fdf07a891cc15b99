// Copyright (C) 2026 The treeprompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "treeprompt/evalkit.hpp"
#include "treeprompt/pipeline.hpp"

namespace treeprompt {

/// Shortest decimal form that round-trips, e.g. 0.5 -> "0.5".
inline std::string format_ratio(double ratio) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, ratio);
    return std::string(buf, end);
}

inline std::string compressed_file_name(double ratio) { return "compressed_" + format_ratio(ratio) + ".txt"; }

inline nlohmann::json to_json(const MetricReport& m) {
    return {{"bleu", m.bleu.bleu},
            {"bleu_1", m.bleu.precisions[0]},
            {"bleu_2", m.bleu.precisions[1]},
            {"bleu_3", m.bleu.precisions[2]},
            {"bleu_4", m.bleu.precisions[3]},
            {"rouge1", m.rouge.rouge1},
            {"rouge2", m.rouge.rouge2},
            {"rougeL", m.rouge.rougeL},
            {"tokens", m.tokens},
            {"inv_ratio", m.inv_ratio}};
}

/// One record per ratio: ratio, budget, realized_length, realized_ratio,
/// objective_value, retained_token_count, retained_node_ids, output_path and,
/// when evaluated, metrics.
inline nlohmann::json ratio_record(const CompressionResult& r, const std::string& output_path,
                                   const std::optional<MetricReport>& metrics) {
    nlohmann::json rec = {{"ratio", r.ratio},
                          {"budget", r.budget},
                          {"realized_length", r.realized_length},
                          {"realized_ratio", r.realized_ratio},
                          {"objective_value", r.objective_value},
                          {"retained_token_count", r.retained_tokens.size()},
                          {"retained_node_ids", r.retained},
                          {"output_path", output_path}};
    rec["metrics"] = metrics ? to_json(*metrics) : nlohmann::json(nullptr);
    if (r.warning) rec["warning"] = *r.warning;
    return rec;
}

}  // namespace treeprompt
