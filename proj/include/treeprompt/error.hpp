// Copyright (C) 2026 The treeprompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace treeprompt {

/// Error raised by any pipeline stage. Carries the stage name and, where one
/// applies, the sentence the failure was detected in.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& message, std::optional<std::size_t> sentence = std::nullopt)
        : std::runtime_error(format(module, message, sentence)),
          module_(std::move(module)),
          sentence_(sentence) {}

    const std::string& module() const noexcept { return module_; }
    std::optional<std::size_t> sentence() const noexcept { return sentence_; }

private:
    static std::string format(const std::string& module, const std::string& message,
                              std::optional<std::size_t> sentence) {
        std::string out = module;
        if (sentence) {
            out += " [sentence " + std::to_string(*sentence) + "]";
        }
        out += ": ";
        out += message;
        return out;
    }

    std::string module_;
    std::optional<std::size_t> sentence_;
};

}  // namespace treeprompt
