// Copyright (C) 2026 The treeprompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <sstream>
#include <vector>

#include "treeprompt/error.hpp"
#include "treeprompt/global_tree.hpp"

namespace treeprompt {

struct AdjustmentParams {
    double a1 = 4.0;  // exponent on the inherited segment value
    double a2 = 100.0;  // multiplier for first-child segments

    /// Typical ranges are 0 <= a1 <= 5 and 1 <= a2 <= 1000; anything else is
    /// refused unless `unsafe` is set.
    void validate(bool unsafe = false) const {
        if (!std::isfinite(a1) || !std::isfinite(a2)) throw Error("adjustment", "a1 and a2 must be finite");
        if (unsafe) return;
        if (a1 < 0.0 || a1 > 5.0) throw Error("adjustment", "a1 outside [0, 5] (pass --unsafe-params to override)");
        if (a2 < 1.0 || a2 > 1000.0) {
            throw Error("adjustment", "a2 outside [1, 1000] (pass --unsafe-params to override)");
        }
    }
};

/// Post-order averaging. A virtual node stores the mean of its children's
/// returned values in e_adjusted; an actual node returns the mean of its
/// children's values and its own e_aligned without being modified.
/// Returns the per-node returned value N.
inline std::vector<double> rootward(GlobalTree& tree) {
    std::vector<double> returned(tree.size(), 0.0);
    // Children always carry larger ids than their parent.
    for (std::size_t i = tree.size(); i-- > 0;) {
        auto& node = tree.nodes[i];
        double sum = 0.0;
        for (NodeId c : node.children) sum += returned[c];
        std::size_t count = node.children.size();
        if (node.is_virtual()) {
            double mean = count == 0 ? 0.0 : sum / static_cast<double>(count);
            node.e_adjusted = mean;
            returned[i] = mean;
        } else {
            sum += node.e_aligned;
            returned[i] = sum / static_cast<double>(count + 1);
        }
    }
    return returned;
}

/// Pre-order pass carrying M (1 at the root). A virtual node multiplies M by
/// its e_adjusted, and by a2 when it is the first child of its parent. An
/// actual node becomes e_aligned + M^a1 and passes M through unchanged.
/// Returns the M each node hands to its children.
inline std::vector<double> leafward(GlobalTree& tree, const AdjustmentParams& params) {
    std::vector<double> carried(tree.size(), 1.0);
    for (std::size_t i = 0; i < tree.size(); ++i) {
        auto& node = tree.nodes[i];
        double m = node.is_root() ? 1.0 : carried[node.parent];
        if (node.is_virtual()) {
            m *= node.e_adjusted;
            if (tree.is_first_child(node.id)) m *= params.a2;
        } else {
            double boost = std::pow(m, params.a1);
            if (!std::isfinite(boost)) {
                std::ostringstream msg;
                msg << "M^a1 overflows at node " << node.id << " ('" << node.token_text << "'): M=" << m
                    << " a1=" << params.a1 << " a2=" << params.a2;
                throw Error("adjustment", msg.str(), node.sentence_index);
            }
            node.e_adjusted = node.e_aligned + boost;
        }
        carried[i] = m;
    }
    return carried;
}

inline void adjust(GlobalTree& tree, const AdjustmentParams& params) {
    rootward(tree);
    leafward(tree, params);
}

/// Ablation switch: actual nodes keep their aligned values.
inline void skip_adjustment(GlobalTree& tree) {
    for (auto& node : tree.nodes) node.e_adjusted = node.is_virtual() ? 0.0 : node.e_aligned;
}

}  // namespace treeprompt
