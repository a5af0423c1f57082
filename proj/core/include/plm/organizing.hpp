// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <utility>

#include "plm/agdo.hpp"
#include "plm/network.hpp"

namespace plm {

struct OrganizeConfig {
    std::size_t reg_epochs = 100;  // regularizing step budget (0 disables it)
    double lambda = 1e-4;          // weight-penalty coefficient
    double eta_init = 1e-3;        // regularizing-phase learning rate
    double epsilon = 0.04836;
    double epsilon1 = 1e-7;
    AgdoConfig agdo;  // settings for the pruning-phase understanding calls
};

/// What happened to one prune attempt inside organize().
struct PruneEvent {
    std::size_t node = 0;  // index at attempt time
    bool kept = false;
    std::size_t p_before = 0;
    std::size_t p_after = 0;
    /// On a rejected prune: whether the restored weights compare equal to
    /// the pre-attempt snapshot. Always true for kept prunes.
    bool restored_identical = true;
};
using PruneObserver = std::function<void(const PruneEvent&)>;

/// Shrinks weight magnitudes under the penalized loss while never letting
/// any batch instance leave the tolerance band: every step that would break
/// acceptability is undone with the learning rate halved. Requires an
/// acceptable entry net and returns an acceptable net.
TwoLayerNet regularize(const TwoLayerNet& net, const Batch& batch, const OrganizeConfig& cfg);

/// Removes hidden node k and lets the understanding loop try to restore
/// acceptability on the reduced net. Returns (reduced net, true) on success
/// and (entry net unchanged, false) otherwise; a net with a single hidden
/// node is never pruned.
std::pair<TwoLayerNet, bool> try_prune_node(const TwoLayerNet& net, const Batch& batch,
                                            std::size_t k, const OrganizeConfig& cfg);

struct OrganizeResult {
    TwoLayerNet net;
    std::size_t prunes = 0;
};

/// Regularizes once, then sweeps the hidden nodes in ascending order trying
/// to prune each (a successful removal shifts the later nodes down, so the
/// sweep index stays put on success). The result is acceptable and never
/// larger than the entry net.
OrganizeResult organize(const TwoLayerNet& net, const Batch& batch, const OrganizeConfig& cfg,
                        const PruneObserver& observer = {});

}  // namespace plm
