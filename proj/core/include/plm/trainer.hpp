// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "plm/cramming.hpp"
#include "plm/network.hpp"
#include "plm/selection.hpp"

namespace plm {

/// Everything a training run depends on. The defaults are the reference
/// settings: tolerance 0.04836, learning rates 1e-2 (understanding) and
/// 1e-3 (organizing), rate floor 1e-7, stop once 97% of the data fits.
struct PlmConfig {
    double epsilon = 0.04836;
    double epsilon1 = 1e-7;
    double eta_understanding = 1e-2;
    double eta_organizing = 1e-3;
    double stop_fraction = 0.97;
    OrderMode mode = OrderMode::lts;
    std::size_t reg_epochs = 100;
    double lambda = 1e-4;
    std::size_t init_epochs = 100;  // inner epochs of the initialization tuning call
    std::uint64_t seed = 0;

    // Optimizer internals shared by every adaptive-descent call.
    std::size_t max_outer = 50;
    std::size_t inner_epochs = 100;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;

    // Budgets for the pruning-phase understanding calls. Organizing retries
    // every hidden node each stage and a failed attempt always burns its
    // whole budget, so these default lower than the main loop's budgets;
    // set prune_max_outer = max_outer to retune prunes at full patience.
    std::size_t prune_max_outer = 10;
    std::size_t prune_inner_epochs = 100;

    CramConfig cram;

    /// Re-verify the stage tolerance guarantee at every checkpoint
    /// (after interpreting, understanding, cramming, organizing).
    bool check_invariants = true;
};

enum class Route { understanding, cramming };

struct StageRecord {
    std::size_t stage = 0;     // 1-based
    std::size_t n = 0;         // |I(n)| learned this stage
    std::size_t p_before = 0;  // hidden nodes entering the stage
    std::size_t p_after = 0;   // hidden nodes after organizing
    Route route = Route::understanding;
    std::size_t prunes = 0;
    double d_n = 0.0;  // max |e| over I(n) at stage end
    double wall_ms = 0.0;
};

struct TrainReport {
    std::vector<StageRecord> stages;
    TwoLayerNet final_net{1, 1};
    std::size_t dataset_size = 0;
    std::size_t n_acceptable = 0;  // acceptable-prefix length at termination
    std::size_t understanding_count = 0;
    std::size_t cramming_count = 0;
    /// Instances excluded as unlearnable (duplicate inputs whose targets
    /// are compatible at tolerance but which cramming cannot separate).
    std::vector<std::size_t> skipped_indices;
    std::size_t invariant_checks = 0;  // tolerance checkpoints that were verified
    double total_ms = 0.0;

    /// Route shares in percent; meaningful only when stages is non-empty.
    double understanding_pct() const;
    double cramming_pct() const;
};

/// One-hidden-node net with weights uniform in [-0.5, 0.5] (seeded), tuned
/// over the full dataset by the adaptive loop; acceptability at exit is not
/// required.
TwoLayerNet initialize(const Batch& dataset, const PlmConfig& cfg);

/// Runs the full sequential procedure: interpret, stop check, pick,
/// understand-or-cram, organize, repeat. Every stage ends with all of I(n)
/// inside the tolerance band; the loop stops once the acceptable prefix
/// reaches floor(stop_fraction * N).
///
/// Throws DegenerateInstanceError if two instances share one input with
/// targets further apart than 2 * epsilon (no function fits both).
TrainReport train(const Batch& dataset, const PlmConfig& cfg);

}  // namespace plm
