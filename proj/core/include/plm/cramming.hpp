// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "plm/network.hpp"

namespace plm {

class Rng;

/// Separating direction and offset used to build the three cramming nodes.
/// gamma is a unit vector; zeta is strictly positive and strictly below
/// |gamma . (x^c - x_target)| for every non-target batch instance, so each
/// of those instances lands outside the (-zeta, zeta) slab around the
/// target along gamma.
struct CramParams {
    std::vector<double> gamma;
    double zeta = 0.0;
};

struct CramConfig {
    /// zeta as a fraction of the smallest projected separation. Must be in
    /// (0, 1); 0.5 balances the slab margin against the 1/zeta output
    /// weights.
    double zeta_fraction = 0.5;
    /// Directions whose smallest projected separation falls below
    /// separation_floor_scale * (max coordinate deviation) are redrawn.
    double separation_floor_scale = 1e-9;
    std::size_t max_attempts = 100;
};

/// Draws gamma uniformly on the unit sphere (normalized Gaussian sample)
/// until every non-target instance projects at least the separation floor
/// away from the target, then sets zeta = zeta_fraction * min separation.
///
/// Throws DegenerateInstanceError if another instance shares the target's
/// input vector exactly (no direction can separate them), and
/// SamplingFailureError after max_attempts rejected draws (near-duplicate
/// inputs).
CramParams find_cram_params(const Batch& batch, std::size_t target_pos, Rng& rng,
                            const CramConfig& cfg = {});

/// Appends the three hidden nodes that make instance `target_pos` fit
/// exactly while leaving every other batch instance's output unchanged:
/// rows (zeta - g.x, g), (-g.x, g), (-zeta - g.x, g) with output weights
/// d/zeta, -2d/zeta, d/zeta where d = y - f(x) at the target.
///
/// If `epsilon` is given, verifies the entry precondition that every
/// non-target instance is acceptable (throws InvalidStateError otherwise).
/// Params are always validated against the batch.
TwoLayerNet cram(const TwoLayerNet& net, const Batch& batch, std::size_t target_pos,
                 const CramParams& params, std::optional<double> epsilon = std::nullopt);

}  // namespace plm
