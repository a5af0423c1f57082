// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>

#include "plm/data.hpp"
#include "plm/network.hpp"

namespace plm {

/// Ordinary least squares fit; coefficients are (intercept, slope_1, ...).
struct LinearModel {
    std::vector<double> coefficients;
    bool rank_deficient = false;

    double predict(std::span<const double> x) const;
};

/// Minimizes the sum of squared residuals through a rank-revealing
/// orthogonal decomposition; rank-deficient designs get the minimum-norm
/// solution with rank_deficient set.
LinearModel fit_linear(const Dataset& train);

/// Fixed-topology net trained by plain full-batch gradient descent with the
/// Adam-style update for exactly `epochs` epochs -- no growth, no pruning,
/// no tolerance gate. Returns the lowest-loss weights seen, so more epochs
/// never report a worse training loss.
TwoLayerNet fit_backprop_2lnn(const Dataset& train, std::size_t p_fixed, std::size_t epochs,
                              std::uint64_t seed, double eta = 1e-2);

/// Mean absolute error of an arbitrary predictor over a dataset.
double mae(const std::function<double(std::span<const double>)>& predict, const Dataset& ds);

struct MajoritySplitMae {
    double majority = 0.0;
    std::optional<double> non_majority;  // absent when the trim is empty
};

/// Sorts the rows by squared residual ascending and reports the MAE of the
/// first `majority_count` rows and of the remainder.
MajoritySplitMae mae_majority_split(const TwoLayerNet& net, const Dataset& train,
                                    std::size_t majority_count);

}  // namespace plm
