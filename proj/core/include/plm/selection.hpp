// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "plm/network.hpp"

namespace plm {

/// Instance ordering principle for interpret()/pick().
///   lts         -- sort by squared residual, ascending (least trimmed squares)
///   pre_ordered -- keep the original dataset order
enum class OrderMode { lts, pre_ordered };

/// Result of interpreting a dataset under the current net.
///
/// `perm[c]` is the position (into the interpreted batch) of the c-th
/// instance in the chosen order, `sq_residuals[c]` its squared residual.
/// `n_acceptable` is the length of the maximal prefix whose instances all
/// satisfy |e| <= epsilon; in LTS order this equals the total number of
/// acceptable instances.
struct ResidualOrder {
    std::vector<std::size_t> perm;
    std::vector<double> sq_residuals;
    std::size_t n_acceptable = 0;
};

/// Orders every instance of `all` by the chosen mode and counts the
/// acceptable prefix. Residual ties in LTS mode break by ascending position,
/// so the result is deterministic.
ResidualOrder interpret(const TwoLayerNet& net, const Batch& all, double epsilon,
                        OrderMode mode);

/// Selects the first n instances of the order as the stage batch I(n); the
/// returned batch carries the instances' original dataset indices. When
/// n == n_acceptable + 1 the batch contains exactly one unacceptable
/// instance, in the last position.
Batch pick(const ResidualOrder& order, std::size_t n, const Batch& all);

}  // namespace plm
