// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include "plm/network.hpp"

namespace plm {

/// Settings of the adaptive gradient-descent loop.
struct AgdoConfig {
    double eta_init = 1e-2;        // initial learning rate
    double epsilon = 0.04836;      // acceptability tolerance
    double epsilon1 = 1e-7;        // learning-rate floor; eta below it means exit U
    std::size_t max_outer = 50;    // outer iteration bound
    std::size_t inner_epochs = 100;  // Adam steps per outer iteration
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    double lambda = 0.0;  // > 0 optimizes the regularized loss
};

/// Exit A: every batch instance is within epsilon. Exit U: the loop gave up
/// (learning rate under epsilon1 or outer iterations exhausted).
enum class AgdoTag { acceptable, unacceptable };

struct AgdoExit {
    AgdoTag tag;
    TwoLayerNet final_net;
    std::size_t iterations_used = 0;  // outer iterations
    double final_eta = 0.0;
    double final_loss = 0.0;  // loss of final_net under the configured lambda
};

/// True iff max_c |f(x^c) - y^c| <= epsilon (inclusive bound).
bool acceptable(const TwoLayerNet& net, const Batch& batch, double epsilon);

/// max_c |f(x^c) - y^c| over the batch; the quantity the tolerance gates.
double max_abs_residual(const TwoLayerNet& net, const Batch& batch);

/// Adaptive gradient-descent loop. Each outer iteration runs inner_epochs
/// Adam steps, then tests acceptability (exit A) and loss improvement.
/// Non-improvement rolls the weights back to the best snapshot, halves eta,
/// and resets the Adam moments; eta < epsilon1 or an exhausted iteration
/// budget exits U with the best-seen weights. A non-finite loss or gradient
/// counts as non-improvement, never as a crash.
///
/// With preserve_acceptability set (regularizing use), the net must enter
/// acceptable; any single step that would break acceptability is undone and
/// eta halved, so every returned net still satisfies the tolerance. In that
/// mode the loop neither exits early on acceptability nor rolls back on
/// plain non-improvement; its budget is max_outer * inner_epochs attempted
/// steps, and exit U means the learning rate collapsed before the budget
/// was spent.
AgdoExit agdo_run(TwoLayerNet net, const Batch& batch, const AgdoConfig& cfg,
                  bool preserve_acceptability = false);

}  // namespace plm
