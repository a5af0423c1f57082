// SPDX-License-Identifier: Apache-2.0
#include "plm/cramming.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "plm/errors.hpp"
#include "plm/rng.hpp"

namespace plm {

namespace {

// Original dataset id of batch position c; falls back to the position for
// hand-built batches without an index set.
std::size_t id_of(const Batch& batch, std::size_t c) {
    return c < batch.index_set.size() ? batch.index_set[c] : c;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
    return s;
}

// Largest coordinate deviation between the target and any other instance;
// the scale on which "tiny" separations are judged.
double input_scale(const Batch& batch, std::size_t target_pos) {
    const auto& xt = batch.instances[target_pos].x;
    double scale = 0.0;
    for (std::size_t c = 0; c < batch.size(); ++c) {
        if (c == target_pos) continue;
        const auto& x = batch.instances[c].x;
        for (std::size_t j = 0; j < xt.size(); ++j) {
            scale = std::max(scale, std::abs(x[j] - xt[j]));
        }
    }
    return scale;
}

}  // namespace

CramParams find_cram_params(const Batch& batch, std::size_t target_pos, Rng& rng,
                            const CramConfig& cfg) {
    if (target_pos >= batch.size()) throw InvalidInputError("cram target out of range");
    if (cfg.zeta_fraction <= 0.0 || cfg.zeta_fraction >= 1.0) {
        throw InvalidInputError("zeta_fraction must lie in (0, 1)");
    }
    const auto& target = batch.instances[target_pos];
    const std::size_t m = target.x.size();

    for (std::size_t c = 0; c < batch.size(); ++c) {
        if (c == target_pos) continue;
        if (batch.instances[c].x == target.x) {
            throw DegenerateInstanceError(
                "instances " + std::to_string(id_of(batch, c)) + " and " +
                    std::to_string(id_of(batch, target_pos)) +
                    " share one input vector; no direction separates them",
                id_of(batch, c), id_of(batch, target_pos));
        }
    }

    const double floor = cfg.separation_floor_scale * input_scale(batch, target_pos);

    CramParams params;
    params.gamma.resize(m);
    for (std::size_t attempt = 0; attempt < cfg.max_attempts; ++attempt) {
        double norm_sq = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            params.gamma[j] = rng.normal();
            norm_sq += params.gamma[j] * params.gamma[j];
        }
        if (norm_sq <= 0.0) continue;
        const double inv_norm = 1.0 / std::sqrt(norm_sq);
        for (double& g : params.gamma) g *= inv_norm;

        double min_sep = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < batch.size(); ++c) {
            if (c == target_pos) continue;
            double t = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                t += params.gamma[j] * (batch.instances[c].x[j] - target.x[j]);
            }
            min_sep = std::min(min_sep, std::abs(t));
        }
        if (min_sep > floor && std::isfinite(min_sep)) {
            params.zeta = cfg.zeta_fraction * min_sep;
            if (params.zeta > 0.0) return params;
        }
    }
    throw SamplingFailureError(
        "no separating direction found in " + std::to_string(cfg.max_attempts) +
        " attempts; batch inputs are nearly coincident");
}

TwoLayerNet cram(const TwoLayerNet& net, const Batch& batch, std::size_t target_pos,
                 const CramParams& params, std::optional<double> epsilon) {
    if (target_pos >= batch.size()) throw InvalidInputError("cram target out of range");
    if (params.gamma.size() != net.inputs()) {
        throw InvalidInputError("gamma dimension does not match the network");
    }
    if (!(params.zeta > 0.0)) throw InvalidInputError("zeta must be positive");

    const auto& target = batch.instances[target_pos];

    // The construction only cancels for instances strictly outside the
    // (-zeta, zeta) slab; re-check the separation inequality here so a
    // stale params object fails loudly instead of corrupting outputs.
    for (std::size_t c = 0; c < batch.size(); ++c) {
        if (c == target_pos) continue;
        double t = 0.0;
        for (std::size_t j = 0; j < params.gamma.size(); ++j) {
            t += params.gamma[j] * (batch.instances[c].x[j] - target.x[j]);
        }
        if (!(std::abs(t) > params.zeta)) {
            throw InvalidStateError("cram params do not separate instance " +
                                    std::to_string(id_of(batch, c)));
        }
    }

    if (epsilon) {
        for (std::size_t c = 0; c < batch.size(); ++c) {
            if (c == target_pos) continue;
            if (std::abs(net.residual(batch.instances[c])) > *epsilon) {
                throw InvalidStateError(
                    "cram requires every non-target instance acceptable; instance " +
                    std::to_string(id_of(batch, c)) + " is not");
            }
        }
    }

    const double g_dot_xt = dot(params.gamma, target.x);
    const double d = target.y - net.forward(target.x);

    std::vector<std::vector<double>> rows(3);
    for (auto& row : rows) {
        row.reserve(params.gamma.size() + 1);
        row.push_back(0.0);
        row.insert(row.end(), params.gamma.begin(), params.gamma.end());
    }
    rows[0][0] = params.zeta - g_dot_xt;
    rows[1][0] = -g_dot_xt;
    rows[2][0] = -params.zeta - g_dot_xt;

    const double w = d / params.zeta;
    TwoLayerNet grown = add_hidden_nodes(net, rows, {w, -2.0 * w, w});
    if (!grown.all_finite()) {
        throw InvalidStateError("cram produced non-finite weights (zeta too small)");
    }
    return grown;
}

}  // namespace plm
