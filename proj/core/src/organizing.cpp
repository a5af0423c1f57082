// SPDX-License-Identifier: Apache-2.0
#include "plm/organizing.hpp"

#include <optional>

#include "plm/errors.hpp"

namespace plm {

TwoLayerNet regularize(const TwoLayerNet& net, const Batch& batch, const OrganizeConfig& cfg) {
    if (!acceptable(net, batch, cfg.epsilon)) {
        throw InvalidStateError("regularize requires an acceptable entry net");
    }
    if (cfg.reg_epochs == 0) return net;
    if (cfg.lambda <= 0.0) {
        throw InvalidInputError("regularize with a nonzero budget needs lambda > 0");
    }

    AgdoConfig reg;
    reg.eta_init = cfg.eta_init;
    reg.epsilon = cfg.epsilon;
    reg.epsilon1 = cfg.epsilon1;
    reg.max_outer = 1;
    reg.inner_epochs = cfg.reg_epochs;
    reg.beta1 = cfg.agdo.beta1;
    reg.beta2 = cfg.agdo.beta2;
    reg.adam_eps = cfg.agdo.adam_eps;
    reg.lambda = cfg.lambda;
    return agdo_run(net, batch, reg, /*preserve_acceptability=*/true).final_net;
}

std::pair<TwoLayerNet, bool> try_prune_node(const TwoLayerNet& net, const Batch& batch,
                                            std::size_t k, const OrganizeConfig& cfg) {
    if (!acceptable(net, batch, cfg.epsilon)) {
        throw InvalidStateError("try_prune_node requires an acceptable entry net");
    }
    if (net.hidden_nodes() < 2) return {net, false};

    AgdoConfig understand = cfg.agdo;
    understand.epsilon = cfg.epsilon;
    understand.epsilon1 = cfg.epsilon1;
    understand.lambda = 0.0;

    AgdoExit exit = agdo_run(remove_hidden_node(net, k), batch, understand);
    if (exit.tag == AgdoTag::acceptable) return {std::move(exit.final_net), true};
    return {net, false};
}

OrganizeResult organize(const TwoLayerNet& net, const Batch& batch, const OrganizeConfig& cfg,
                        const PruneObserver& observer) {
    OrganizeResult result{regularize(net, batch, cfg), 0};

    std::size_t k = 0;
    while (result.net.hidden_nodes() >= 2 && k < result.net.hidden_nodes()) {
        const std::size_t p_before = result.net.hidden_nodes();
        std::optional<TwoLayerNet> snapshot;
        if (observer) snapshot = result.net;
        auto [candidate, kept] = try_prune_node(result.net, batch, k, cfg);
        if (observer) {
            observer({k, kept, p_before, candidate.hidden_nodes(),
                      kept ? true : candidate == *snapshot});
        }
        result.net = std::move(candidate);
        if (kept) {
            ++result.prunes;
            // The node that followed k now sits at index k; stay put.
        } else {
            ++k;
        }
    }

    if (!acceptable(result.net, batch, cfg.epsilon)) {
        throw InvalidStateError("organize postcondition violated: net left the tolerance band");
    }
    return result;
}

}  // namespace plm
