// SPDX-License-Identifier: Apache-2.0
#include "plm/agdo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "plm/errors.hpp"

namespace plm {

namespace {

void validate(const AgdoConfig& cfg) {
    if (cfg.eta_init <= 0.0 || cfg.epsilon <= 0.0 || cfg.epsilon1 <= 0.0) {
        throw InvalidInputError("agdo: eta_init, epsilon and epsilon1 must be positive");
    }
    if (cfg.epsilon1 >= cfg.eta_init) {
        throw InvalidInputError("agdo: epsilon1 must be below eta_init");
    }
    if (cfg.max_outer < 1 || cfg.inner_epochs < 1) {
        throw InvalidInputError("agdo: iteration budgets must be >= 1");
    }
    if (cfg.beta1 < 0.0 || cfg.beta1 >= 1.0 || cfg.beta2 < 0.0 || cfg.beta2 >= 1.0) {
        throw InvalidInputError("agdo: beta1 and beta2 must lie in [0, 1)");
    }
    if (cfg.lambda < 0.0) throw InvalidInputError("agdo: lambda must be >= 0");
}

struct AdamState {
    std::vector<double> m1;
    std::vector<double> m2;
    long t = 0;

    explicit AdamState(std::size_t n) : m1(n, 0.0), m2(n, 0.0) {}

    void reset() {
        std::fill(m1.begin(), m1.end(), 0.0);
        std::fill(m2.begin(), m2.end(), 0.0);
        t = 0;
    }

    void step(TwoLayerNet& net, const std::vector<double>& grad, double eta,
              const AgdoConfig& cfg) {
        ++t;
        const double corr1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
        const double corr2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
        for (std::size_t i = 0; i < grad.size(); ++i) {
            m1[i] = cfg.beta1 * m1[i] + (1.0 - cfg.beta1) * grad[i];
            m2[i] = cfg.beta2 * m2[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
            const double mh = m1[i] / corr1;
            const double vh = m2[i] / corr2;
            net.param(i) -= eta * mh / (std::sqrt(vh) + cfg.adam_eps);
        }
    }
};

bool all_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

// Strict relative decrease; NaN or no decrease is non-improvement.
bool improved(double best, double cur) {
    return std::isfinite(cur) && cur < best && best - cur >= 1e-12 * best;
}

struct Evaluation {
    double loss = 0.0;     // regularized when lambda > 0
    double max_abs = 0.0;  // D over the batch
};

// One pass over the batch yields both the loss and the worst residual, so
// per-step acceptability tracking costs a single forward sweep.
Evaluation evaluate(const TwoLayerNet& net, const Batch& batch, double lambda) {
    Evaluation ev;
    double sum_sq = 0.0;
    for (const Instance& inst : batch.instances) {
        const double e = net.forward(inst.x) - inst.y;
        if (!std::isfinite(e)) {
            ev.max_abs = std::numeric_limits<double>::infinity();
            ev.loss = std::numeric_limits<double>::quiet_NaN();
            return ev;
        }
        sum_sq += e * e;
        ev.max_abs = std::max(ev.max_abs, std::abs(e));
    }
    ev.loss = sum_sq / static_cast<double>(batch.size());
    if (lambda > 0.0) ev.loss += lambda * net.weight_sq_norm();
    return ev;
}

AgdoExit run_constrained(TwoLayerNet net, const Batch& batch, const AgdoConfig& cfg) {
    if (!acceptable(net, batch, cfg.epsilon)) {
        throw InvalidStateError("agdo: constrained run requires an acceptable entry net");
    }

    TwoLayerNet best = net;
    double best_loss = loss_regularized(net, batch, cfg.lambda);
    double eta = cfg.eta_init;
    AdamState adam(net.param_count());
    std::vector<double> grad;
    std::size_t outer = 0;
    bool eta_collapsed = false;

    for (; outer < cfg.max_outer && !eta_collapsed; ++outer) {
        for (std::size_t e = 0; e < cfg.inner_epochs; ++e) {
            gradient_into(net, batch, cfg.lambda, grad);
            if (!all_finite(grad)) {
                adam.reset();
                eta *= 0.5;
                if (eta < cfg.epsilon1) {
                    eta_collapsed = true;
                    break;
                }
                continue;
            }
            const TwoLayerNet before = net;
            adam.step(net, grad, eta, cfg);
            const Evaluation ev = evaluate(net, batch, cfg.lambda);
            if (!net.all_finite() || !(ev.max_abs <= cfg.epsilon)) {
                net = before;
                adam.reset();
                eta *= 0.5;
                if (eta < cfg.epsilon1) {
                    eta_collapsed = true;
                    break;
                }
                continue;
            }
            if (improved(best_loss, ev.loss)) {
                best = net;
                best_loss = ev.loss;
            }
        }
    }

    return {eta_collapsed ? AgdoTag::unacceptable : AgdoTag::acceptable, std::move(best),
            outer, eta, best_loss};
}

}  // namespace

bool acceptable(const TwoLayerNet& net, const Batch& batch, double epsilon) {
    for (const Instance& inst : batch.instances) {
        const double e = net.residual(inst);
        if (!(std::abs(e) <= epsilon)) return false;  // NaN is unacceptable
    }
    return true;
}

double max_abs_residual(const TwoLayerNet& net, const Batch& batch) {
    double d = 0.0;
    for (const Instance& inst : batch.instances) {
        d = std::max(d, std::abs(net.residual(inst)));
    }
    return d;
}

AgdoExit agdo_run(TwoLayerNet net, const Batch& batch, const AgdoConfig& cfg,
                  bool preserve_acceptability) {
    validate(cfg);
    if (batch.empty()) throw InvalidInputError("agdo over an empty batch");

    if (preserve_acceptability) return run_constrained(std::move(net), batch, cfg);

    if (acceptable(net, batch, cfg.epsilon)) {
        const double l = loss_regularized(net, batch, cfg.lambda);
        return {AgdoTag::acceptable, std::move(net), 0, cfg.eta_init, l};
    }

    TwoLayerNet best = net;
    double best_loss = loss_regularized(net, batch, cfg.lambda);
    double eta = cfg.eta_init;
    AdamState adam(net.param_count());
    std::vector<double> grad;

    for (std::size_t outer = 1; outer <= cfg.max_outer; ++outer) {
        // Adam's normalized steps oscillate once near a minimum, so the
        // trajectory is sampled after every step: an acceptable point exits
        // immediately and the lowest-loss point is what "best seen" means.
        bool diverged = false;
        TwoLayerNet outer_best = net;
        double outer_best_loss = std::numeric_limits<double>::infinity();
        for (std::size_t e = 0; e < cfg.inner_epochs; ++e) {
            gradient_into(net, batch, cfg.lambda, grad);
            if (!all_finite(grad)) {
                diverged = true;
                break;
            }
            adam.step(net, grad, eta, cfg);
            if (!net.all_finite()) {
                diverged = true;
                break;
            }
            const Evaluation ev = evaluate(net, batch, cfg.lambda);
            if (ev.max_abs <= cfg.epsilon) {
                return {AgdoTag::acceptable, std::move(net), outer, eta, ev.loss};
            }
            if (ev.loss < outer_best_loss) {
                outer_best = net;
                outer_best_loss = ev.loss;
            }
        }

        const double cur = diverged ? std::numeric_limits<double>::quiet_NaN() : outer_best_loss;
        if (improved(best_loss, cur)) {
            best = std::move(outer_best);
            best_loss = cur;
            // momentum state stays with the endpoint; continue from there
        } else {
            net = best;
            adam.reset();
            eta *= 0.5;
            if (eta < cfg.epsilon1) {
                return {AgdoTag::unacceptable, std::move(best), outer, eta, best_loss};
            }
        }
    }

    return {AgdoTag::unacceptable, std::move(best), cfg.max_outer, eta, best_loss};
}

}  // namespace plm
