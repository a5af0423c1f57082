// SPDX-License-Identifier: Apache-2.0
#include "plm/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "plm/agdo.hpp"
#include "plm/errors.hpp"
#include "plm/organizing.hpp"
#include "plm/rng.hpp"

namespace plm {

namespace {

// Sub-stream ids so initialization draws and cramming draws never overlap.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kCramStream = 2;

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

AgdoConfig understanding_config(const PlmConfig& cfg) {
    AgdoConfig a;
    a.eta_init = cfg.eta_understanding;
    a.epsilon = cfg.epsilon;
    a.epsilon1 = cfg.epsilon1;
    a.max_outer = cfg.max_outer;
    a.inner_epochs = cfg.inner_epochs;
    a.beta1 = cfg.beta1;
    a.beta2 = cfg.beta2;
    a.adam_eps = cfg.adam_eps;
    a.lambda = 0.0;
    return a;
}

OrganizeConfig organize_config(const PlmConfig& cfg) {
    OrganizeConfig o;
    o.reg_epochs = cfg.reg_epochs;
    o.lambda = cfg.lambda;
    o.eta_init = cfg.eta_organizing;
    o.epsilon = cfg.epsilon;
    o.epsilon1 = cfg.epsilon1;
    o.agdo = understanding_config(cfg);
    o.agdo.max_outer = cfg.prune_max_outer;
    o.agdo.inner_epochs = cfg.prune_inner_epochs;
    return o;
}

std::size_t original_id(const Batch& batch, std::size_t pos) {
    return pos < batch.index_set.size() ? batch.index_set[pos] : pos;
}

// Fails fast on duplicate inputs whose targets cannot both be fit at
// tolerance epsilon; cramming would hit them much later with a worse
// diagnostic. Sort-based, so duplicate groups land adjacent.
void scan_contradictory_duplicates(const Batch& dataset, double epsilon) {
    std::vector<std::size_t> idx(dataset.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return dataset.instances[a].x < dataset.instances[b].x;
    });
    for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
        for (std::size_t j = i + 1; j < idx.size(); ++j) {
            const Instance& a = dataset.instances[idx[i]];
            const Instance& b = dataset.instances[idx[j]];
            if (a.x != b.x) break;
            if (std::abs(a.y - b.y) > 2.0 * epsilon) {
                throw DegenerateInstanceError(
                    "instances " + std::to_string(original_id(dataset, idx[i])) + " and " +
                        std::to_string(original_id(dataset, idx[j])) +
                        " share one input but their targets differ by more than 2*epsilon",
                    original_id(dataset, idx[i]), original_id(dataset, idx[j]));
            }
        }
    }
}

void check_tolerance(const TwoLayerNet& net, const Batch& batch, double epsilon,
                     const char* where, std::size_t& counter) {
    ++counter;
    if (!acceptable(net, batch, epsilon)) {
        throw InvalidStateError(std::string("stage tolerance guarantee violated ") + where);
    }
}

}  // namespace

double TrainReport::understanding_pct() const {
    const std::size_t total = understanding_count + cramming_count;
    return total == 0 ? 0.0 : 100.0 * static_cast<double>(understanding_count) /
                                  static_cast<double>(total);
}

double TrainReport::cramming_pct() const {
    const std::size_t total = understanding_count + cramming_count;
    return total == 0 ? 0.0
                      : 100.0 * static_cast<double>(cramming_count) / static_cast<double>(total);
}

TwoLayerNet initialize(const Batch& dataset, const PlmConfig& cfg) {
    if (dataset.empty()) throw InvalidInputError("initialize over an empty dataset");
    Rng rng = Rng::stream(cfg.seed, kInitStream);
    TwoLayerNet net = TwoLayerNet::random_init(dataset.instances[0].x.size(), 1, rng);

    AgdoConfig tune = understanding_config(cfg);
    tune.inner_epochs = cfg.init_epochs;
    return agdo_run(std::move(net), dataset, tune).final_net;
}

TrainReport train(const Batch& dataset, const PlmConfig& cfg) {
    if (dataset.size() < 2) throw InvalidInputError("train needs at least two instances");
    if (cfg.stop_fraction <= 0.0 || cfg.stop_fraction > 1.0) {
        throw InvalidInputError("stop_fraction must lie in (0, 1]");
    }
    if (cfg.epsilon <= 0.0) throw InvalidInputError("epsilon must be positive");
    for (const Instance& inst : dataset.instances) {
        if (inst.x.size() != dataset.instances[0].x.size()) {
            throw InvalidInputError("instances disagree on input dimension");
        }
    }
    scan_contradictory_duplicates(dataset, cfg.epsilon);

    const auto t_start = Clock::now();
    const std::size_t total = dataset.size();
    const auto threshold =
        static_cast<std::size_t>(std::floor(cfg.stop_fraction * static_cast<double>(total)));

    TrainReport report;
    report.dataset_size = total;
    report.final_net = initialize(dataset, cfg);

    // Active set: positions of dataset instances still eligible for picking.
    Batch active = dataset;
    if (active.index_set.empty()) {
        active.index_set.resize(total);
        std::iota(active.index_set.begin(), active.index_set.end(), std::size_t{0});
    }

    const AgdoConfig understand = understanding_config(cfg);
    const OrganizeConfig organizer = organize_config(cfg);
    Rng cram_rng = Rng::stream(cfg.seed, kCramStream);

    std::size_t prev_prefix = 0;
    while (true) {
        const ResidualOrder order = interpret(report.final_net, active, cfg.epsilon, cfg.mode);
        if (cfg.check_invariants) {
            // The acceptable prefix must genuinely sit inside the band.
            Batch prefix = order.n_acceptable == 0
                               ? Batch{}
                               : pick(order, order.n_acceptable, active);
            ++report.invariant_checks;
            if (!prefix.empty() && !acceptable(report.final_net, prefix, cfg.epsilon)) {
                throw InvalidStateError("stage tolerance guarantee violated after interpret");
            }
            if (order.n_acceptable < prev_prefix) {
                throw InvalidStateError("acceptable prefix shrank between stages");
            }
        }
        prev_prefix = order.n_acceptable;
        report.n_acceptable = order.n_acceptable;

        if (order.n_acceptable >= threshold) break;
        if (order.n_acceptable == active.size()) {
            throw InvalidStateError(
                "every remaining instance fits but the stop threshold is unreachable (" +
                std::to_string(report.skipped_indices.size()) + " skipped)");
        }

        const auto t_stage = Clock::now();
        const std::size_t n = order.n_acceptable + 1;
        const Batch batch = pick(order, n, active);
        const std::size_t target_pos = n - 1;
        const std::size_t p_before = report.final_net.hidden_nodes();

        TwoLayerNet saved = report.final_net;
        Route route;
        AgdoExit exit = agdo_run(std::move(report.final_net), batch, understand);
        if (exit.tag == AgdoTag::acceptable) {
            report.final_net = std::move(exit.final_net);
            route = Route::understanding;
            if (cfg.check_invariants) {
                check_tolerance(report.final_net, batch, cfg.epsilon, "after understanding",
                                report.invariant_checks);
            }
        } else {
            // Understanding failed: restore the saved weights so exactly one
            // batch instance is unacceptable, then cram that instance.
            try {
                const CramParams params =
                    find_cram_params(batch, target_pos, cram_rng, cfg.cram);
                report.final_net = cram(saved, batch, target_pos, params, cfg.epsilon);
            } catch (const DegenerateInstanceError&) {
                // Same input as an already-fitted instance, targets within
                // 2*epsilon: not learnable by cramming. Exclude and move on.
                const std::size_t victim = order.perm[target_pos];
                report.skipped_indices.push_back(active.index_set[victim]);
                active.instances.erase(active.instances.begin() +
                                       static_cast<std::ptrdiff_t>(victim));
                active.index_set.erase(active.index_set.begin() +
                                       static_cast<std::ptrdiff_t>(victim));
                report.final_net = std::move(saved);
                continue;
            }
            route = Route::cramming;
            if (cfg.check_invariants) {
                check_tolerance(report.final_net, batch, cfg.epsilon, "after cramming",
                                report.invariant_checks);
            }
        }

        OrganizeResult organized = organize(report.final_net, batch, organizer);
        report.final_net = std::move(organized.net);
        if (cfg.check_invariants) {
            check_tolerance(report.final_net, batch, cfg.epsilon, "after organizing",
                            report.invariant_checks);
        }

        StageRecord record;
        record.stage = report.stages.size() + 1;
        record.n = n;
        record.p_before = p_before;
        record.p_after = report.final_net.hidden_nodes();
        record.route = route;
        record.prunes = organized.prunes;
        record.d_n = max_abs_residual(report.final_net, batch);
        record.wall_ms = ms_since(t_stage);
        report.stages.push_back(record);
        (route == Route::understanding ? report.understanding_count : report.cramming_count)++;

        if (report.stages.size() > total) {
            throw InvalidStateError("stage budget exceeded: no progress towards the stop rule");
        }
    }

    report.total_ms = ms_since(t_start);
    return report;
}

}  // namespace plm
