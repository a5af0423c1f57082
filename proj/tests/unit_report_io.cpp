// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "plm/data.hpp"
#include "plm/errors.hpp"
#include "plm/report_io.hpp"
#include "plm/trainer.hpp"

using namespace plm;

namespace {

TrainReport sample_report() {
    SynthSpec spec;
    spec.n_instances = 60;
    spec.n_features = 2;
    spec.target = SynthTarget::hinge;
    spec.seed = 2;

    PlmConfig cfg;
    cfg.epsilon = 0.02;
    cfg.inner_epochs = 50;
    cfg.reg_epochs = 20;
    cfg.seed = 5;
    return train(to_batch(generate_synthetic(spec).data), cfg);
}

}  // namespace

TEST_CASE("report writing is deterministic and round-trips through the reader") {
    const TrainReport report = sample_report();
    PlmConfig cfg;
    cfg.epsilon = 0.02;
    cfg.inner_epochs = 50;
    cfg.reg_epochs = 20;
    cfg.seed = 5;

    std::stringstream a;
    std::stringstream b;
    write_report(report, cfg, a);
    write_report(report, cfg, b);
    CHECK(a.str() == b.str());
    CHECK(a.str().find("timing") == std::string::npos);

    const ReportSummary summary = read_report(a);
    CHECK(summary.dataset_size == 60);
    CHECK(summary.stages.size() == report.stages.size());
    CHECK(summary.understanding_count == report.understanding_count);
    CHECK(summary.cramming_count == report.cramming_count);
    CHECK(summary.final_p == report.final_net.hidden_nodes());
    CHECK(summary.n_acceptable == report.n_acceptable);
    CHECK(summary.config.epsilon == cfg.epsilon);
    CHECK(summary.config.seed == 5);
    CHECK_FALSE(summary.total_ms.has_value());
    CHECK_FALSE(summary.eval.has_value());

    for (std::size_t i = 0; i < summary.stages.size(); ++i) {
        CHECK(summary.stages[i].n == report.stages[i].n);
        CHECK(summary.stages[i].p_after == report.stages[i].p_after);
        CHECK(summary.stages[i].route == report.stages[i].route);
        CHECK(summary.stages[i].d_n == report.stages[i].d_n);
    }
}

TEST_CASE("timing lines appear only on request") {
    const TrainReport report = sample_report();
    PlmConfig cfg;
    std::stringstream timed;
    write_report(report, cfg, timed, /*include_timing=*/true);
    CHECK(timed.str().find("timing total_ms=") != std::string::npos);

    const ReportSummary summary = read_report(timed);
    REQUIRE(summary.total_ms.has_value());
    CHECK(*summary.total_ms >= 0.0);
}

TEST_CASE("eval metrics round trip") {
    const TrainReport report = sample_report();
    PlmConfig cfg;
    EvalMetrics eval;
    eval.majority_count = 58;
    eval.majority_mae = 0.011;
    eval.non_majority_mae = 0.21;
    eval.test_mae = 0.034;

    std::stringstream out;
    write_report(report, cfg, out, false, &eval);
    const ReportSummary summary = read_report(out);
    REQUIRE(summary.eval.has_value());
    CHECK(summary.eval->majority_count == 58);
    CHECK(summary.eval->majority_mae == 0.011);
    REQUIRE(summary.eval->non_majority_mae.has_value());
    CHECK(*summary.eval->non_majority_mae == 0.21);
    REQUIRE(summary.eval->test_mae.has_value());
    CHECK(*summary.eval->test_mae == 0.034);
}

TEST_CASE("stage csv has one row per stage") {
    const TrainReport report = sample_report();
    std::stringstream csv;
    write_stage_csv(report, csv);

    std::size_t lines = 0;
    std::string line;
    while (std::getline(csv, line)) ++lines;
    CHECK(lines == report.stages.size() + 1);
}

TEST_CASE("reader rejects non-report input") {
    std::stringstream junk("hello world\n");
    CHECK_THROWS_AS((void)read_report(junk), ParseError);
}

TEST_CASE("order mode names round trip") {
    CHECK(to_string(OrderMode::lts) == "LTS");
    CHECK(to_string(OrderMode::pre_ordered) == "PO");
    CHECK(order_mode_from_string("LTS") == OrderMode::lts);
    CHECK(order_mode_from_string("po") == OrderMode::pre_ordered);
    CHECK_THROWS_AS((void)order_mode_from_string("bogus"), ParseError);
}
