// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "plm/trainer.hpp"

namespace plm {

/// Post-training evaluation attached to a run report by the driver.
struct EvalMetrics {
    std::size_t majority_count = 0;
    double majority_mae = 0.0;
    std::optional<double> non_majority_mae;
    std::optional<double> test_mae;
};

/// Writes the run report as plain text, one record per line:
///
///   plm-report 1
///   config key=value ...
///   data instances=N
///   stage <no> n=<n> p_before=<p> p_after=<p> route=<r> prunes=<k> d_n=<v>
///   skipped <indices...>          (only when instances were skipped)
///   eval majority_count=... majority_mae=... [non_majority_mae=...] [test_mae=...]
///   summary stages=... understanding=... cramming=... [pcts] final_p=...
///           n_acceptable=... invariant_checks=...
///   timing total_ms=... stage_ms=v1,v2,...   (only with include_timing)
///
/// Floats are printed with 17 significant digits. Without include_timing the
/// output depends only on (config, data, seed), so identical runs produce
/// byte-identical files.
void write_report(const TrainReport& report, const PlmConfig& cfg, std::ostream& out,
                  bool include_timing = false, const EvalMetrics* eval = nullptr);

/// Stage trajectory as CSV (stage,n,p_before,p_after,route,prunes,d_n):
/// enough to redraw node-count-over-stages plots.
void write_stage_csv(const TrainReport& report, std::ostream& out);

/// The fields read back by the aggregating commands.
struct ReportSummary {
    PlmConfig config;
    std::size_t dataset_size = 0;
    std::vector<StageRecord> stages;  // wall_ms filled only if the file had timing
    std::size_t understanding_count = 0;
    std::size_t cramming_count = 0;
    std::size_t final_p = 0;
    std::size_t n_acceptable = 0;
    std::size_t skipped = 0;
    std::optional<double> total_ms;
    std::optional<EvalMetrics> eval;
};

/// Parses what write_report produced. Throws ParseError on malformed input.
ReportSummary read_report(std::istream& in);
ReportSummary read_report_file(const std::string& path);

/// Round-trippable names for the order modes ("LTS" / "PO").
std::string to_string(OrderMode mode);
OrderMode order_mode_from_string(const std::string& name);

}  // namespace plm
