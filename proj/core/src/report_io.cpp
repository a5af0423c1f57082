// SPDX-License-Identifier: Apache-2.0
#include "plm/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "plm/errors.hpp"

namespace plm {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* route_name(Route r) {
    return r == Route::understanding ? "understanding" : "cramming";
}

// "key=value" tokens of one record line.
std::map<std::string, std::string> fields_of(std::istringstream& line) {
    std::map<std::string, std::string> out;
    std::string token;
    while (line >> token) {
        const auto eq = token.find('=');
        if (eq != std::string::npos) out[token.substr(0, eq)] = token.substr(eq + 1);
    }
    return out;
}

double to_double(const std::map<std::string, std::string>& f, const std::string& key) {
    const auto it = f.find(key);
    if (it == f.end()) throw ParseError("report: missing field '" + key + "'");
    return std::stod(it->second);
}

std::size_t to_count(const std::map<std::string, std::string>& f, const std::string& key) {
    const auto it = f.find(key);
    if (it == f.end()) throw ParseError("report: missing field '" + key + "'");
    return static_cast<std::size_t>(std::stoull(it->second));
}

}  // namespace

std::string to_string(OrderMode mode) { return mode == OrderMode::lts ? "LTS" : "PO"; }

OrderMode order_mode_from_string(const std::string& name) {
    if (name == "LTS" || name == "lts") return OrderMode::lts;
    if (name == "PO" || name == "po") return OrderMode::pre_ordered;
    throw ParseError("unknown order mode '" + name + "' (expected LTS or PO)");
}

void write_report(const TrainReport& report, const PlmConfig& cfg, std::ostream& out,
                  bool include_timing, const EvalMetrics* eval) {
    out << "plm-report 1\n";
    out << "config epsilon=" << fmt(cfg.epsilon) << " epsilon1=" << fmt(cfg.epsilon1)
        << " eta_understanding=" << fmt(cfg.eta_understanding)
        << " eta_organizing=" << fmt(cfg.eta_organizing)
        << " stop_fraction=" << fmt(cfg.stop_fraction) << " mode=" << to_string(cfg.mode)
        << " reg_epochs=" << cfg.reg_epochs << " lambda=" << fmt(cfg.lambda)
        << " init_epochs=" << cfg.init_epochs << " max_outer=" << cfg.max_outer
        << " inner_epochs=" << cfg.inner_epochs << " seed=" << cfg.seed << '\n';
    out << "data instances=" << report.dataset_size << '\n';
    for (const StageRecord& s : report.stages) {
        out << "stage " << s.stage << " n=" << s.n << " p_before=" << s.p_before
            << " p_after=" << s.p_after << " route=" << route_name(s.route)
            << " prunes=" << s.prunes << " d_n=" << fmt(s.d_n) << '\n';
    }
    if (!report.skipped_indices.empty()) {
        out << "skipped";
        for (std::size_t idx : report.skipped_indices) out << ' ' << idx;
        out << '\n';
    }
    if (eval) {
        out << "eval majority_count=" << eval->majority_count
            << " majority_mae=" << fmt(eval->majority_mae);
        if (eval->non_majority_mae) out << " non_majority_mae=" << fmt(*eval->non_majority_mae);
        if (eval->test_mae) out << " test_mae=" << fmt(*eval->test_mae);
        out << '\n';
    }
    out << "summary stages=" << report.stages.size()
        << " understanding=" << report.understanding_count
        << " cramming=" << report.cramming_count;
    if (!report.stages.empty()) {
        out << " understanding_pct=" << fmt(report.understanding_pct())
            << " cramming_pct=" << fmt(report.cramming_pct());
    }
    out << " final_p=" << report.final_net.hidden_nodes()
        << " n_acceptable=" << report.n_acceptable
        << " invariant_checks=" << report.invariant_checks << '\n';
    if (include_timing) {
        out << "timing total_ms=" << fmt(report.total_ms) << " stage_ms=";
        for (std::size_t i = 0; i < report.stages.size(); ++i) {
            if (i) out << ',';
            out << fmt(report.stages[i].wall_ms);
        }
        out << '\n';
    }
}

void write_stage_csv(const TrainReport& report, std::ostream& out) {
    out << "stage,n,p_before,p_after,route,prunes,d_n\n";
    for (const StageRecord& s : report.stages) {
        out << s.stage << ',' << s.n << ',' << s.p_before << ',' << s.p_after << ','
            << route_name(s.route) << ',' << s.prunes << ',' << fmt(s.d_n) << '\n';
    }
}

ReportSummary read_report(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("plm-report", 0) != 0) {
        throw ParseError("not a plm report file");
    }

    ReportSummary summary;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;

        if (tag == "config") {
            const auto f = fields_of(ls);
            summary.config.epsilon = to_double(f, "epsilon");
            summary.config.epsilon1 = to_double(f, "epsilon1");
            summary.config.eta_understanding = to_double(f, "eta_understanding");
            summary.config.eta_organizing = to_double(f, "eta_organizing");
            summary.config.stop_fraction = to_double(f, "stop_fraction");
            summary.config.mode = order_mode_from_string(f.at("mode"));
            summary.config.reg_epochs = to_count(f, "reg_epochs");
            summary.config.lambda = to_double(f, "lambda");
            summary.config.init_epochs = to_count(f, "init_epochs");
            summary.config.max_outer = to_count(f, "max_outer");
            summary.config.inner_epochs = to_count(f, "inner_epochs");
            summary.config.seed = std::stoull(f.at("seed"));
        } else if (tag == "data") {
            summary.dataset_size = to_count(fields_of(ls), "instances");
        } else if (tag == "stage") {
            StageRecord s;
            ls >> s.stage;
            const auto f = fields_of(ls);
            s.n = to_count(f, "n");
            s.p_before = to_count(f, "p_before");
            s.p_after = to_count(f, "p_after");
            s.route = f.at("route") == "understanding" ? Route::understanding : Route::cramming;
            s.prunes = to_count(f, "prunes");
            s.d_n = to_double(f, "d_n");
            summary.stages.push_back(s);
        } else if (tag == "skipped") {
            std::size_t idx = 0;
            while (ls >> idx) ++summary.skipped;
        } else if (tag == "eval") {
            const auto f = fields_of(ls);
            EvalMetrics eval;
            eval.majority_count = to_count(f, "majority_count");
            eval.majority_mae = to_double(f, "majority_mae");
            if (f.count("non_majority_mae")) eval.non_majority_mae = to_double(f, "non_majority_mae");
            if (f.count("test_mae")) eval.test_mae = to_double(f, "test_mae");
            summary.eval = eval;
        } else if (tag == "summary") {
            const auto f = fields_of(ls);
            summary.understanding_count = to_count(f, "understanding");
            summary.cramming_count = to_count(f, "cramming");
            summary.final_p = to_count(f, "final_p");
            summary.n_acceptable = to_count(f, "n_acceptable");
        } else if (tag == "timing") {
            summary.total_ms = to_double(fields_of(ls), "total_ms");
        }
    }
    return summary;
}

ReportSummary read_report_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return read_report(in);
}

}  // namespace plm
