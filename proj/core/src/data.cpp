// SPDX-License-Identifier: Apache-2.0
#include "plm/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "plm/errors.hpp"
#include "plm/rng.hpp"

namespace plm {

namespace {

constexpr std::uint64_t kSplitStream = 11;
constexpr std::uint64_t kSynthInputStream = 12;
constexpr std::uint64_t kSynthTeacherStream = 13;
constexpr std::uint64_t kSynthNoiseStream = 14;

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_cell(const std::string& raw, std::size_t row, const std::string& column) {
    const std::string cell = trim(raw);
    if (cell.empty()) {
        throw ParseError("row " + std::to_string(row) + ": missing value in column '" +
                         column + "'");
    }
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(cell, &used);
    } catch (const std::exception&) {
        throw ParseError("row " + std::to_string(row) + ": cannot parse '" + cell +
                         "' in column '" + column + "'");
    }
    if (used != cell.size()) {
        throw ParseError("row " + std::to_string(row) + ": trailing characters in '" + cell +
                         "' in column '" + column + "'");
    }
    return value;
}

struct RawTable {
    std::vector<std::string> headers;
    std::vector<std::vector<std::string>> rows;
};

RawTable read_table(std::istream& in) {
    RawTable table;
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty file: no header row");
    table.headers = split_line(line);
    for (auto& h : table.headers) h = trim(h);
    if (table.headers.empty()) throw ParseError("header row has no columns");

    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        ++row_no;
        if (trim(line).empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != table.headers.size()) {
            throw ParseError("row " + std::to_string(row_no) + ": expected " +
                             std::to_string(table.headers.size()) + " cells, found " +
                             std::to_string(cells.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    if (table.rows.empty()) throw ParseError("no data rows after the header");
    return table;
}

std::size_t column_of(const RawTable& table, const std::string& name) {
    const auto it = std::find(table.headers.begin(), table.headers.end(), name);
    if (it == table.headers.end()) throw ParseError("missing column '" + name + "'");
    return static_cast<std::size_t>(it - table.headers.begin());
}

void format_double(std::ostream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
}

}  // namespace

Dataset load_csv(std::istream& in, const CsvSchema& schema) {
    if (schema.feature_columns.empty() || schema.target_column.empty()) {
        throw InvalidInputError("schema needs at least one feature column and a target");
    }
    const RawTable table = read_table(in);

    std::vector<std::size_t> feature_cols;
    feature_cols.reserve(schema.feature_columns.size());
    for (const auto& name : schema.feature_columns) {
        feature_cols.push_back(column_of(table, name));
    }
    const std::size_t target_col = column_of(table, schema.target_column);

    Dataset ds;
    ds.feature_names = schema.feature_columns;
    ds.X.reserve(table.rows.size());
    ds.y.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        std::vector<double> row;
        row.reserve(feature_cols.size());
        for (std::size_t k = 0; k < feature_cols.size(); ++k) {
            row.push_back(
                parse_cell(table.rows[r][feature_cols[k]], r + 1, schema.feature_columns[k]));
        }
        ds.X.push_back(std::move(row));
        ds.y.push_back(parse_cell(table.rows[r][target_col], r + 1, schema.target_column));
        ds.index.push_back(r);
    }
    return ds;
}

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return load_csv(in, schema);
}

const std::vector<double>& SeriesTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return columns[i];
    }
    throw ParseError("missing series '" + name + "'");
}

SeriesTable load_series_csv(std::istream& in) {
    const RawTable table = read_table(in);
    SeriesTable series;
    series.names = table.headers;
    series.columns.assign(table.headers.size(), {});
    for (auto& col : series.columns) col.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        for (std::size_t c = 0; c < table.headers.size(); ++c) {
            series.columns[c].push_back(parse_cell(table.rows[r][c], r + 1, table.headers[c]));
        }
    }
    return series;
}

SeriesTable load_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return load_series_csv(in);
}

Dataset build_lagged_features(const SeriesTable& raw, const LaggedSchema& schema) {
    if (schema.inputs.empty() || schema.target_series.empty()) {
        throw InvalidInputError("lagged schema needs inputs and a target series");
    }
    std::size_t max_lag = 0;
    for (const auto& f : schema.inputs) max_lag = std::max(max_lag, f.lag);

    const std::size_t T = raw.length();
    if (T < max_lag + schema.lead + 1) {
        throw InsufficientHistoryError("series length " + std::to_string(T) +
                                       " cannot support lag " + std::to_string(max_lag) +
                                       " and lead " + std::to_string(schema.lead));
    }

    const std::vector<double>& target = raw.column(schema.target_series);
    std::vector<const std::vector<double>*> inputs;
    inputs.reserve(schema.inputs.size());
    for (const auto& f : schema.inputs) inputs.push_back(&raw.column(f.series));

    Dataset ds;
    for (const auto& f : schema.inputs) {
        ds.feature_names.push_back(f.lag == 0 ? f.series
                                              : f.series + "_lag" + std::to_string(f.lag));
    }
    // Usable epochs t (0-based) run from max_lag to T - lead - 1.
    for (std::size_t t = max_lag; t + schema.lead < T; ++t) {
        std::vector<double> row;
        row.reserve(schema.inputs.size());
        for (std::size_t k = 0; k < schema.inputs.size(); ++k) {
            row.push_back((*inputs[k])[t - schema.inputs[k].lag]);
        }
        ds.X.push_back(std::move(row));
        ds.y.push_back(target[t + schema.lead]);
        ds.index.push_back(t);
    }
    return ds;
}

Dataset normalize_target(const Dataset& ds, double divisor) {
    if (!(divisor > 0.0)) throw InvalidInputError("divisor must be positive");
    Dataset out = ds;
    for (double& v : out.y) v /= divisor;
    out.target_divisor = ds.target_divisor * divisor;
    return out;
}

std::pair<Dataset, Dataset> random_split(const Dataset& ds, double train_fraction,
                                         std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw InvalidInputError("train_fraction must lie strictly between 0 and 1");
    }
    const std::size_t n = ds.size();
    const auto train_count = static_cast<std::size_t>(
        std::lround(train_fraction * static_cast<double>(n)));

    // Fisher-Yates on row positions with the documented generator, then the
    // first train_count positions become the training rows.
    std::vector<std::size_t> pos(n);
    std::iota(pos.begin(), pos.end(), std::size_t{0});
    Rng rng = Rng::stream(seed, kSplitStream);
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(pos[i - 1], pos[j]);
    }
    std::vector<char> in_train(n, 0);
    for (std::size_t i = 0; i < train_count && i < n; ++i) in_train[pos[i]] = 1;

    Dataset train;
    Dataset test;
    train.feature_names = test.feature_names = ds.feature_names;
    train.target_divisor = test.target_divisor = ds.target_divisor;
    for (std::size_t r = 0; r < n; ++r) {
        Dataset& dst = in_train[r] ? train : test;
        dst.X.push_back(ds.X[r]);
        dst.y.push_back(ds.y[r]);
        dst.index.push_back(ds.index.empty() ? r : ds.index[r]);
    }
    return {std::move(train), std::move(test)};
}

namespace {

// Fixed piecewise-linear target used by hinge mode, expressed as the exact
// network that generates it so SynthData::teacher is uniform across modes.
TwoLayerNet hinge_teacher(std::size_t m) {
    TwoLayerNet net(m, m >= 2 ? 3 : 2);
    auto set_row = [&](std::size_t i, double bias, std::size_t var, double w) {
        auto row = net.hidden_row(i);
        row[0] = bias;
        row[var + 1] = w;
    };
    set_row(0, -0.3, 0, 1.0);   // ReLU(x1 - 0.3)
    set_row(1, -0.6, 0, 1.0);   // ReLU(x1 - 0.6)
    auto out = net.output_layer();
    out[0] = 0.2;
    out[1] = 0.6;
    out[2] = -0.4;
    if (m >= 2) {
        set_row(2, 0.5, 1, -1.0);  // ReLU(0.5 - x2)
        out[3] = 0.3;
    }
    return net;
}

}  // namespace

SynthData generate_synthetic(const SynthSpec& spec) {
    if (spec.n_instances < 10) throw InvalidInputError("synthetic spec needs >= 10 instances");
    if (spec.n_features < 1) throw InvalidInputError("synthetic spec needs >= 1 feature");
    if (spec.noise_sd < 0.0) throw InvalidInputError("noise_sd must be >= 0");

    const std::size_t m = spec.n_features;
    Rng input_rng = Rng::stream(spec.seed, kSynthInputStream);

    TwoLayerNet teacher(m, 1);
    if (spec.target == SynthTarget::teacher) {
        Rng teacher_rng = Rng::stream(spec.seed, kSynthTeacherStream);
        TwoLayerNet drawn(m, 5);
        for (std::size_t i = 0; i < drawn.hidden_nodes(); ++i) {
            auto row = drawn.hidden_row(i);
            // Slopes uniform in [-2, 2]; the bias is chosen so the hinge
            // crosses the cube at a random interior point, keeping every
            // node genuinely nonlinear over the input domain.
            for (std::size_t j = 0; j < m; ++j) row[j + 1] = teacher_rng.uniform(-2.0, 2.0);
            double bias = 0.0;
            for (std::size_t j = 0; j < m; ++j) bias -= row[j + 1] * teacher_rng.uniform01();
            row[0] = bias;
        }
        for (double& w : drawn.output_layer()) w = teacher_rng.uniform(-1.0, 1.0);
        teacher = std::move(drawn);
    } else {
        teacher = hinge_teacher(m);
    }

    std::vector<std::vector<double>> X(spec.n_instances, std::vector<double>(m));
    for (auto& row : X) {
        for (double& v : row) v = input_rng.uniform01();
    }

    std::vector<double> clean(spec.n_instances);
    for (std::size_t r = 0; r < spec.n_instances; ++r) clean[r] = teacher.forward(X[r]);

    if (spec.target == SynthTarget::teacher) {
        // Affine-map the clean outputs onto [0, 1] and fold the map into the
        // teacher weights so teacher.forward stays the exact clean target.
        const auto [lo_it, hi_it] = std::minmax_element(clean.begin(), clean.end());
        const double lo = *lo_it;
        const double range = *hi_it - lo;
        const double scale = range > 0.0 ? 1.0 / range : 1.0;
        auto out = teacher.output_layer();
        out[0] = (out[0] - lo) * scale;
        for (std::size_t i = 1; i < out.size(); ++i) out[i] *= scale;
        for (std::size_t r = 0; r < spec.n_instances; ++r) clean[r] = (clean[r] - lo) * scale;
    }

    SynthData synth{Dataset{}, std::move(teacher)};
    synth.data.X = std::move(X);
    synth.data.y = std::move(clean);
    if (spec.noise_sd > 0.0) {
        Rng noise_rng = Rng::stream(spec.seed, kSynthNoiseStream);
        for (double& v : synth.data.y) v += spec.noise_sd * noise_rng.normal();
    }
    synth.data.feature_names.reserve(m);
    for (std::size_t j = 0; j < m; ++j) synth.data.feature_names.push_back("x" + std::to_string(j + 1));
    synth.data.index.resize(spec.n_instances);
    std::iota(synth.data.index.begin(), synth.data.index.end(), std::size_t{0});
    return synth;
}

void write_csv(const Dataset& ds, std::ostream& out) {
    for (std::size_t j = 0; j < ds.feature_names.size(); ++j) {
        out << ds.feature_names[j] << ',';
    }
    out << "target\n";
    for (std::size_t r = 0; r < ds.size(); ++r) {
        for (double v : ds.X[r]) {
            format_double(out, v);
            out << ',';
        }
        format_double(out, ds.y[r]);
        out << '\n';
    }
}

void write_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    write_csv(ds, out);
}

Batch to_batch(const Dataset& ds) {
    Batch batch;
    batch.instances.reserve(ds.size());
    batch.index_set.reserve(ds.size());
    for (std::size_t r = 0; r < ds.size(); ++r) {
        batch.instances.push_back({ds.X[r], ds.y[r]});
        batch.index_set.push_back(ds.index.empty() ? r : ds.index[r]);
    }
    return batch;
}

}  // namespace plm
