// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "plm/network.hpp"

namespace plm {

/// A regression table: N rows of m features plus one target column.
/// `index` carries each row's identity in whatever source it came from
/// (CSV line, synthetic draw) and survives splits.
struct Dataset {
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    std::vector<std::string> feature_names;
    std::vector<std::size_t> index;
    double target_divisor = 1.0;  // y was divided by this; 1 means raw

    std::size_t size() const { return X.size(); }
    std::size_t features() const { return X.empty() ? 0 : X[0].size(); }
};

/// Column roles for load_csv.
struct CsvSchema {
    std::vector<std::string> feature_columns;
    std::string target_column;
};

/// Parses a comma-separated file with a header row. Every schema column must
/// exist; a missing or non-numeric cell raises ParseError citing the 1-based
/// data row. Row indices in the result count data rows from 0.
Dataset load_csv(std::istream& in, const CsvSchema& schema);
Dataset load_csv(const std::string& path, const CsvSchema& schema);

/// Aligned time series sharing one time index, column per series.
struct SeriesTable {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;  // column-major, equal lengths

    std::size_t length() const { return columns.empty() ? 0 : columns[0].size(); }
    const std::vector<double>& column(const std::string& name) const;
};

/// Reads every column of a CSV as one series.
SeriesTable load_series_csv(std::istream& in);
SeriesTable load_series_csv(const std::string& path);

/// One input variable of a lagged schema: series value at epoch t - lag.
struct LaggedFeature {
    std::string series;
    std::size_t lag = 0;
};

/// Forecasting schema: inputs drawn at (t - lag), target at (t + lead).
/// With a max lag of 3 and lead 4 a length-T table yields T - 7 rows.
struct LaggedSchema {
    std::vector<LaggedFeature> inputs;
    std::string target_series;
    std::size_t lead = 4;
};

/// Assembles the supervised dataset; usable epochs run from (1 + max lag)
/// to (T - lead) inclusive. Throws InsufficientHistoryError when that range
/// is empty.
Dataset build_lagged_features(const SeriesTable& raw, const LaggedSchema& schema);

/// Divides the target column by `divisor` (> 0) and records it so
/// predictions can be mapped back to the original scale.
Dataset normalize_target(const Dataset& ds, double divisor);

/// Undoes normalize_target on a single prediction.
inline double denormalize(const Dataset& ds, double y) { return y * ds.target_divisor; }

/// Samples round(train_fraction * N) rows without replacement (seeded,
/// platform-stable) as the training set; the remainder is the test set.
/// Both halves keep their original `index` entries, in ascending order.
std::pair<Dataset, Dataset> random_split(const Dataset& ds, double train_fraction,
                                         std::uint64_t seed);

enum class SynthTarget { teacher, hinge };

struct SynthSpec {
    std::size_t n_instances = 200;
    std::size_t n_features = 5;
    SynthTarget target = SynthTarget::teacher;
    double noise_sd = 0.0;
    std::uint64_t seed = 0;
};

/// A generated dataset together with the exact generating network, so tests
/// can measure the noise that was actually added.
struct SynthData {
    Dataset data;
    TwoLayerNet teacher;
};

/// Teacher mode draws a 5-hidden-node net whose hinges all cross the unit
/// cube, rescales its outputs to [0, 1], and adds Gaussian noise. Hinge
/// mode uses a fixed piecewise-linear function of the first two inputs.
/// Inputs are uniform in [0, 1]^m either way.
SynthData generate_synthetic(const SynthSpec& spec);

/// CSV with the same shape load_csv ingests: feature columns then target.
void write_csv(const Dataset& ds, std::ostream& out);
void write_csv(const Dataset& ds, const std::string& path);

/// View of a Dataset as the batch type the trainer consumes.
Batch to_batch(const Dataset& ds);

}  // namespace plm
