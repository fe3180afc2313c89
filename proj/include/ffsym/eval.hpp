#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ffsym/io.hpp"
#include "ffsym/relations.hpp"
#include "ffsym/symbol.hpp"

namespace ffsym {

struct Metrics {
    std::size_t n = 0;        ///< test examples
    std::size_t covered = 0;  ///< examples with any prediction line
    std::size_t invalid = 0;  ///< prediction lines that do not decode
    double element = 0;
    double magnitude = 0;
    double sign = 0;                    ///< zero carries '+'
    std::optional<double> sign_balance; ///< share of '+' among nonzero valid predictions
    double interval = 0;                ///< 95% half-width on element accuracy
};

/// 2 sqrt((1 - a) / n)
double confidence_interval(double accuracy, std::size_t n);

/// Scores every id in `test_ids` (default: every truth id). Missing and invalid predictions
/// are wrong on every metric. Throws Error(Range) on an empty test set and Error(Data) on a
/// prediction or test id that the truth does not know.
Metrics score_predictions(const Truth& truth, const PredictionList& predictions,
                          const std::optional<std::vector<std::string>>& test_ids = std::nullopt);

/// Converts ids to keys; throws ParseError on an id that is not a key.
KeyedPredictions keyed_predictions(const PredictionList& predictions);

double log10_magnitude(const Coefficient& c);

struct HistogramBin {
    double lower = 0;
    double upper = 0;
    std::size_t count = 0;
};

/// Contiguous bins of width 1/bins_per_decade over log10|c|, from the lowest to the
/// highest occupied bin.
std::vector<HistogramBin> magnitude_histogram(const Symbol& symbol, int bins_per_decade = 10);

struct TriangleReport {
    std::string name;
    std::array<double, 3> angles{};  ///< interior angles at the three vertices, degrees
    double max_deviation = 0;        ///< from 60 degrees
};

struct AngleReport {
    std::array<std::array<double, 6>, 6> pairwise{};  ///< degrees between letter vectors
    std::vector<TriangleReport> triangles;            ///< abc, def, abf, bcd, ace
};

/// Rows are the letters a..f. Throws Error(Range) on a zero vector or a shape other than 6 rows.
AngleReport embedding_angles(const Eigen::MatrixXd& vectors);
/// Six rows of numbers, each optionally led by its letter.
Eigen::MatrixXd read_embeddings(std::istream& in);
/// Rounds to the 0.1 degree reporting resolution.
double round_angle(double degrees);

struct CurveRow {
    int epoch = 0;
    std::string relation;
    RelationRates rates;
};

struct CurveTable {
    std::vector<CurveRow> rows;          ///< sorted by (epoch, relation catalog order)
    std::vector<std::string> warnings;   ///< missing epochs and similar
};

/// Prediction files are the regular files in `dir` whose name contains an integer (the
/// first run of digits is the epoch). Gaps in the epoch sequence produce warnings.
CurveTable relation_curves(const std::filesystem::path& dir, const std::vector<RelationInstance>& instances,
                           const Symbol& truth, ScoreOptions options = {});

void write_metrics(std::ostream& out, const Metrics& m);
void write_histogram(std::ostream& out, const std::vector<HistogramBin>& bins);
void write_angles(std::ostream& out, const AngleReport& report);
void write_curves(std::ostream& out, const CurveTable& table);

}  // namespace ffsym
