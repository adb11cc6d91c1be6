#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "jointlab/rational.hpp"

namespace jointlab {

enum class ExperimentKind { grid_lines, grid_flats, bush, random, partition, recursion_demo };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view name);

/// One experiment: a generator or partition run at every ladder value, for every seed.
///
/// Ladder meaning by kind: grid side S (grid_lines, grid_flats,
/// recursion_demo), lines per family (bush, scaling `multiplicities` when
/// given), flats per family (random), point count (partition).
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::grid_lines;
    std::vector<std::size_t> ladder;
    std::vector<std::uint64_t> seeds{0};
    std::size_t n = 3;                         ///< ambient dimension (grid_lines, bush, partition, recursion_demo)
    std::vector<std::size_t> alphas;           ///< flat dimensions per family (grid_flats, random)
    std::vector<std::size_t> multiplicities;   ///< bush base multiplicities
    std::size_t degree = 4;                    ///< partition / recursion_demo degree budget
    Rational tolerance{1, 10};
    std::int64_t coord_bound = 5;              ///< random flats
    std::optional<std::filesystem::path> output;
    std::string format = "csv";

    /// Throws PreconditionError on an empty or non-increasing ladder, bad
    /// kind parameters, or an output path whose directory does not exist.
    void validate() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct ResultRow {
    std::string kind;
    std::string params;               ///< "key=value;..." with no commas
    std::vector<std::size_t> sizes;   ///< family sizes |S_i| (point count for partition rows)
    std::size_t joints = 0;
    std::optional<double> carbery_sum;
    std::uint64_t seed = 0;
    double wall_ms = 0.0;
    std::string error;                ///< empty unless the ladder point failed

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

/// Runs every (ladder value, seed) pair in ladder order. Failures are
/// recorded in the row's `error` and the run continues.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

struct ExponentFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  ///< root mean square of log-space residuals
    std::size_t points = 0;
};

/// Numeric value of a row field: joints, carbery_sum, total_size,
/// size_product, wall_ms, seed, or param:<key> for a value in `params`.
double row_field(const ResultRow& row, std::string_view field);

/// Least squares of log(y) on log(x). Requires at least three rows and
/// positive values in both fields.
ExponentFit fit_exponent(std::span<const ResultRow> rows, std::string_view x_field, std::string_view y_field);

enum class ResultFormat { csv, json };

struct EmitOptions {
    /// When false the wall_ms column is left blank, making output a pure
    /// function of the configuration and seeds.
    bool include_timing = true;
};

std::string format_csv(std::span<const ResultRow> rows, const EmitOptions& options = {});
std::vector<ResultRow> parse_csv(std::string_view text);
nlohmann::json rows_to_json(std::span<const ResultRow> rows, const EmitOptions& options = {});
std::vector<ResultRow> rows_from_json(const nlohmann::json& j);

void emit_results(std::span<const ResultRow> rows, ResultFormat format, const std::filesystem::path& path,
                  const EmitOptions& options = {});
/// Reads a results file, choosing the format by extension (.json, otherwise CSV).
std::vector<ResultRow> read_results(const std::filesystem::path& path);

}  // namespace jointlab
