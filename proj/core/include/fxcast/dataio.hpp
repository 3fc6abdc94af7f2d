#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fxcast {

// ===========================================================================
// Calendar dates
// ===========================================================================

/// Calendar date with a day-serial for ordering. Parses ISO-8601 (YYYY-MM-DD).
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    static Date parse(const std::string& iso);
    static Date from_serial(std::int64_t days);

    /// Days since 1970-01-01 (proleptic Gregorian).
    std::int64_t serial() const;
    std::string to_string() const;

    auto operator<=>(const Date& other) const { return serial() <=> other.serial(); }
    bool operator==(const Date& other) const { return serial() == other.serial(); }
};

// ===========================================================================
// TimeSeriesFrame
// ===========================================================================

/// Dated, named real-valued columns; the universal data carrier.
/// Invariants: every column has exactly rows() values, dates strictly
/// increasing, no missing values after load.
struct TimeSeriesFrame {
    std::vector<Date> dates;
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const { return dates.size(); }
    std::size_t column_count() const { return names.size(); }
    bool has_column(const std::string& name) const;
    const std::vector<double>& column(const std::string& name) const;  // throws if absent
    void add_column(const std::string& name, std::vector<double> values);

    /// Rows [begin, end) as a new frame.
    TimeSeriesFrame slice(std::size_t begin, std::size_t end) const;

    /// Throws std::invalid_argument when an invariant is broken.
    void validate() const;
};

struct LoadResult {
    TimeSeriesFrame frame;
    std::size_t dropped_rows = 0;  // rows removed for missing cells
};

/// Reads a comma-separated file with a header row. Rows with any blank cell
/// are dropped (and counted); rows are sorted ascending by date; duplicate
/// dates or malformed non-blank cells are errors.
LoadResult load_frame(const std::string& path, const std::string& date_column);

/// Writes the frame back out in the same CSV dialect.
void write_frame_csv(const TimeSeriesFrame& frame, const std::string& path,
                     const std::string& date_column = "Date");

// ===========================================================================
// Derivations
// ===========================================================================

enum class ReturnKind { Simple, Log };

/// r_t = (p_t - p_{t-1}) / p_{t-1}, or ln(p_t / p_{t-1}) in log mode.
std::vector<double> simple_returns(std::span<const double> series,
                                   ReturnKind kind = ReturnKind::Simple);

/// d_t = y_t - y_{t-1}.
std::vector<double> first_difference(std::span<const double> series);

/// Per-column affine map to [0, 1] recorded at fit time.
struct MinMaxScale {
    double min = 0.0;
    double max = 1.0;

    double apply(double x) const { return (x - min) / (max - min); }
    double invert(double x) const { return min + x * (max - min); }
    std::vector<double> apply(std::span<const double> xs) const;
    std::vector<double> invert(std::span<const double> xs) const;
};

/// Column-name keyed collection of MinMaxScale entries.
struct ScalingTransform {
    std::map<std::string, MinMaxScale> columns;

    const MinMaxScale& at(const std::string& name) const;
    nlohmann::json to_json() const;
    static ScalingTransform from_json(const nlohmann::json& j);
};

/// Rescales to [0, 1]; throws on a constant series (degenerate range).
std::pair<std::vector<double>, MinMaxScale> minmax_rescale(std::span<const double> series);

/// Fits per-column scales on the named columns of `frame` (all rows).
ScalingTransform fit_scaling(const TimeSeriesFrame& frame, const std::vector<std::string>& names);

/// Fits on the row range [begin, end) only — the leakage-averse variant.
ScalingTransform fit_scaling(const TimeSeriesFrame& frame, const std::vector<std::string>& names,
                             std::size_t begin, std::size_t end);

// ===========================================================================
// Chronological splitting
// ===========================================================================

struct SplitSpec {
    double train_frac = 0.70;
    double val_frac = 0.15;
    double test_frac = 0.15;

    void validate() const;  // fractions in (0,1), summing to 1 within 1e-9
};

struct SplitSizes {
    std::size_t train = 0;
    std::size_t validation = 0;
    std::size_t test = 0;
};

/// train = floor(train_frac * n), validation = floor(val_frac * n),
/// test = remainder.
SplitSizes split_sizes(std::size_t n, const SplitSpec& spec);

struct SplitFrames {
    TimeSeriesFrame train;
    TimeSeriesFrame validation;
    TimeSeriesFrame test;
};

SplitFrames split_chronological(const TimeSeriesFrame& frame, const SplitSpec& spec);

// ===========================================================================
// Descriptive statistics
// ===========================================================================

/// Moment conventions: std_dev uses the n-1 denominator; skewness and
/// kurtosis use 1/n central moments with kurtosis reported raw (normal = 3).
struct DescriptiveStats {
    double mean = 0.0;
    double median = 0.0;
    double max = 0.0;
    double min = 0.0;
    double std_dev = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;

    double excess_kurtosis() const { return kurtosis - 3.0; }
    nlohmann::json to_json() const;
};

/// Throws numerical_error on zero variance (skewness/kurtosis undefined).
DescriptiveStats describe(std::span<const double> series);

/// Stats for every column, as a JSON object keyed by column name.
nlohmann::json describe_frame(const TimeSeriesFrame& frame);

}  // namespace fxcast
