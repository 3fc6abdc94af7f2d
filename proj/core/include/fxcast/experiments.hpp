#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fxcast/ann.hpp"
#include "fxcast/dataio.hpp"
#include "fxcast/metrics.hpp"
#include "fxcast/narx.hpp"
#include "fxcast/stattests.hpp"
#include "fxcast/volatility.hpp"

namespace fxcast {

// ===========================================================================
// The 20-trial neural grid
// ===========================================================================

enum class ModelFamily { Mlffnn, Narx };

std::string to_string(ModelFamily f);
ModelFamily model_family_from_string(const std::string& s);

struct TrialRecord {
    std::string family;
    int neurons = 0;
    Trainer algorithm = Trainer::LM;
    std::uint64_t seed = 0;
    ForecastReport train_report;  // on [0,1]-rescaled values
    ForecastReport test_report;
    double wall_seconds = 0.0;  // informational; never serialized into reports
    bool failed = false;
    std::string failure;
    std::string partition_fingerprint;

    static std::string csv_header();
    std::string csv_row() const;
};

struct GridConfig {
    std::vector<int> neuron_levels = {10, 20, 30, 40};
    std::vector<Trainer> algorithms = {Trainer::LM, Trainer::SCG, Trainer::CG_PowellBeale,
                                       Trainer::CG_FletcherReeves, Trainer::CG_PolakRibiere};
    TrainConfig train;  // per-cell algorithm is overridden
    NarxSpec narx;      // target, exogenous set and delays (delays apply to the NARX family)
    SplitSpec split;
};

/// Identity of a test partition: target column, test-block date range and the
/// full-series target scale. Families evaluated on different fingerprints
/// must not be compared.
std::string partition_fingerprint(const TimeSeriesFrame& frame, const SplitSpec& split,
                                  const std::string& target);

/// Trains one cell per (neurons, algorithm) pair with a per-cell seed derived
/// from base_seed. A diverging trial is recorded as a failed cell. The
/// MLFFNN family uses the exogenous columns at time t only (no taps); both
/// families share frame-level split boundaries so their test rows coincide.
std::vector<TrialRecord> run_grid(const TimeSeriesFrame& frame, ModelFamily family,
                                  const GridConfig& config, std::uint64_t base_seed);

struct SummaryStat {
    double min = 0.0;
    double max = 0.0;
    double average = 0.0;
};

/// Min/max/average R and MSE over the non-failed trials, in the layout of
/// the performance tables.
struct GridSummary {
    SummaryStat train_r, train_mse, test_r, test_mse;
    int trials = 0;
    int failed = 0;

    nlohmann::json to_json() const;
};

GridSummary summarize_grid(std::span<const TrialRecord> records);

std::string trial_records_csv(std::span<const TrialRecord> records);

// ===========================================================================
// ANCOVA (Type III)
// ===========================================================================

struct AncovaRow {
    std::string source;
    double ss = 0.0;
    int df = 0;
    std::optional<double> mean_square;
    std::optional<double> f;
    std::optional<double> p;
    std::optional<double> partial_eta_sq;
};

struct AncovaTable {
    std::vector<AncovaRow> rows;  // Corrected Model, Intercept, Neurons,
                                  // Algorithms, Error, Total, Corrected Total
    int excluded_trials = 0;      // failed cells left out of the decomposition

    const AncovaRow& row(const std::string& source) const;
    nlohmann::json to_json() const;
};

/// Response = test MSE, fixed factor = algorithm (deviation coded), covariate
/// = neurons. neurons_as_factor switches the covariate to factor coding.
AncovaTable ancova(std::span<const TrialRecord> records, bool neurons_as_factor = false);

// ===========================================================================
// Cross-family comparison
// ===========================================================================

/// Welch unequal-variance t test, two sided.
TestResult welch_t_test(std::span<const double> sample_a, std::span<const double> sample_b);

struct GarchEval {
    std::string model;  // e.g. "GARCH(1,1)"
    double mse = 0.0;   // on [0,1]-rescaled values, test partition
    double theil = 0.0;
    std::string partition_fingerprint;
};

/// One-step (static) mean predictions on the frame's test block, rescaled
/// with the full-series target scale.
GarchEval evaluate_garch_on_test(const GarchFit& fit, const TimeSeriesFrame& frame,
                                 const SplitSpec& split);

struct ComparisonReport {
    struct FamilyBlock {
        std::string family;
        GridSummary summary;
    };
    std::vector<FamilyBlock> ann_families;
    std::vector<GarchEval> garch_models;
    TestResult t_test;  // ANN per-trial test MSEs vs GARCH per-model MSEs
    struct Bar {
        std::string model;
        double mse = 0.0;
    };
    std::vector<Bar> bars;
    bool significant = false;

    nlohmann::json to_json() const;
};

/// Throws std::invalid_argument when the two sides carry different partition
/// fingerprints (different test rows or scalings).
ComparisonReport compare(std::span<const TrialRecord> ann_records,
                         std::span<const GarchEval> garch_evals);

/// Convenience form: evaluates the fits on the frame's test block first.
ComparisonReport compare(std::span<const TrialRecord> ann_records,
                         std::span<const GarchFit> fits, const TimeSeriesFrame& frame,
                         const SplitSpec& split);

}  // namespace fxcast
