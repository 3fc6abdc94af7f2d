#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "fxcast/ann.hpp"
#include "fxcast/dataio.hpp"

namespace fxcast {

enum class FeedbackMode { ExogenousOnly, OutputFeedback };

std::string to_string(FeedbackMode m);
FeedbackMode feedback_mode_from_string(const std::string& s);

struct NarxSpec {
    int input_delay = 2;   // D_u
    int output_delay = 2;  // D_y
    std::vector<std::string> exogenous;
    std::string target;
    FeedbackMode feedback_mode = FeedbackMode::OutputFeedback;
    bool include_contemporaneous = true;  // include u(t); off = strict-lag forecasting

    void validate() const;
    int regressor_count() const;
    /// Rows dropped from the head of the frame: max(D_u, D_y).
    int warmup_rows() const;
    nlohmann::json to_json() const;
    static NarxSpec from_json(const nlohmann::json& j);
};

/// Tapped-delay design matrix. Column layout: for each exogenous column, its
/// taps newest-first ([x(t), x(t-1), .., x(t-D_u)]), then the output taps
/// [y(t-1), .., y(t-D_y)] when feedback is on.
struct RegressorSet {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    std::vector<Date> dates;  // the date of each row's target y(t)
    std::vector<std::string> column_names;
};

RegressorSet build_regressors(const TimeSeriesFrame& frame, const NarxSpec& spec);

struct NarxModel {
    NarxSpec spec;
    Network network;
    ScalingTransform input_scaling;  // keyed by regressor column name
    MinMaxScale target_scaling;

    nlohmann::json to_json() const;
    static NarxModel from_json(const nlohmann::json& j);
};

struct NarxTrainResult {
    NarxModel model;
    TrainHistory history;
};

/// Builds regressors, rescales inputs and target to [0, 1], splits
/// chronologically and trains through ann::train (series-parallel: true past
/// outputs fill the feedback taps). Set fit_scaling_on_train to restrict
/// min/max fitting to the training block.
NarxTrainResult train_narx(const TimeSeriesFrame& frame, const NarxSpec& spec,
                           int hidden_neurons, const TrainConfig& config, std::uint64_t seed,
                           const SplitSpec& split = SplitSpec{},
                           bool fit_scaling_on_train = false);

/// Same, but with explicit block sizes on the regressor rows; lets callers
/// align partition boundaries across models with different warm-up lengths.
NarxTrainResult train_narx_sized(const TimeSeriesFrame& frame, const NarxSpec& spec,
                                 int hidden_neurons, const TrainConfig& config,
                                 std::uint64_t seed, const SplitSizes& sizes,
                                 bool fit_scaling_on_train = false);

/// Open-loop prediction with observed lags; element i corresponds to the
/// frame row warmup_rows() + i. Values are on the original (unscaled) scale.
std::vector<double> predict_one_step(const NarxModel& model, const TimeSeriesFrame& frame);

/// Closed-loop recursion over `horizon` steps. y_history supplies at least
/// D_y observed target values (oldest first, last = y(t0-1)); exog_future
/// rows map to times t0 - D_u .. t0 + horizon - 1.
std::vector<double> predict_closed_loop(const NarxModel& model, std::span<const double> y_history,
                                        const TimeSeriesFrame& exog_future, int horizon);

}  // namespace fxcast
