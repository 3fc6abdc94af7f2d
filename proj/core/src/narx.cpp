#include "fxcast/narx.hpp"

#include <stdexcept>

#include "fxcast/common.hpp"

namespace fxcast {

std::string to_string(FeedbackMode m) {
    return m == FeedbackMode::ExogenousOnly ? "exogenous_only" : "output_feedback";
}

FeedbackMode feedback_mode_from_string(const std::string& s) {
    if (s == "exogenous_only") return FeedbackMode::ExogenousOnly;
    if (s == "output_feedback") return FeedbackMode::OutputFeedback;
    throw std::invalid_argument("unknown feedback mode '" + s + "'");
}

namespace {

std::string tap_name(const std::string& column, int lag) {
    if (lag == 0) return column + "(t)";
    return column + "(t-" + std::to_string(lag) + ")";
}

}  // namespace

void NarxSpec::validate() const {
    if (input_delay < 0 || output_delay < 0) {
        throw std::invalid_argument("narx delays must be >= 0");
    }
    if (target.empty()) throw std::invalid_argument("narx target column required");
    const bool has_feedback = feedback_mode == FeedbackMode::OutputFeedback && output_delay >= 1;
    if (exogenous.empty() && !has_feedback) {
        throw std::invalid_argument("narx needs exogenous columns or output feedback with D_y >= 1");
    }
    if (!include_contemporaneous && input_delay == 0 && !exogenous.empty()) {
        throw std::invalid_argument("strict-lag mode needs D_u >= 1");
    }
}

int NarxSpec::regressor_count() const {
    const int taps_per_exog = include_contemporaneous ? input_delay + 1 : input_delay;
    int count = static_cast<int>(exogenous.size()) * taps_per_exog;
    if (feedback_mode == FeedbackMode::OutputFeedback) count += output_delay;
    return count;
}

int NarxSpec::warmup_rows() const { return std::max(input_delay, output_delay); }

nlohmann::json NarxSpec::to_json() const {
    return {{"input_delay", input_delay},
            {"output_delay", output_delay},
            {"exogenous", exogenous},
            {"target", target},
            {"feedback_mode", to_string(feedback_mode)},
            {"include_contemporaneous", include_contemporaneous}};
}

NarxSpec NarxSpec::from_json(const nlohmann::json& j) {
    NarxSpec spec;
    spec.input_delay = j.at("input_delay").get<int>();
    spec.output_delay = j.at("output_delay").get<int>();
    spec.exogenous = j.at("exogenous").get<std::vector<std::string>>();
    spec.target = j.at("target").get<std::string>();
    spec.feedback_mode = feedback_mode_from_string(j.at("feedback_mode").get<std::string>());
    spec.include_contemporaneous = j.value("include_contemporaneous", true);
    spec.validate();
    return spec;
}

RegressorSet build_regressors(const TimeSeriesFrame& frame, const NarxSpec& spec) {
    spec.validate();
    for (const auto& name : spec.exogenous) {
        if (!frame.has_column(name)) throw std::invalid_argument("missing column '" + name + "'");
    }
    if (!frame.has_column(spec.target)) {
        throw std::invalid_argument("missing column '" + spec.target + "'");
    }
    const std::size_t n = frame.rows();
    const int warmup = spec.warmup_rows();
    if (n <= static_cast<std::size_t>(warmup)) {
        throw std::invalid_argument("insufficient rows for the requested delays");
    }

    const std::size_t rows = n - static_cast<std::size_t>(warmup);
    const int cols = spec.regressor_count();
    const int first_tap = spec.include_contemporaneous ? 0 : 1;

    RegressorSet out;
    out.x.resize(static_cast<long>(rows), cols);
    out.y.resize(static_cast<long>(rows));
    out.dates.reserve(rows);

    for (const auto& name : spec.exogenous) {
        for (int k = first_tap; k <= spec.input_delay; ++k) out.column_names.push_back(tap_name(name, k));
    }
    if (spec.feedback_mode == FeedbackMode::OutputFeedback) {
        for (int k = 1; k <= spec.output_delay; ++k) {
            out.column_names.push_back(tap_name(spec.target, k));
        }
    }

    const auto& target = frame.column(spec.target);
    for (std::size_t t = static_cast<std::size_t>(warmup); t < n; ++t) {
        const long r = static_cast<long>(t - static_cast<std::size_t>(warmup));
        long c = 0;
        for (const auto& name : spec.exogenous) {
            const auto& col = frame.column(name);
            for (int k = first_tap; k <= spec.input_delay; ++k) {
                out.x(r, c++) = col[t - static_cast<std::size_t>(k)];
            }
        }
        if (spec.feedback_mode == FeedbackMode::OutputFeedback) {
            for (int k = 1; k <= spec.output_delay; ++k) {
                out.x(r, c++) = target[t - static_cast<std::size_t>(k)];
            }
        }
        out.y(r) = target[t];
        out.dates.push_back(frame.dates[t]);
    }
    return out;
}

nlohmann::json NarxModel::to_json() const {
    return {{"format_version", 1},
            {"narx_spec", spec.to_json()},
            {"network", network.to_json()},
            {"scaling",
             {{"inputs", input_scaling.to_json()},
              {"target", {{"min", target_scaling.min}, {"max", target_scaling.max}}}}}};
}

NarxModel NarxModel::from_json(const nlohmann::json& j) {
    if (j.at("format_version").get<int>() != 1) {
        throw std::invalid_argument("unsupported narx format_version");
    }
    NarxModel model;
    model.spec = NarxSpec::from_json(j.at("narx_spec"));
    model.network = Network::from_json(j.at("network"));
    model.input_scaling = ScalingTransform::from_json(j.at("scaling").at("inputs"));
    model.target_scaling = MinMaxScale{j.at("scaling").at("target").at("min").get<double>(),
                                       j.at("scaling").at("target").at("max").get<double>()};
    return model;
}

namespace {

// Fits a MinMaxScale per design-matrix column over rows [0, fit_rows).
ScalingTransform fit_input_scaling(const RegressorSet& rs, std::size_t fit_rows) {
    ScalingTransform scaling;
    for (long c = 0; c < rs.x.cols(); ++c) {
        const auto col = rs.x.col(c).head(static_cast<long>(fit_rows));
        const double lo = col.minCoeff();
        const double hi = col.maxCoeff();
        if (!(hi > lo)) {
            throw numerical_error("degenerate range in regressor '" + rs.column_names[c] + "'");
        }
        scaling.columns[rs.column_names[static_cast<std::size_t>(c)]] = MinMaxScale{lo, hi};
    }
    return scaling;
}

Eigen::MatrixXd apply_input_scaling(const RegressorSet& rs, const ScalingTransform& scaling) {
    Eigen::MatrixXd x = rs.x;
    for (long c = 0; c < x.cols(); ++c) {
        const MinMaxScale& s = scaling.at(rs.column_names[static_cast<std::size_t>(c)]);
        x.col(c) = (x.col(c).array() - s.min) / (s.max - s.min);
    }
    return x;
}

}  // namespace

NarxTrainResult train_narx(const TimeSeriesFrame& frame, const NarxSpec& spec, int hidden_neurons,
                           const TrainConfig& config, std::uint64_t seed, const SplitSpec& split,
                           bool fit_scaling_on_train) {
    const RegressorSet rs = build_regressors(frame, spec);
    const SplitSizes sizes = split_sizes(static_cast<std::size_t>(rs.x.rows()), split);
    return train_narx_sized(frame, spec, hidden_neurons, config, seed, sizes,
                            fit_scaling_on_train);
}

NarxTrainResult train_narx_sized(const TimeSeriesFrame& frame, const NarxSpec& spec,
                                 int hidden_neurons, const TrainConfig& config,
                                 std::uint64_t seed, const SplitSizes& sizes,
                                 bool fit_scaling_on_train) {
    if (hidden_neurons < 1) throw std::invalid_argument("hidden_neurons must be >= 1");
    const RegressorSet rs = build_regressors(frame, spec);
    const std::size_t rows = static_cast<std::size_t>(rs.x.rows());
    if (sizes.train + sizes.validation + sizes.test != rows || sizes.train == 0 ||
        sizes.validation == 0 || sizes.test == 0) {
        throw std::invalid_argument("train_narx: block sizes must partition the regressor rows");
    }

    const std::size_t fit_rows = fit_scaling_on_train ? sizes.train : rows;
    NarxModel model;
    model.spec = spec;
    model.input_scaling = fit_input_scaling(rs, fit_rows);
    {
        const auto head = rs.y.head(static_cast<long>(fit_rows));
        const double lo = head.minCoeff();
        const double hi = head.maxCoeff();
        if (!(hi > lo)) throw numerical_error("degenerate range in target");
        model.target_scaling = MinMaxScale{lo, hi};
    }

    const Eigen::MatrixXd x = apply_input_scaling(rs, model.input_scaling);
    Eigen::VectorXd y(rs.y.size());
    for (long i = 0; i < y.size(); ++i) y(i) = model.target_scaling.apply(rs.y(i));

    const auto block = [&](std::size_t begin, std::size_t count) {
        Dataset d;
        d.x = x.middleRows(static_cast<long>(begin), static_cast<long>(count));
        d.y = y.segment(static_cast<long>(begin), static_cast<long>(count));
        return d;
    };
    const Dataset train_set = block(0, sizes.train);
    const Dataset val_set = block(sizes.train, sizes.validation);
    const Dataset test_set = block(sizes.train + sizes.validation, sizes.test);

    NetworkSpec net_spec;
    net_spec.input_count = static_cast<int>(x.cols());
    net_spec.hidden_layer_sizes = {hidden_neurons};
    net_spec.output_count = 1;

    const Network initial = init_network(net_spec, seed);
    TrainOutcome outcome = train(initial, train_set, val_set, test_set, config);

    NarxTrainResult result;
    model.network = std::move(outcome.network);
    result.model = std::move(model);
    result.history = std::move(outcome.history);
    return result;
}

std::vector<double> predict_one_step(const NarxModel& model, const TimeSeriesFrame& frame) {
    const RegressorSet rs = build_regressors(frame, model.spec);
    const Eigen::MatrixXd x = apply_input_scaling(rs, model.input_scaling);
    const Eigen::MatrixXd out = predict(model.network, x);
    std::vector<double> predictions(static_cast<std::size_t>(out.rows()));
    for (long i = 0; i < out.rows(); ++i) {
        predictions[static_cast<std::size_t>(i)] = model.target_scaling.invert(out(i, 0));
    }
    return predictions;
}

std::vector<double> predict_closed_loop(const NarxModel& model, std::span<const double> y_history,
                                        const TimeSeriesFrame& exog_future, int horizon) {
    const NarxSpec& spec = model.spec;
    if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
    if (horizon == 0) return {};
    const bool feedback = spec.feedback_mode == FeedbackMode::OutputFeedback;
    if (feedback && y_history.size() < static_cast<std::size_t>(spec.output_delay)) {
        throw std::invalid_argument("closed loop: history shorter than D_y");
    }
    const std::size_t needed = static_cast<std::size_t>(horizon + spec.input_delay);
    if (!spec.exogenous.empty() && exog_future.rows() < needed) {
        throw std::invalid_argument("closed loop: exogenous cover shorter than horizon + D_u");
    }
    for (const auto& name : spec.exogenous) {
        if (!exog_future.has_column(name)) {
            throw std::invalid_argument("closed loop: missing column '" + name + "'");
        }
    }

    // Rolling target history; back() is the most recent value.
    std::vector<double> history(y_history.begin(), y_history.end());
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(horizon));

    const int first_tap = spec.include_contemporaneous ? 0 : 1;
    Eigen::VectorXd input(spec.regressor_count());

    for (int j = 0; j < horizon; ++j) {
        long c = 0;
        for (const auto& name : spec.exogenous) {
            const auto& col = exog_future.column(name);
            for (int k = first_tap; k <= spec.input_delay; ++k) {
                // Row D_u + j holds time t0 + j.
                const std::size_t row = static_cast<std::size_t>(spec.input_delay + j - k);
                const MinMaxScale& s = model.input_scaling.at(tap_name(name, k));
                input(c++) = s.apply(col[row]);
            }
        }
        if (feedback) {
            for (int k = 1; k <= spec.output_delay; ++k) {
                const MinMaxScale& s = model.input_scaling.at(tap_name(spec.target, k));
                input(c++) = s.apply(history[history.size() - static_cast<std::size_t>(k)]);
            }
        }
        const Eigen::VectorXd pred = forward(model.network, input);
        const double y_hat = model.target_scaling.invert(pred(0));
        out.push_back(y_hat);
        history.push_back(y_hat);
    }
    return out;
}

}  // namespace fxcast
