#include "fxcast/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "fxcast/common.hpp"
#include "fxcast/distributions.hpp"
#include "fxcast/ols.hpp"
#include "fxcast/rng.hpp"

namespace fxcast {

std::string to_string(ModelFamily f) { return f == ModelFamily::Mlffnn ? "MLFFNN" : "NARX"; }

ModelFamily model_family_from_string(const std::string& s) {
    if (s == "MLFFNN" || s == "mlffnn") return ModelFamily::Mlffnn;
    if (s == "NARX" || s == "narx") return ModelFamily::Narx;
    throw std::invalid_argument("unknown model family '" + s + "'");
}

// ===========================================================================
// Grid
// ===========================================================================

std::string partition_fingerprint(const TimeSeriesFrame& frame, const SplitSpec& split,
                                  const std::string& target) {
    const SplitSizes sizes = split_sizes(frame.rows(), split);
    const std::size_t test_begin = sizes.train + sizes.validation;
    const auto& col = frame.column(target);
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    std::ostringstream out;
    out.precision(17);
    out << target << '|' << frame.dates[test_begin].to_string() << ".."
        << frame.dates.back().to_string() << '|' << sizes.test << '|' << *lo << ".." << *hi;
    return out.str();
}

std::string TrialRecord::csv_header() {
    return "family,neurons,algorithm,seed,train_n,train_mse,train_r,train_theil,"
           "test_n,test_mse,test_r,test_theil,failed,failure";
}

std::string TrialRecord::csv_row() const {
    std::ostringstream out;
    out.precision(17);
    out << family << ',' << neurons << ',' << to_string(algorithm) << ',' << seed << ','
        << train_report.n << ',' << train_report.mse << ',' << train_report.r << ','
        << train_report.theil << ',' << test_report.n << ',' << test_report.mse << ','
        << test_report.r << ',' << test_report.theil << ',' << (failed ? 1 : 0) << ','
        << failure;
    return out.str();
}

std::string trial_records_csv(std::span<const TrialRecord> records) {
    std::ostringstream out;
    out << TrialRecord::csv_header() << '\n';
    for (const auto& r : records) out << r.csv_row() << '\n';
    return out.str();
}

std::vector<TrialRecord> run_grid(const TimeSeriesFrame& frame, ModelFamily family,
                                  const GridConfig& config, std::uint64_t base_seed) {
    NarxSpec spec = config.narx;
    if (family == ModelFamily::Mlffnn) {
        // The MLFFNN uses the exogenous columns at time t only.
        spec.input_delay = 0;
        spec.output_delay = 0;
        spec.feedback_mode = FeedbackMode::ExogenousOnly;
        spec.include_contemporaneous = true;
    }
    spec.validate();

    // Frame-level block boundaries, so every model family sees the same
    // dated test rows regardless of its warm-up length.
    const SplitSizes frame_sizes = split_sizes(frame.rows(), config.split);
    const int warmup = spec.warmup_rows();
    if (frame_sizes.train <= static_cast<std::size_t>(warmup)) {
        throw std::invalid_argument("run_grid: training block shorter than the warm-up");
    }
    const SplitSizes sizes{frame_sizes.train - static_cast<std::size_t>(warmup),
                           frame_sizes.validation, frame_sizes.test};
    const std::string fingerprint = partition_fingerprint(frame, config.split, spec.target);

    std::vector<TrialRecord> records;
    records.reserve(config.neuron_levels.size() * config.algorithms.size());
    const std::uint64_t family_stream = family == ModelFamily::Mlffnn ? 0 : 1000;

    std::uint64_t cell = 0;
    for (int neurons : config.neuron_levels) {
        for (Trainer algorithm : config.algorithms) {
            TrialRecord record;
            record.family = to_string(family);
            record.neurons = neurons;
            record.algorithm = algorithm;
            record.seed = mix_seed(base_seed, family_stream + cell);
            record.partition_fingerprint = fingerprint;
            ++cell;

            TrainConfig train_cfg = config.train;
            train_cfg.algorithm = algorithm;

            const auto started = std::chrono::steady_clock::now();
            try {
                const NarxTrainResult result =
                    train_narx_sized(frame, spec, neurons, train_cfg, record.seed, sizes);
                const std::vector<double> predictions =
                    predict_one_step(result.model, frame);
                const RegressorSet rs = build_regressors(frame, spec);
                const MinMaxScale& scale = result.model.target_scaling;

                std::vector<double> actual(static_cast<std::size_t>(rs.y.size()));
                std::vector<double> predicted(predictions.size());
                for (std::size_t i = 0; i < actual.size(); ++i) {
                    actual[i] = scale.apply(rs.y(static_cast<long>(i)));
                    predicted[i] = scale.apply(predictions[i]);
                }

                const auto block = [&](std::size_t begin, std::size_t count) {
                    return std::pair{std::span(actual).subspan(begin, count),
                                     std::span(predicted).subspan(begin, count)};
                };
                const auto [train_a, train_p] = block(0, sizes.train);
                record.train_report = evaluate_forecast("train", train_a, train_p);
                const auto [test_a, test_p] =
                    block(sizes.train + sizes.validation, sizes.test);
                record.test_report = evaluate_forecast("test", test_a, test_p);
            } catch (const numerical_error& err) {
                record.failed = true;
                record.failure = err.what();
            }
            record.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                    .count();
            records.push_back(std::move(record));
        }
    }
    return records;
}

namespace {

SummaryStat summarize_values(const std::vector<double>& values) {
    SummaryStat s;
    if (values.empty()) return s;
    s.min = *std::min_element(values.begin(), values.end());
    s.max = *std::max_element(values.begin(), values.end());
    s.average = 0.0;
    for (double v : values) s.average += v;
    s.average /= static_cast<double>(values.size());
    return s;
}

nlohmann::json stat_to_json(const SummaryStat& s) {
    return {{"min", s.min}, {"max", s.max}, {"average", s.average}};
}

}  // namespace

GridSummary summarize_grid(std::span<const TrialRecord> records) {
    GridSummary summary;
    std::vector<double> train_r, train_mse, test_r, test_mse;
    for (const auto& record : records) {
        ++summary.trials;
        if (record.failed) {
            ++summary.failed;
            continue;
        }
        train_r.push_back(record.train_report.r);
        train_mse.push_back(record.train_report.mse);
        test_r.push_back(record.test_report.r);
        test_mse.push_back(record.test_report.mse);
    }
    summary.train_r = summarize_values(train_r);
    summary.train_mse = summarize_values(train_mse);
    summary.test_r = summarize_values(test_r);
    summary.test_mse = summarize_values(test_mse);
    return summary;
}

nlohmann::json GridSummary::to_json() const {
    return {{"trials", trials},
            {"failed", failed},
            {"train", {{"r", stat_to_json(train_r)}, {"mse", stat_to_json(train_mse)}}},
            {"test", {{"r", stat_to_json(test_r)}, {"mse", stat_to_json(test_mse)}}}};
}

// ===========================================================================
// ANCOVA
// ===========================================================================

const AncovaRow& AncovaTable::row(const std::string& source) const {
    for (const auto& r : rows) {
        if (r.source == source) return r;
    }
    throw std::invalid_argument("no ANCOVA row named '" + source + "'");
}

nlohmann::json AncovaTable::to_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json j{{"source", r.source}, {"type_iii_ss", r.ss}, {"df", r.df}};
        if (r.mean_square) j["mean_square"] = *r.mean_square;
        if (r.f) j["f"] = *r.f;
        if (r.p) j["sig"] = *r.p;
        if (r.partial_eta_sq) j["partial_eta_squared"] = *r.partial_eta_sq;
        out.push_back(std::move(j));
    }
    return {{"rows", std::move(out)}, {"excluded_trials", excluded_trials}};
}

namespace {

// Deviation (effects) coding: L-1 columns, last level coded -1 everywhere.
Eigen::MatrixXd deviation_code(const std::vector<int>& level_index, int levels) {
    const long n = static_cast<long>(level_index.size());
    Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(n, levels - 1);
    for (long i = 0; i < n; ++i) {
        const int l = level_index[static_cast<std::size_t>(i)];
        if (l == levels - 1) {
            cols.row(i).setConstant(-1.0);
        } else {
            cols(i, l) = 1.0;
        }
    }
    return cols;
}

double model_rss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    return ols(X, y).rss;
}

}  // namespace

AncovaTable ancova(std::span<const TrialRecord> records, bool neurons_as_factor) {
    std::vector<double> response;
    std::vector<double> neurons;
    std::vector<int> algo_index;
    std::vector<Trainer> algo_levels;
    std::vector<int> neuron_levels;
    int excluded = 0;

    for (const auto& record : records) {
        if (record.failed) {
            ++excluded;
            continue;
        }
        response.push_back(record.test_report.mse);
        neurons.push_back(static_cast<double>(record.neurons));
        if (std::find(algo_levels.begin(), algo_levels.end(), record.algorithm) ==
            algo_levels.end()) {
            algo_levels.push_back(record.algorithm);
        }
        if (std::find(neuron_levels.begin(), neuron_levels.end(), record.neurons) ==
            neuron_levels.end()) {
            neuron_levels.push_back(record.neurons);
        }
        algo_index.push_back(static_cast<int>(
            std::find(algo_levels.begin(), algo_levels.end(), record.algorithm) -
            algo_levels.begin()));
    }

    const long n = static_cast<long>(response.size());
    const int levels = static_cast<int>(algo_levels.size());
    if (levels < 2) throw std::invalid_argument("ancova: at least 2 factor levels required");
    for (int l = 0; l < levels; ++l) {
        if (std::count(algo_index.begin(), algo_index.end(), l) < 2) {
            throw std::invalid_argument("ancova: every factor level needs >= 2 observations");
        }
    }

    const Eigen::VectorXd y =
        Eigen::Map<const Eigen::VectorXd>(response.data(), static_cast<long>(response.size()));
    const Eigen::MatrixXd algo_cols = deviation_code(algo_index, levels);

    Eigen::MatrixXd neuron_cols;
    int neuron_df = 1;
    if (neurons_as_factor) {
        std::sort(neuron_levels.begin(), neuron_levels.end());
        std::vector<int> idx(neurons.size());
        for (std::size_t i = 0; i < neurons.size(); ++i) {
            idx[i] = static_cast<int>(std::find(neuron_levels.begin(), neuron_levels.end(),
                                                static_cast<int>(neurons[i])) -
                                      neuron_levels.begin());
        }
        neuron_cols = deviation_code(idx, static_cast<int>(neuron_levels.size()));
        neuron_df = static_cast<int>(neuron_levels.size()) - 1;
    } else {
        neuron_cols =
            Eigen::Map<const Eigen::VectorXd>(neurons.data(), static_cast<long>(neurons.size()));
    }

    const long k_full = 1 + neuron_cols.cols() + algo_cols.cols();
    Eigen::MatrixXd full(n, k_full);
    full.col(0).setOnes();
    full.middleCols(1, neuron_cols.cols()) = neuron_cols;
    full.rightCols(algo_cols.cols()) = algo_cols;

    const double ybar = y.mean();
    const double sst = (y.array() - ybar).square().sum();
    const double total_ss = y.squaredNorm();

    // Constant response: every effect SS is 0 by definition.
    const bool degenerate = sst <= 0.0;
    double rss_full = 0.0, ss_intercept = 0.0, ss_neurons = 0.0, ss_algorithms = 0.0;
    if (!degenerate) {
        rss_full = model_rss(full, y);

        Eigen::MatrixXd no_intercept = full.rightCols(k_full - 1);
        ss_intercept = std::max(0.0, model_rss(no_intercept, y) - rss_full);

        Eigen::MatrixXd no_neurons(n, 1 + algo_cols.cols());
        no_neurons.col(0).setOnes();
        no_neurons.rightCols(algo_cols.cols()) = algo_cols;
        ss_neurons = std::max(0.0, model_rss(no_neurons, y) - rss_full);

        Eigen::MatrixXd no_algo(n, 1 + neuron_cols.cols());
        no_algo.col(0).setOnes();
        no_algo.rightCols(neuron_cols.cols()) = neuron_cols;
        ss_algorithms = std::max(0.0, model_rss(no_algo, y) - rss_full);
    } else {
        ss_intercept = total_ss;  // the grand-mean term still carries Sum y^2
    }

    const int df_model = static_cast<int>(k_full) - 1;
    const int df_error = static_cast<int>(n) - static_cast<int>(k_full);
    if (df_error < 1) throw std::invalid_argument("ancova: no error degrees of freedom");
    const double ss_model = std::max(0.0, sst - rss_full);
    const double ms_error = rss_full / df_error;

    const auto effect_row = [&](const std::string& name, double ss, int df) {
        AncovaRow row;
        row.source = name;
        row.ss = ss;
        row.df = df;
        row.mean_square = ss / df;
        if (ss <= 0.0) {
            row.f = 0.0;
            row.p = 1.0;
            row.partial_eta_sq = 0.0;
        } else if (ms_error <= 0.0) {
            row.f = std::numeric_limits<double>::infinity();
            row.p = 0.0;
            row.partial_eta_sq = 1.0;
        } else {
            row.f = (ss / df) / ms_error;
            row.p = f_sf(*row.f, df, df_error);
            row.partial_eta_sq = ss / (ss + rss_full);
        }
        return row;
    };

    AncovaTable table;
    table.excluded_trials = excluded;
    table.rows.push_back(effect_row("Corrected Model", ss_model, df_model));
    table.rows.push_back(effect_row("Intercept", ss_intercept, 1));
    table.rows.push_back(effect_row("Neurons", ss_neurons, neuron_df));
    table.rows.push_back(effect_row("Algorithms", ss_algorithms, levels - 1));
    AncovaRow error_row;
    error_row.source = "Error";
    error_row.ss = rss_full;
    error_row.df = df_error;
    error_row.mean_square = ms_error;
    table.rows.push_back(std::move(error_row));
    AncovaRow total_row;
    total_row.source = "Total";
    total_row.ss = total_ss;
    total_row.df = static_cast<int>(n);
    table.rows.push_back(std::move(total_row));
    AncovaRow corrected_row;
    corrected_row.source = "Corrected Total";
    corrected_row.ss = sst;
    corrected_row.df = static_cast<int>(n) - 1;
    table.rows.push_back(std::move(corrected_row));
    return table;
}

// ===========================================================================
// Welch t-test and the comparison report
// ===========================================================================

TestResult welch_t_test(std::span<const double> sample_a, std::span<const double> sample_b) {
    if (sample_a.size() < 2 || sample_b.size() < 2) {
        throw std::invalid_argument("welch_t_test: each sample needs >= 2 values");
    }
    const auto moments = [](std::span<const double> xs) {
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= static_cast<double>(xs.size());
        double var = 0.0;
        for (double x : xs) var += (x - mean) * (x - mean);
        var /= static_cast<double>(xs.size() - 1);
        return std::pair{mean, var};
    };
    const auto [mean_a, var_a] = moments(sample_a);
    const auto [mean_b, var_b] = moments(sample_b);
    if (!std::isfinite(var_a) || !std::isfinite(var_b)) {
        throw std::invalid_argument("welch_t_test: non-finite variance");
    }
    const double na = static_cast<double>(sample_a.size());
    const double nb = static_cast<double>(sample_b.size());
    const double se2 = var_a / na + var_b / nb;

    TestResult r;
    r.test = "welch_t";
    if (se2 <= 0.0) {
        if (mean_a != mean_b) throw numerical_error("welch_t_test: degenerate samples");
        r.statistic = 0.0;
        r.p_value = 1.0;
        r.df = na + nb - 2.0;
    } else {
        r.statistic = (mean_a - mean_b) / std::sqrt(se2);
        const double df = se2 * se2 /
                          (var_a * var_a / (na * na * (na - 1.0)) +
                           var_b * var_b / (nb * nb * (nb - 1.0)));
        r.df = df;
        r.p_value = student_t_two_sided(r.statistic, df);
    }
    r.reject = r.p_value < r.level;
    return r;
}

GarchEval evaluate_garch_on_test(const GarchFit& fit, const TimeSeriesFrame& frame,
                                 const SplitSpec& split) {
    const SplitSizes sizes = split_sizes(frame.rows(), split);
    const GarchSpec& spec = fit.spec;

    // Static one-step mean predictions over the whole frame, then the tail
    // test block. Differencing (when configured) shortens the head only, so
    // tail alignment is exact.
    const auto& target = frame.column(spec.target);
    std::vector<double> y(target.begin(), target.end());
    std::vector<std::vector<double>> regressors;
    for (const auto& name : spec.mean_regressors) {
        const auto& col = frame.column(name);
        regressors.emplace_back(col.begin(), col.end());
    }
    const bool diff_any = !spec.difference_columns.empty();
    const auto needs_diff = [&](const std::string& name) {
        return std::find(spec.difference_columns.begin(), spec.difference_columns.end(), name) !=
               spec.difference_columns.end();
    };
    if (diff_any) {
        if (needs_diff(spec.target)) {
            y = first_difference(y);
        } else {
            y.erase(y.begin());
        }
        for (std::size_t i = 0; i < regressors.size(); ++i) {
            if (needs_diff(spec.mean_regressors[i])) {
                regressors[i] = first_difference(regressors[i]);
            } else {
                regressors[i].erase(regressors[i].begin());
            }
        }
    }

    const std::size_t n = y.size();
    std::vector<double> predicted(n);
    for (std::size_t t = 0; t < n; ++t) {
        double value = 0.0;
        long c = 0;
        if (spec.intercept) value += fit.params.mean(c++);
        for (const auto& col : regressors) value += fit.params.mean(c++) * col[t];
        predicted[t] = value;
    }

    const auto [scaled_actual, scale] = minmax_rescale(y);
    std::vector<double> scaled_pred(n);
    for (std::size_t t = 0; t < n; ++t) scaled_pred[t] = scale.apply(predicted[t]);

    const std::size_t test_begin = n - sizes.test;
    const std::span<const double> a(scaled_actual);
    const std::span<const double> p(scaled_pred);

    GarchEval eval;
    eval.model = to_string(spec.family) + "(" + std::to_string(spec.p) + "," +
                 std::to_string(spec.q) + ")";
    eval.mse = mse(a.subspan(test_begin), p.subspan(test_begin));
    eval.theil = theil(a.subspan(test_begin), p.subspan(test_begin));
    eval.partition_fingerprint = partition_fingerprint(frame, split, spec.target);
    return eval;
}

nlohmann::json ComparisonReport::to_json() const {
    nlohmann::json families = nlohmann::json::array();
    for (const auto& block : ann_families) {
        families.push_back({{"family", block.family}, {"summary", block.summary.to_json()}});
    }
    nlohmann::json garch = nlohmann::json::array();
    for (const auto& g : garch_models) {
        garch.push_back({{"model", g.model}, {"mse", g.mse}, {"theil", g.theil}});
    }
    nlohmann::json bar_list = nlohmann::json::array();
    for (const auto& b : bars) {
        bar_list.push_back({{"model", b.model}, {"mse", b.mse}});
    }
    return {{"ann_families", std::move(families)},
            {"garch_models", std::move(garch)},
            {"t_test", t_test.to_json()},
            {"bars", std::move(bar_list)},
            {"significant_difference", significant}};
}

ComparisonReport compare(std::span<const TrialRecord> ann_records,
                         std::span<const GarchEval> garch_evals) {
    if (ann_records.empty() || garch_evals.empty()) {
        throw std::invalid_argument("compare: both families must be evaluated");
    }
    const std::string& fingerprint = ann_records.front().partition_fingerprint;
    for (const auto& record : ann_records) {
        if (record.partition_fingerprint != fingerprint) {
            throw std::invalid_argument("compare: ANN trials on different test partitions");
        }
    }
    for (const auto& eval : garch_evals) {
        if (eval.partition_fingerprint != fingerprint) {
            throw std::invalid_argument(
                "compare: GARCH models evaluated on a different test partition");
        }
    }

    ComparisonReport report;

    // Group trials by family, preserving first-seen order.
    std::vector<std::string> family_names;
    for (const auto& record : ann_records) {
        if (std::find(family_names.begin(), family_names.end(), record.family) ==
            family_names.end()) {
            family_names.push_back(record.family);
        }
    }
    std::vector<double> ann_mses;
    for (const auto& name : family_names) {
        std::vector<TrialRecord> block;
        for (const auto& record : ann_records) {
            if (record.family == name) block.push_back(record);
        }
        report.ann_families.push_back({name, summarize_grid(block)});
        for (const auto& record : block) {
            if (!record.failed) ann_mses.push_back(record.test_report.mse);
        }
    }
    report.garch_models.assign(garch_evals.begin(), garch_evals.end());

    std::vector<double> garch_mses;
    for (const auto& eval : garch_evals) garch_mses.push_back(eval.mse);

    if (ann_mses.size() >= 2 && garch_mses.size() >= 2) {
        report.t_test = welch_t_test(ann_mses, garch_mses);
    } else {
        report.t_test.test = "welch_t";
        report.t_test.statistic = 0.0;
        report.t_test.p_value = 1.0;
    }
    report.significant = report.t_test.reject;

    for (const auto& eval : garch_evals) report.bars.push_back({eval.model, eval.mse});
    for (const auto& block : report.ann_families) {
        report.bars.push_back({block.family, block.summary.test_mse.average});
    }
    return report;
}

ComparisonReport compare(std::span<const TrialRecord> ann_records,
                         std::span<const GarchFit> fits, const TimeSeriesFrame& frame,
                         const SplitSpec& split) {
    std::vector<GarchEval> evals;
    evals.reserve(fits.size());
    for (const auto& fit : fits) evals.push_back(evaluate_garch_on_test(fit, frame, split));
    return compare(ann_records, evals);
}

}  // namespace fxcast
