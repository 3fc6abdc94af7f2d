#pragma once

#include <span>
#include <string>
#include <vector>

namespace fxcast {

/// Mean squared error; zero means perfect prediction.
double mse(std::span<const double> actual, std::span<const double> predicted);

/// Pearson correlation coefficient in [-1, 1]. Throws on zero variance.
double correlation(std::span<const double> actual, std::span<const double> predicted);

/// Theil inequality coefficient RMSE / (RMS(actual) + RMS(predicted)),
/// bounded in [0, 1]; 0 is a perfect forecast.
double theil(std::span<const double> actual, std::span<const double> predicted);

struct ForecastReport {
    std::string partition;
    std::size_t n = 0;
    double mse = 0.0;
    double r = 0.0;
    double theil = 0.0;

    static std::string csv_header();  // "partition,n,mse,r,theil"
    std::string csv_row() const;
};

ForecastReport evaluate_forecast(const std::string& partition, std::span<const double> actual,
                                 std::span<const double> predicted);

std::string forecast_reports_csv(std::span<const ForecastReport> reports);

}  // namespace fxcast
