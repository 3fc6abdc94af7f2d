#include "fxcast/metrics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fxcast/common.hpp"

namespace fxcast {

namespace {

void check_lengths(std::span<const double> a, std::span<const double> p) {
    if (a.size() != p.size()) throw std::invalid_argument("length mismatch");
    if (a.empty()) throw std::invalid_argument("empty input");
}

}  // namespace

double mse(std::span<const double> actual, std::span<const double> predicted) {
    check_lengths(actual, predicted);
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double e = actual[i] - predicted[i];
        sum += e * e;
    }
    return sum / static_cast<double>(actual.size());
}

double correlation(std::span<const double> actual, std::span<const double> predicted) {
    check_lengths(actual, predicted);
    if (actual.size() < 2) throw std::invalid_argument("correlation needs n >= 2");
    const double n = static_cast<double>(actual.size());
    double ma = 0.0, mp = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        ma += actual[i];
        mp += predicted[i];
    }
    ma /= n;
    mp /= n;
    double saa = 0.0, spp = 0.0, sap = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double da = actual[i] - ma;
        const double dp = predicted[i] - mp;
        saa += da * da;
        spp += dp * dp;
        sap += da * dp;
    }
    if (saa <= 0.0 || spp <= 0.0) throw numerical_error("zero variance in correlation input");
    double r = sap / std::sqrt(saa * spp);
    if (r > 1.0) r = 1.0;
    if (r < -1.0) r = -1.0;
    return r;
}

double theil(std::span<const double> actual, std::span<const double> predicted) {
    check_lengths(actual, predicted);
    const double n = static_cast<double>(actual.size());
    double se = 0.0, sa = 0.0, sp = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double e = actual[i] - predicted[i];
        se += e * e;
        sa += actual[i] * actual[i];
        sp += predicted[i] * predicted[i];
    }
    const double denom = std::sqrt(sa / n) + std::sqrt(sp / n);
    if (denom <= 0.0) throw numerical_error("theil undefined: both inputs all-zero");
    return std::sqrt(se / n) / denom;
}

ForecastReport evaluate_forecast(const std::string& partition, std::span<const double> actual,
                                 std::span<const double> predicted) {
    ForecastReport rep;
    rep.partition = partition;
    rep.n = actual.size();
    rep.mse = mse(actual, predicted);
    rep.r = correlation(actual, predicted);
    rep.theil = theil(actual, predicted);
    return rep;
}

std::string ForecastReport::csv_header() { return "partition,n,mse,r,theil"; }

std::string ForecastReport::csv_row() const {
    std::ostringstream out;
    out.precision(17);
    out << partition << ',' << n << ',' << mse << ',' << r << ',' << theil;
    return out.str();
}

std::string forecast_reports_csv(std::span<const ForecastReport> reports) {
    std::ostringstream out;
    out << ForecastReport::csv_header() << '\n';
    for (const auto& rep : reports) out << rep.csv_row() << '\n';
    return out.str();
}

}  // namespace fxcast
