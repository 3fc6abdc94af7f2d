#include "fxcast/simulate.hpp"

#include <cmath>
#include <stdexcept>

#include "fxcast/rng.hpp"

namespace fxcast {

namespace {
constexpr int kBurnIn = 500;
}

std::vector<double> gen_garch(const GarchParams& params, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("gen_garch: n >= 1 required");
    params.validate(GarchFamily::Garch);
    const int q = static_cast<int>(params.alpha.size());
    const int p = static_cast<int>(params.beta.size());
    const double persistence = params.persistence();
    const double h_uncond = params.omega / (1.0 - persistence);

    Rng rng(seed);
    const int total = n + kBurnIn;
    std::vector<double> eps(total);
    std::vector<double> h(total);
    for (int t = 0; t < total; ++t) {
        double ht = params.omega;
        for (int i = 1; i <= q; ++i) {
            ht += params.alpha(i - 1) * (t - i >= 0 ? eps[t - i] * eps[t - i] : h_uncond);
        }
        for (int j = 1; j <= p; ++j) {
            ht += params.beta(j - 1) * (t - j >= 0 ? h[t - j] : h_uncond);
        }
        h[t] = ht;
        eps[t] = rng.normal() * std::sqrt(ht);
    }
    return {eps.begin() + kBurnIn, eps.end()};
}

std::vector<double> gen_egarch(const GarchParams& params, int n, std::uint64_t seed,
                               bool literal_leverage) {
    if (n < 1) throw std::invalid_argument("gen_egarch: n >= 1 required");
    params.validate(GarchFamily::Egarch);
    const int q = static_cast<int>(params.alpha.size());
    const int p = static_cast<int>(params.beta.size());
    if (params.gamma.size() != q) throw std::invalid_argument("gen_egarch: gamma size != q");

    // Stationary mean of log h, with E|z| = sqrt(2/pi) and E z = 0.
    const double expected_abs_z = std::sqrt(2.0 / 3.14159265358979323846);
    const double beta_sum = params.beta.sum();
    const double log_h_uncond =
        (params.omega + params.alpha.sum() * expected_abs_z) / (1.0 - beta_sum);

    Rng rng(seed);
    const int total = n + kBurnIn;
    std::vector<double> eps(total);
    std::vector<double> log_h(total);
    std::vector<double> z(total);
    for (int t = 0; t < total; ++t) {
        double value = params.omega;
        for (int j = 1; j <= p; ++j) {
            value += params.beta(j - 1) * (t - j >= 0 ? log_h[t - j] : log_h_uncond);
        }
        for (int i = 1; i <= q; ++i) {
            if (t - i < 0) {
                value += params.alpha(i - 1) * expected_abs_z;
                continue;
            }
            const double zk = z[t - i];
            const double lever = literal_leverage ? eps[t - i] / std::exp(log_h[t - i]) : zk;
            value += params.alpha(i - 1) * std::fabs(zk) + params.gamma(i - 1) * lever;
        }
        log_h[t] = value;
        z[t] = rng.normal();
        eps[t] = z[t] * std::exp(0.5 * value);
    }
    return {eps.begin() + kBurnIn, eps.end()};
}

std::vector<double> gen_random_walk(int n, double drift, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("gen_random_walk: n >= 1 required");
    Rng rng(seed);
    std::vector<double> y(n);
    double level = 0.0;
    for (int t = 0; t < n; ++t) {
        level += drift + rng.normal();
        y[t] = level;
    }
    return y;
}

std::vector<Date> synthetic_dates(int n) {
    std::vector<Date> dates(n);
    const std::int64_t start = Date{2000, 1, 1}.serial();
    for (int i = 0; i < n; ++i) dates[i] = Date::from_serial(start + i);
    return dates;
}

TimeSeriesFrame gen_narx_process(int n, std::uint64_t seed, double noise_sd) {
    if (n < 2) throw std::invalid_argument("gen_narx_process: n >= 2 required");
    Rng rng(seed);
    std::vector<double> u(n);
    std::vector<double> y(n);
    for (int t = 0; t < n; ++t) u[t] = rng.uniform(-1.0, 1.0);
    y[0] = 0.0;
    for (int t = 1; t < n; ++t) {
        y[t] = 0.5 * y[t - 1] + std::tanh(u[t - 1]) + noise_sd * rng.normal();
    }
    TimeSeriesFrame frame;
    frame.dates = synthetic_dates(n);
    frame.add_column("u", std::move(u));
    frame.add_column("y", std::move(y));
    return frame;
}

TimeSeriesFrame gen_signal_frame(int n, std::uint64_t seed, double noise_sd) {
    if (n < 2) throw std::invalid_argument("gen_signal_frame: n >= 2 required");
    Rng rng(seed);

    // x1: slow mean-reverting level around 55 with a seasonal swing, so it
    // spans a wide, smooth range like a futures price.
    std::vector<double> x1(n);
    double level = 55.0;
    for (int t = 0; t < n; ++t) {
        level += 0.02 * (55.0 - level) + 0.35 * rng.normal();
        x1[t] = level + 6.0 * std::sin(2.0 * 3.14159265358979323846 * t / 400.0);
    }

    TimeSeriesFrame frame;
    frame.dates = synthetic_dates(n);

    std::vector<double> target(n);
    for (int t = 0; t < n; ++t) target[t] = 0.98 * x1[t] + noise_sd * rng.normal();
    frame.add_column("FX1", std::move(target));
    frame.add_column("FX4", std::move(x1));

    // Return-like noise columns and level-like volatility indices.
    const char* return_cols[] = {"NIFTYR", "DJIAR", "HSR", "DR", "COP"};
    for (const char* name : return_cols) {
        std::vector<double> col(n);
        for (int t = 0; t < n; ++t) col[t] = 0.01 * rng.normal();
        frame.add_column(name, std::move(col));
    }
    const char* vix_cols[] = {"CV", "IV"};
    for (const char* name : vix_cols) {
        std::vector<double> col(n);
        double vix = 20.0;
        for (int t = 0; t < n; ++t) {
            vix += 0.05 * (20.0 - vix) + 0.8 * rng.normal();
            col[t] = std::max(vix, 5.0);
        }
        frame.add_column(name, std::move(col));
    }
    return frame;
}

}  // namespace fxcast
