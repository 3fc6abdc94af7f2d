#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fxcast/common.hpp"
#include "fxcast/metrics.hpp"
#include "fxcast/rng.hpp"

using namespace fxcast;

TEST_CASE("mse basics") {
    const std::vector<double> y{1.0, 2.0, 3.0};
    CHECK(mse(y, y) == 0.0);
    CHECK(mse(std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 1.0}) == 1.0);
    CHECK(mse(std::vector<double>{1.0, 2.0, 3.0}, std::vector<double>{1.0, 1.0, 4.0}) ==
          doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(mse(y, std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(mse(std::vector<double>{}, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("correlation basics") {
    const std::vector<double> y{1.0, 2.0, 4.0, 3.0};
    std::vector<double> neg(y.size());
    std::vector<double> affine(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        neg[i] = -y[i];
        affine[i] = 2.5 + 1.75 * y[i];
    }
    CHECK(correlation(y, y) == doctest::Approx(1.0));
    CHECK(correlation(y, neg) == doctest::Approx(-1.0));
    CHECK(correlation(y, affine) == doctest::Approx(1.0));
    CHECK_THROWS_AS(correlation(y, std::vector<double>{1.0, 1.0, 1.0, 1.0}), numerical_error);
}

TEST_CASE("theil basics") {
    const std::vector<double> y{1.0, 2.0, 3.0};
    CHECK(theil(y, y) == 0.0);
    CHECK(theil(std::vector<double>{1.0, 1.0}, std::vector<double>{0.0, 0.0}) ==
          doctest::Approx(1.0));
    // Hand arithmetic: RMSE = sqrt(12.5), RMS(actual) = sqrt(12.5).
    CHECK(theil(std::vector<double>{3.0, 4.0}, std::vector<double>{0.0, 0.0}) ==
          doctest::Approx(1.0));
    CHECK_THROWS_AS(theil(std::vector<double>{0.0, 0.0}, std::vector<double>{0.0, 0.0}),
                    numerical_error);
}

TEST_CASE("randomized bound and symmetry properties") {
    Rng rng(2024);
    for (int i = 0; i < 10000; ++i) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 6.0);
        std::vector<double> a(n), p(n);
        for (std::size_t j = 0; j < n; ++j) {
            a[j] = rng.normal(0.0, 5.0);
            p[j] = rng.normal(0.0, 5.0);
        }
        const double t = theil(a, p);
        CHECK(t >= 0.0);
        CHECK(t <= 1.0);
        CHECK(theil(p, a) == doctest::Approx(t).epsilon(1e-12));
        CHECK(mse(a, p) == doctest::Approx(mse(p, a)).epsilon(1e-12));
    }
}

TEST_CASE("correlation sign flip and affine invariance") {
    Rng rng(77);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> a(16), p(16);
        for (std::size_t j = 0; j < a.size(); ++j) {
            a[j] = rng.normal();
            p[j] = rng.normal();
        }
        const double r = correlation(a, p);
        std::vector<double> flipped(p.size());
        std::vector<double> shifted(p.size());
        const double scale = 0.5 + rng.uniform();
        const double offset = rng.normal();
        for (std::size_t j = 0; j < p.size(); ++j) {
            flipped[j] = -p[j];
            shifted[j] = offset + scale * p[j];
        }
        CHECK(correlation(a, flipped) == doctest::Approx(-r).epsilon(1e-10));
        CHECK(correlation(a, shifted) == doctest::Approx(r).epsilon(1e-10));
    }
}

TEST_CASE("mse under a common rescaling") {
    Rng rng(31);
    std::vector<double> a(64), p(64);
    for (std::size_t j = 0; j < a.size(); ++j) {
        a[j] = rng.normal(50.0, 4.0);
        p[j] = a[j] + rng.normal(0.0, 1.0);
    }
    const double lo = *std::min_element(a.begin(), a.end());
    const double hi = *std::max_element(a.begin(), a.end());
    std::vector<double> sa(a.size()), sp(p.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
        sa[j] = (a[j] - lo) / (hi - lo);
        sp[j] = (p[j] - lo) / (hi - lo);
    }
    CHECK(mse(sa, sp) == doctest::Approx(mse(a, p) / ((hi - lo) * (hi - lo))).epsilon(1e-10));
}

TEST_CASE("forecast report CSV layout") {
    const std::vector<double> a{1.0, 2.0, 3.0};
    const std::vector<double> p{1.1, 1.9, 3.2};
    const ForecastReport rep = evaluate_forecast("test", a, p);
    CHECK(rep.n == 3);
    const std::string csv = forecast_reports_csv(std::vector<ForecastReport>{rep});
    CHECK(csv.find("partition,n,mse,r,theil") == 0);
    CHECK(csv.find("test,3,") != std::string::npos);
}
