#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fxcast/common.hpp"
#include "fxcast/dataio.hpp"
#include "fxcast/rng.hpp"
#include "fxcast/simulate.hpp"
#include "fxcast/stattests.hpp"

using namespace fxcast;

namespace {

std::string write_temp_csv(const std::string& name, const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << body;
    return path.string();
}

}  // namespace

TEST_CASE("date parsing and ordering") {
    const Date d = Date::parse("2016-04-08");
    CHECK(d.year == 2016);
    CHECK(d.month == 4);
    CHECK(d.day == 8);
    CHECK(d.to_string() == "2016-04-08");
    CHECK(Date::parse("2009-01-01") < d);
    CHECK(Date::from_serial(d.serial()) == d);
    CHECK_THROWS_AS(Date::parse("2016-13-01"), std::invalid_argument);
    CHECK_THROWS_AS(Date::parse("2015-02-29"), std::invalid_argument);
    CHECK_THROWS_AS(Date::parse("08/04/2016"), std::invalid_argument);
}

TEST_CASE("load_frame drops rows with blank cells and counts them") {
    const auto path = write_temp_csv("fxcast_blank.csv",
                                     "Date,A,B\n"
                                     "2020-01-01,1.0,2.0\n"
                                     "2020-01-02,,3.0\n"
                                     "2020-01-03,2.5,4.0\n");
    const LoadResult loaded = load_frame(path, "Date");
    CHECK(loaded.frame.rows() == 2);
    CHECK(loaded.dropped_rows == 1);
    CHECK(loaded.frame.column("A")[1] == doctest::Approx(2.5));
}

TEST_CASE("load_frame sorts out-of-order dates ascending") {
    const auto path = write_temp_csv("fxcast_order.csv",
                                     "Date,A\n"
                                     "2020-01-03,3\n"
                                     "2020-01-01,1\n"
                                     "2020-01-02,2\n");
    const LoadResult loaded = load_frame(path, "Date");
    REQUIRE(loaded.frame.rows() == 3);
    CHECK(loaded.frame.dates.front().to_string() == "2020-01-01");
    CHECK(loaded.frame.column("A") == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("load_frame errors") {
    CHECK_THROWS_AS(load_frame("/nonexistent/file.csv", "Date"), std::invalid_argument);

    const auto dup = write_temp_csv("fxcast_dup.csv",
                                    "Date,A\n"
                                    "2020-01-01,1\n"
                                    "2020-01-01,2\n");
    CHECK_THROWS_WITH_AS(load_frame(dup, "Date").frame.validate(),
                         doctest::Contains("duplicate dates"), std::invalid_argument);

    const auto bad_cell = write_temp_csv("fxcast_badcell.csv",
                                         "Date,A\n"
                                         "2020-01-01,abc\n"
                                         "2020-01-02,1\n");
    CHECK_THROWS_WITH_AS(load_frame(bad_cell, "Date"), doctest::Contains("unparseable"),
                         std::invalid_argument);

    const auto tiny = write_temp_csv("fxcast_tiny.csv",
                                     "Date,A\n"
                                     "2020-01-01,1\n"
                                     "2020-01-02,\n");
    CHECK_THROWS_WITH_AS(load_frame(tiny, "Date"), doctest::Contains("fewer than 2"),
                         std::invalid_argument);
}

TEST_CASE("csv round trip") {
    TimeSeriesFrame frame;
    frame.dates = {Date{2020, 1, 1}, Date{2020, 1, 2}, Date{2020, 1, 3}};
    frame.add_column("A", {1.25, -3.5, 0.0625});
    frame.add_column("B", {10.0, 20.0, 30.0});
    const auto path = std::filesystem::temp_directory_path() / "fxcast_roundtrip.csv";
    write_frame_csv(frame, path.string());
    const LoadResult loaded = load_frame(path.string(), "Date");
    CHECK(loaded.frame.column("A") == frame.column("A"));
    CHECK(loaded.frame.dates == frame.dates);
}

TEST_CASE("simple returns") {
    CHECK(simple_returns(std::vector<double>{100.0, 110.0, 99.0}) ==
          std::vector<double>{0.10, -0.10});
    CHECK(simple_returns(std::vector<double>{5.0, 5.0, 5.0}) == std::vector<double>{0.0, 0.0});
    // Oracle: high-precision ln(1.1).
    const auto log_ret = simple_returns(std::vector<double>{100.0, 110.0}, ReturnKind::Log);
    CHECK(log_ret[0] == doctest::Approx(0.09531017980432486).epsilon(1e-12));
    CHECK_THROWS_AS(simple_returns(std::vector<double>{0.0, 1.0}), numerical_error);
}

TEST_CASE("simple and log returns agree to first order") {
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        const double p0 = 1.0 + 9.0 * rng.uniform();
        double r = -0.5 + rng.uniform();  // keep |r| <= 0.5
        const std::vector<double> series{p0, p0 * (1.0 + r)};
        const double rs = simple_returns(series)[0];
        const double rl = simple_returns(series, ReturnKind::Log)[0];
        CHECK(std::fabs(rs - rl) <= rs * rs + 1e-12);
    }
}

TEST_CASE("first difference") {
    CHECK(first_difference(std::vector<double>{1.0, 3.0, 6.0}) == std::vector<double>{2.0, 3.0});
    CHECK(first_difference(std::vector<double>{4.0, 4.0, 4.0}) == std::vector<double>{0.0, 0.0});
}

TEST_CASE("first_difference inverts cumulative sums") {
    Rng rng(5);
    std::vector<double> x(200);
    for (auto& v : x) v = rng.normal();
    std::vector<double> cum(x.size() + 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) cum[i + 1] = cum[i] + x[i];
    const auto diff = first_difference(cum);
    REQUIRE(diff.size() == x.size());
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(diff[i] == doctest::Approx(x[i]).epsilon(1e-12));
}

TEST_CASE("differenced random walk rejects the unit root") {
    // Monte Carlo oracle: ADF on the differenced walk should reject nearly
    // always at the 5% level.
    int rejections = 0;
    const int reps = 100;
    for (int r = 0; r < reps; ++r) {
        Rng rng(1000 + static_cast<std::uint64_t>(r));
        std::vector<double> walk(400);
        double level = 0.0;
        for (auto& v : walk) {
            level += rng.normal();
            v = level;
        }
        const auto diff = first_difference(walk);
        if (adf_test(diff).summary.reject) ++rejections;
    }
    CHECK(rejections >= 95);
}

TEST_CASE("minmax rescale") {
    const auto [scaled, scale] = minmax_rescale(std::vector<double>{2.0, 4.0, 6.0});
    CHECK(scaled == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(scale.invert(0.5) == doctest::Approx(4.0));
    CHECK_THROWS_WITH_AS(minmax_rescale(std::vector<double>{5.0, 5.0, 5.0}),
                         doctest::Contains("degenerate"), numerical_error);

    Rng rng(3);
    std::vector<double> xs(100);
    for (auto& v : xs) v = rng.normal(10.0, 4.0);
    const auto [s2, sc2] = minmax_rescale(xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        CHECK(sc2.invert(s2[i]) == doctest::Approx(xs[i]).epsilon(1e-12));
        CHECK(s2[i] >= 0.0);
        CHECK(s2[i] <= 1.0);
    }
}

TEST_CASE("split sizes and partition property") {
    const SplitSpec spec;
    const SplitSizes s100 = split_sizes(100, spec);
    CHECK(s100.train == 70);
    CHECK(s100.validation == 15);
    CHECK(s100.test == 15);

    // Oracle: floor arithmetic at the paper's n = 1783.
    const SplitSizes s1783 = split_sizes(1783, spec);
    CHECK(s1783.train == 1248);
    CHECK(s1783.validation == 267);
    CHECK(s1783.test == 268);

    CHECK_THROWS_AS(split_sizes(100, SplitSpec{0.6, 0.15, 0.15}), std::invalid_argument);

    TimeSeriesFrame frame;
    frame.dates = synthetic_dates(37);
    std::vector<double> values(37);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<double>(i);
    frame.add_column("A", values);
    const SplitFrames parts = split_chronological(frame, spec);
    CHECK(parts.train.rows() + parts.validation.rows() + parts.test.rows() == frame.rows());
    std::vector<double> glued = parts.train.column("A");
    const auto& v2 = parts.validation.column("A");
    const auto& v3 = parts.test.column("A");
    glued.insert(glued.end(), v2.begin(), v2.end());
    glued.insert(glued.end(), v3.begin(), v3.end());
    CHECK(glued == values);
}

TEST_CASE("describe") {
    const DescriptiveStats d = describe(std::vector<double>{-1.0, 0.0, 1.0});
    CHECK(d.mean == doctest::Approx(0.0));
    CHECK(d.median == doctest::Approx(0.0));
    CHECK(d.skewness == doctest::Approx(0.0));
    CHECK(d.min == -1.0);
    CHECK(d.max == 1.0);
    CHECK(d.std_dev == doctest::Approx(1.0));

    CHECK_THROWS_WITH_AS(describe(std::vector<double>{3.0, 3.0, 3.0}),
                         doctest::Contains("zero variance"), numerical_error);
}

TEST_CASE("describe matches normal moments at scale") {
    Rng rng(42);
    std::vector<double> draws(100000);
    for (auto& v : draws) v = rng.normal();
    const DescriptiveStats d = describe(draws);
    CHECK(std::fabs(d.kurtosis - 3.0) < 0.1);
    CHECK(std::fabs(d.skewness) < 0.05);
    CHECK(d.std_dev == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("rescaled mean obeys the affine law") {
    Rng rng(9);
    std::vector<double> xs(500);
    for (auto& v : xs) v = rng.normal(3.0, 2.0);
    const DescriptiveStats raw = describe(xs);
    const auto [scaled, scale] = minmax_rescale(xs);
    const DescriptiveStats after = describe(scaled);
    const double expected = (raw.mean - scale.min) / (scale.max - scale.min);
    CHECK(after.mean == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("describe_frame keys by column name") {
    TimeSeriesFrame frame;
    frame.dates = synthetic_dates(4);
    frame.add_column("FX1", {1.0, 2.0, 3.0, 5.0});
    frame.add_column("FX4", {2.0, 1.0, 4.0, 3.0});
    const auto j = describe_frame(frame);
    CHECK(j.contains("FX1"));
    CHECK(j.contains("FX4"));
    CHECK(j["FX1"]["max"] == 5.0);
}
