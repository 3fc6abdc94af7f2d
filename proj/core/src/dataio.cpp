#include "fxcast/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "fxcast/common.hpp"

namespace fxcast {

// ===========================================================================
// Date
// ===========================================================================

std::int64_t Date::serial() const {
    // Days-from-civil, proleptic Gregorian (Hinnant's algorithm).
    const int y = year - (month <= 2 ? 1 : 0);
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

Date Date::from_serial(std::int64_t days) {
    const std::int64_t z = days + 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return Date{static_cast<int>(y + (m <= 2 ? 1 : 0)), static_cast<int>(m), static_cast<int>(d)};
}

Date Date::parse(const std::string& iso) {
    int y = 0, m = 0, d = 0;
    char dash1 = 0, dash2 = 0;
    std::istringstream in(iso);
    in >> y >> dash1 >> m >> dash2 >> d;
    if (!in || dash1 != '-' || dash2 != '-' || m < 1 || m > 12 || d < 1 || d > 31) {
        throw std::invalid_argument("unparseable date '" + iso + "' (expected YYYY-MM-DD)");
    }
    Date date{y, m, d};
    if (Date::from_serial(date.serial()) != date) {
        throw std::invalid_argument("invalid calendar date '" + iso + "'");
    }
    return date;
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
}

// ===========================================================================
// TimeSeriesFrame
// ===========================================================================

bool TimeSeriesFrame::has_column(const std::string& name) const {
    return std::find(names.begin(), names.end(), name) != names.end();
}

const std::vector<double>& TimeSeriesFrame::column(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw std::invalid_argument("missing column '" + name + "'");
    return columns[static_cast<std::size_t>(it - names.begin())];
}

void TimeSeriesFrame::add_column(const std::string& name, std::vector<double> values) {
    if (has_column(name)) throw std::invalid_argument("duplicate column '" + name + "'");
    if (values.size() != rows()) throw std::invalid_argument("column length mismatch");
    names.push_back(name);
    columns.push_back(std::move(values));
}

TimeSeriesFrame TimeSeriesFrame::slice(std::size_t begin, std::size_t end) const {
    if (begin > end || end > rows()) throw std::invalid_argument("slice out of range");
    TimeSeriesFrame out;
    out.dates.assign(dates.begin() + begin, dates.begin() + end);
    out.names = names;
    out.columns.reserve(columns.size());
    for (const auto& col : columns) {
        out.columns.emplace_back(col.begin() + begin, col.begin() + end);
    }
    return out;
}

void TimeSeriesFrame::validate() const {
    if (rows() < 2) throw std::invalid_argument("frame needs at least 2 rows");
    if (names.size() != columns.size()) throw std::invalid_argument("name/column count mismatch");
    for (const auto& col : columns) {
        if (col.size() != rows()) throw std::invalid_argument("ragged column");
        for (double v : col) {
            if (!std::isfinite(v)) throw std::invalid_argument("non-finite cell");
        }
    }
    for (std::size_t i = 1; i < dates.size(); ++i) {
        if (!(dates[i - 1] < dates[i])) {
            throw std::invalid_argument("dates not strictly increasing");
        }
    }
}

// ===========================================================================
// CSV load / store
// ===========================================================================

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& raw, std::size_t line_no, const std::string& column) {
    double value = 0.0;
    const auto* first = raw.data();
    const auto* last = raw.data() + raw.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw std::invalid_argument("unparseable cell '" + raw + "' in column '" + column +
                                    "' at line " + std::to_string(line_no));
    }
    return value;
}

}  // namespace

LoadResult load_frame(const std::string& path, const std::string& date_column) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("unreadable file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty file '" + path + "'");
    const auto header = split_csv_line(line);
    if (header.empty()) throw std::invalid_argument("missing header row");

    std::size_t date_idx = header.size();
    std::vector<std::string> value_names;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string name = trim(header[i]);
        if (name == date_column) {
            date_idx = i;
        } else {
            value_names.push_back(name);
        }
    }
    if (date_idx == header.size()) {
        throw std::invalid_argument("date column '" + date_column + "' not in header");
    }

    struct Row {
        Date date;
        std::vector<double> values;
    };
    std::vector<Row> rows;
    std::size_t dropped = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw std::invalid_argument("wrong cell count at line " + std::to_string(line_no));
        }
        bool missing = false;
        for (const auto& c : cells) {
            if (trim(c).empty()) {
                missing = true;
                break;
            }
        }
        if (missing) {
            ++dropped;
            continue;
        }
        Row row;
        row.date = Date::parse(trim(cells[date_idx]));
        row.values.reserve(value_names.size());
        std::size_t vi = 0;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i == date_idx) continue;
            row.values.push_back(parse_cell(trim(cells[i]), line_no, value_names[vi++]));
        }
        rows.push_back(std::move(row));
    }

    if (rows.size() < 2) throw std::invalid_argument("fewer than 2 clean rows");

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].date == rows[i - 1].date) {
            throw std::invalid_argument("duplicate dates: " + rows[i].date.to_string());
        }
    }

    LoadResult out;
    out.dropped_rows = dropped;
    out.frame.dates.reserve(rows.size());
    out.frame.names = value_names;
    out.frame.columns.assign(value_names.size(), {});
    for (auto& col : out.frame.columns) col.reserve(rows.size());
    for (const auto& row : rows) {
        out.frame.dates.push_back(row.date);
        for (std::size_t i = 0; i < row.values.size(); ++i) {
            out.frame.columns[i].push_back(row.values[i]);
        }
    }
    out.frame.validate();
    return out;
}

void write_frame_csv(const TimeSeriesFrame& frame, const std::string& path,
                     const std::string& date_column) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write '" + path + "'");
    out << date_column;
    for (const auto& name : frame.names) out << ',' << name;
    out << '\n';
    out.precision(17);
    for (std::size_t r = 0; r < frame.rows(); ++r) {
        out << frame.dates[r].to_string();
        for (const auto& col : frame.columns) out << ',' << col[r];
        out << '\n';
    }
}

// ===========================================================================
// Derivations
// ===========================================================================

std::vector<double> simple_returns(std::span<const double> series, ReturnKind kind) {
    if (series.size() < 2) throw std::invalid_argument("returns need n >= 2");
    std::vector<double> out(series.size() - 1);
    for (std::size_t t = 1; t < series.size(); ++t) {
        if (kind == ReturnKind::Simple) {
            if (series[t - 1] == 0.0) throw numerical_error("zero price in simple-return mode");
            out[t - 1] = (series[t] - series[t - 1]) / series[t - 1];
        } else {
            const double ratio = series[t] / series[t - 1];
            if (!(ratio > 0.0)) throw numerical_error("non-positive price ratio in log mode");
            out[t - 1] = std::log(ratio);
        }
    }
    return out;
}

std::vector<double> first_difference(std::span<const double> series) {
    if (series.size() < 2) throw std::invalid_argument("difference needs n >= 2");
    std::vector<double> out(series.size() - 1);
    for (std::size_t t = 1; t < series.size(); ++t) out[t - 1] = series[t] - series[t - 1];
    return out;
}

std::vector<double> MinMaxScale::apply(std::span<const double> xs) const {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = apply(xs[i]);
    return out;
}

std::vector<double> MinMaxScale::invert(std::span<const double> xs) const {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = invert(xs[i]);
    return out;
}

const MinMaxScale& ScalingTransform::at(const std::string& name) const {
    const auto it = columns.find(name);
    if (it == columns.end()) throw std::invalid_argument("no scale for column '" + name + "'");
    return it->second;
}

nlohmann::json ScalingTransform::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, scale] : columns) {
        j[name] = {{"min", scale.min}, {"max", scale.max}};
    }
    return j;
}

ScalingTransform ScalingTransform::from_json(const nlohmann::json& j) {
    ScalingTransform t;
    for (auto it = j.begin(); it != j.end(); ++it) {
        t.columns[it.key()] = MinMaxScale{it.value().at("min").get<double>(),
                                          it.value().at("max").get<double>()};
    }
    return t;
}

std::pair<std::vector<double>, MinMaxScale> minmax_rescale(std::span<const double> series) {
    if (series.empty()) throw std::invalid_argument("rescale needs a non-empty series");
    const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
    if (!(*hi > *lo)) throw numerical_error("degenerate range: max equals min");
    MinMaxScale scale{*lo, *hi};
    return {scale.apply(series), scale};
}

namespace {

ScalingTransform fit_scaling_range(const TimeSeriesFrame& frame,
                                   const std::vector<std::string>& names, std::size_t begin,
                                   std::size_t end) {
    if (begin >= end || end > frame.rows()) throw std::invalid_argument("bad scaling row range");
    ScalingTransform t;
    for (const auto& name : names) {
        const auto& col = frame.column(name);
        const auto lo = std::min_element(col.begin() + begin, col.begin() + end);
        const auto hi = std::max_element(col.begin() + begin, col.begin() + end);
        if (!(*hi > *lo)) {
            throw numerical_error("degenerate range in column '" + name + "'");
        }
        t.columns[name] = MinMaxScale{*lo, *hi};
    }
    return t;
}

}  // namespace

ScalingTransform fit_scaling(const TimeSeriesFrame& frame, const std::vector<std::string>& names) {
    return fit_scaling_range(frame, names, 0, frame.rows());
}

ScalingTransform fit_scaling(const TimeSeriesFrame& frame, const std::vector<std::string>& names,
                             std::size_t begin, std::size_t end) {
    return fit_scaling_range(frame, names, begin, end);
}

// ===========================================================================
// Splits
// ===========================================================================

void SplitSpec::validate() const {
    for (double f : {train_frac, val_frac, test_frac}) {
        if (!(f > 0.0 && f < 1.0)) throw std::invalid_argument("split fractions must lie in (0,1)");
    }
    if (std::fabs(train_frac + val_frac + test_frac - 1.0) > 1e-9) {
        throw std::invalid_argument("split fractions must sum to 1");
    }
}

SplitSizes split_sizes(std::size_t n, const SplitSpec& spec) {
    spec.validate();
    if (n < 10) throw std::invalid_argument("split needs n >= 10");
    SplitSizes s;
    s.train = static_cast<std::size_t>(std::floor(spec.train_frac * static_cast<double>(n)));
    s.validation = static_cast<std::size_t>(std::floor(spec.val_frac * static_cast<double>(n)));
    s.test = n - s.train - s.validation;  // remainder goes to the test block
    return s;
}

SplitFrames split_chronological(const TimeSeriesFrame& frame, const SplitSpec& spec) {
    const SplitSizes s = split_sizes(frame.rows(), spec);
    SplitFrames out;
    out.train = frame.slice(0, s.train);
    out.validation = frame.slice(s.train, s.train + s.validation);
    out.test = frame.slice(s.train + s.validation, frame.rows());
    return out;
}

// ===========================================================================
// Descriptive statistics
// ===========================================================================

DescriptiveStats describe(std::span<const double> series) {
    const std::size_t n = series.size();
    if (n < 2) throw std::invalid_argument("describe needs n >= 2");

    DescriptiveStats d;
    d.mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : series) {
        const double c = x - d.mean;
        m2 += c * c;
        m3 += c * c * c;
        m4 += c * c * c * c;
    }
    const double nn = static_cast<double>(n);
    d.std_dev = std::sqrt(m2 / (nn - 1.0));
    m2 /= nn;
    m3 /= nn;
    m4 /= nn;
    if (m2 <= 0.0) throw numerical_error("zero variance: skewness/kurtosis undefined");
    d.skewness = m3 / std::pow(m2, 1.5);
    d.kurtosis = m4 / (m2 * m2);

    std::vector<double> sorted(series.begin(), series.end());
    std::sort(sorted.begin(), sorted.end());
    d.min = sorted.front();
    d.max = sorted.back();
    d.median = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    return d;
}

nlohmann::json DescriptiveStats::to_json() const {
    return {{"mean", mean},     {"median", median},       {"max", max},
            {"min", min},       {"std_dev", std_dev},     {"skewness", skewness},
            {"kurtosis", kurtosis}};
}

nlohmann::json describe_frame(const TimeSeriesFrame& frame) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& name : frame.names) {
        j[name] = describe(frame.column(name)).to_json();
    }
    return j;
}

}  // namespace fxcast
