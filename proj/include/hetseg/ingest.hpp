#pragma once

// Reading daily series from delimited text and writing the flat result tables.
//
// Input: a header row, then one observation per line. Tab-separated when the
// header holds a tab, comma-separated otherwise. Dates are YYYY-MM-DD.

#include "hetseg/core.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hetseg {

enum class MissingPolicy { Drop, Error };
enum class IntervalScheme { CalendarMonth, ExplicitLabels };

struct IngestConfig {
    std::filesystem::path input_path;
    std::string date_column = "date";
    std::string value_column = "value";
    std::string label_column = "label"; // ExplicitLabels only
    MissingPolicy missing = MissingPolicy::Drop;
    IntervalScheme scheme = IntervalScheme::CalendarMonth;

    void validate() const {
        if (date_column == value_column ||
            (scheme == IntervalScheme::ExplicitLabels &&
             (label_column == date_column || label_column == value_column))) {
            throw Error(ErrorCode::InvalidArgument, "column names must be distinct");
        }
    }
};

struct ParsedSeries {
    TimeSeries series;
    VarianceIntervalMap map;
    std::vector<std::string> label_names; // label_names[j-1] names interval j
    std::size_t dropped = 0;              // rows skipped for a missing value
};

inline constexpr std::array<const char*, 12> kMonthNames{"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                         "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

/// Strict YYYY-MM-DD.
inline std::optional<Day> parse_iso_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    int y = 0;
    unsigned m = 0, d = 0;
    auto num = [&](std::size_t off, std::size_t len, auto& out) {
        for (std::size_t i = off; i < off + len; ++i) {
            if (s[i] < '0' || s[i] > '9') return false;
        }
        return std::from_chars(s.data() + off, s.data() + off + len, out).ec == std::errc{};
    };
    if (!num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d)) return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) return std::nullopt;
    return std::chrono::sys_days{ymd};
}

inline std::string format_iso_date(Day day) {
    const std::chrono::year_month_day ymd{day};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

inline unsigned month_of(Day day) { return static_cast<unsigned>(std::chrono::year_month_day{day}.month()); }

/// Month-of-year labels pooled over years, relabelled densely in calendar
/// order over the months that occur.
inline std::pair<VarianceIntervalMap, std::vector<std::string>> calendar_month_map(const std::vector<Day>& dates) {
    std::set<unsigned> present;
    for (Day d : dates) present.insert(month_of(d));
    std::map<unsigned, int> dense;
    std::vector<std::string> names;
    for (unsigned m : present) {
        dense[m] = static_cast<int>(names.size()) + 1;
        names.emplace_back(kMonthNames[m - 1]);
    }
    std::vector<int> labels;
    labels.reserve(dates.size());
    for (Day d : dates) labels.push_back(dense.at(month_of(d)));
    return {VarianceIntervalMap(std::move(labels), static_cast<int>(names.size())), std::move(names)};
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\r' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    while (true) {
        const auto pos = line.find(delim);
        out.push_back(trim(line.substr(0, pos)));
        if (pos == std::string_view::npos) break;
        line.remove_prefix(pos + 1);
    }
    return out;
}

inline std::optional<double> parse_value(std::string_view s) {
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

/// Orders label names numerically when all are integers, lexically otherwise.
inline bool label_less(const std::string& a, const std::string& b) {
    long x = 0, y = 0;
    const bool ia = std::from_chars(a.data(), a.data() + a.size(), x).ptr == a.data() + a.size() && !a.empty();
    const bool ib = std::from_chars(b.data(), b.data() + b.size(), y).ptr == b.data() + b.size() && !b.empty();
    if (ia && ib) return x < y;
    if (ia != ib) return ia;
    return a < b;
}

} // namespace detail

inline ParsedSeries parse_series(std::istream& in, const IngestConfig& cfg) {
    cfg.validate();
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::ParseError, "missing header row", 1);
    }
    const char delim = line.find('\t') != std::string::npos ? '\t' : ',';
    const auto header = detail::split_fields(line, delim);
    auto column = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw Error(ErrorCode::UnknownColumn, "no column named '" + name + "'");
        }
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t date_col = column(cfg.date_column);
    const std::size_t value_col = column(cfg.value_column);
    const bool explicit_labels = cfg.scheme == IntervalScheme::ExplicitLabels;
    const std::size_t label_col = explicit_labels ? column(cfg.label_column) : 0;
    const std::size_t needed = std::max({date_col, value_col, label_col}) + 1;

    struct Row {
        Day date;
        double value;
        std::string label;
        long line;
    };
    std::vector<Row> rows;
    std::size_t dropped = 0;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_fields(line, delim);
        if (fields.size() < needed) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + " has too few fields", line_no);
        }
        const auto date = parse_iso_date(fields[date_col]);
        if (!date) {
            throw Error(ErrorCode::ParseError,
                        "line " + std::to_string(line_no) + ": bad date '" + std::string(fields[date_col]) + "'",
                        line_no);
        }
        const auto value = detail::parse_value(fields[value_col]);
        if (!value) {
            if (cfg.missing == MissingPolicy::Drop) {
                ++dropped;
                continue;
            }
            throw Error(ErrorCode::ParseError,
                        "line " + std::to_string(line_no) + ": bad value '" + std::string(fields[value_col]) + "'",
                        line_no);
        }
        std::string label;
        if (explicit_labels) {
            label = std::string(fields[label_col]);
            if (label.empty()) {
                throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": empty label", line_no);
            }
        }
        rows.push_back({*date, *value, std::move(label), line_no});
    }

    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].date == rows[i - 1].date) {
            throw Error(ErrorCode::DuplicateDate,
                        "date " + format_iso_date(rows[i].date) + " appears more than once (line " +
                            std::to_string(std::max(rows[i].line, rows[i - 1].line)) + ")",
                        std::max(rows[i].line, rows[i - 1].line));
        }
    }
    if (rows.size() < 2) {
        throw Error(ErrorCode::InvalidSeries, "fewer than 2 usable observations");
    }

    std::vector<double> values;
    std::vector<Day> dates;
    for (const auto& r : rows) {
        values.push_back(r.value);
        dates.push_back(r.date);
    }

    if (!explicit_labels) {
        auto [map, names] = calendar_month_map(dates);
        return {TimeSeries(std::move(values), std::move(dates)), std::move(map), std::move(names), dropped};
    }

    std::vector<std::string> names;
    for (const auto& r : rows) names.push_back(r.label);
    std::sort(names.begin(), names.end(), detail::label_less);
    names.erase(std::unique(names.begin(), names.end()), names.end());
    std::map<std::string, int> dense;
    for (std::size_t j = 0; j < names.size(); ++j) dense[names[j]] = static_cast<int>(j) + 1;
    std::vector<int> labels;
    for (const auto& r : rows) labels.push_back(dense.at(r.label));
    VarianceIntervalMap map(std::move(labels), static_cast<int>(names.size()));
    return {TimeSeries(std::move(values), std::move(dates)), std::move(map), std::move(names), dropped};
}

inline ParsedSeries parse_series(const IngestConfig& cfg) {
    std::ifstream in(cfg.input_path);
    if (!in) {
        throw Error(ErrorCode::ParseError, "cannot open '" + cfg.input_path.string() + "'");
    }
    return parse_series(in, cfg);
}

/// Writes `date<TAB>value[<TAB>label]`; the output parses back to the same series.
inline void write_series(std::ostream& os, const TimeSeries& y, const VarianceIntervalMap* map = nullptr,
                         const std::vector<std::string>* names = nullptr) {
    os << "date\tvalue" << (map ? "\tlabel" : "") << '\n';
    for (std::size_t t = 1; t <= y.size(); ++t) {
        os << format_iso_date(y.dates()[t - 1]) << '\t' << detail::format_double(y(t));
        if (map) {
            const int j = map->label(t);
            os << '\t' << (names ? (*names)[static_cast<std::size_t>(j - 1)] : std::to_string(j));
        }
        os << '\n';
    }
}

inline void write_scales(std::ostream& os, const ScaleEstimates& scales, const std::vector<std::string>& names) {
    os << "month\tlabel\tsigma\n";
    for (int j = 1; j <= static_cast<int>(scales.size()); ++j) {
        os << names[static_cast<std::size_t>(j - 1)] << '\t' << j << '\t' << detail::format_double(scales.sigma(j))
           << '\n';
    }
}

/// One row per segment: its index, last date, last index and fitted mean.
inline void write_breaks(std::ostream& os, const Segmentation& seg, const TimeSeries& y) {
    os << "k\tlastDate\tlastIndex\tmean\n";
    for (std::size_t k = 1; k <= seg.segment_count(); ++k) {
        const auto r = seg.segment(k);
        os << k << '\t' << (y.has_dates() ? format_iso_date(y.dates()[r.last - 1]) : std::string("NA")) << '\t'
           << r.last << '\t' << detail::format_double(seg.means()[k - 1]) << '\n';
    }
}

inline void write_contrast(std::ostream& os, const std::vector<double>& costs) {
    os << "K\tsswg\n";
    for (std::size_t k = 1; k <= costs.size(); ++k) os << k << '\t' << detail::format_double(costs[k - 1]) << '\n';
}

} // namespace hetseg
