#pragma once

// Value types shared by every part of the library: the observed series, the
// variance-interval labelling, segmentations and scale estimates.
//
// Index convention: time indices are 1-based. A breakpoint t_k is the LAST
// index of segment k, so segment k covers t_{k-1}+1 .. t_k with t_0 = 0 and
// t_K = n.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hetseg {

enum class ErrorCode {
    LengthMismatch,
    EmptyInterval,
    NonFiniteValue,
    InvalidSeries,
    InvalidSegmentation,
    TooShort,
    IntervalTooSparse,
    ZeroScale,
    InvalidRange,
    KmaxTooLarge,
    TooManySegmentations,
    NonPositiveSigma,
    DegenerateFit,
    InvalidArgument,
    ParseError,
    DuplicateDate,
    UnknownColumn,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyInterval: return "EmptyInterval";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::InvalidSeries: return "InvalidSeries";
    case ErrorCode::InvalidSegmentation: return "InvalidSegmentation";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::IntervalTooSparse: return "IntervalTooSparse";
    case ErrorCode::ZeroScale: return "ZeroScale";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::KmaxTooLarge: return "KmaxTooLarge";
    case ErrorCode::TooManySegmentations: return "TooManySegmentations";
    case ErrorCode::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateDate: return "DuplicateDate";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    }
    return "Unknown";
}

/// Every failure raised by the library. `detail()` carries the offending
/// interval label (scale errors) or input line (parse errors) when relevant.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what, std::optional<long> detail = std::nullopt)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(detail) {}

    ErrorCode code() const noexcept { return code_; }
    std::optional<long> detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::optional<long> detail_;
};

using Day = std::chrono::sys_days;

/// Ordered real observations, optionally stamped with strictly increasing days.
class TimeSeries {
public:
    explicit TimeSeries(std::vector<double> values, std::optional<std::vector<Day>> dates = std::nullopt)
        : values_(std::move(values)), dates_(std::move(dates)) {
        if (values_.size() < 2) {
            throw Error(ErrorCode::InvalidSeries, "a series needs at least 2 observations");
        }
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i])) {
                throw Error(ErrorCode::NonFiniteValue, "value at index " + std::to_string(i + 1) + " is not finite",
                            static_cast<long>(i + 1));
            }
        }
        if (dates_) {
            if (dates_->size() != values_.size()) {
                throw Error(ErrorCode::LengthMismatch, "dates and values differ in length");
            }
            for (std::size_t i = 1; i < dates_->size(); ++i) {
                if ((*dates_)[i] <= (*dates_)[i - 1]) {
                    throw Error(ErrorCode::InvalidSeries, "dates must be strictly increasing",
                                static_cast<long>(i + 1));
                }
            }
        }
    }

    std::size_t size() const noexcept { return values_.size(); }
    const std::vector<double>& values() const noexcept { return values_; }
    bool has_dates() const noexcept { return dates_.has_value(); }
    const std::vector<Day>& dates() const { return dates_.value(); }

    /// 1-based access.
    double operator()(std::size_t t) const { return values_[t - 1]; }

private:
    std::vector<double> values_;
    std::optional<std::vector<Day>> dates_;
};

/// Assignment of every time index to one of J fixed variance intervals.
/// Labels are 1..J and need not form contiguous runs.
class VarianceIntervalMap {
public:
    VarianceIntervalMap(std::vector<int> labels, int interval_count)
        : labels_(std::move(labels)), counts_(static_cast<std::size_t>(std::max(interval_count, 0)), 0) {
        if (interval_count < 1) {
            throw Error(ErrorCode::InvalidArgument, "interval count must be at least 1");
        }
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            const int label = labels_[i];
            if (label < 1 || label > interval_count) {
                throw Error(ErrorCode::InvalidArgument,
                            "label " + std::to_string(label) + " at index " + std::to_string(i + 1) + " outside 1.." +
                                std::to_string(interval_count));
            }
            ++counts_[static_cast<std::size_t>(label - 1)];
        }
        for (std::size_t j = 0; j < counts_.size(); ++j) {
            if (counts_[j] == 0) {
                throw Error(ErrorCode::EmptyInterval, "interval " + std::to_string(j + 1) + " has no index",
                            static_cast<long>(j + 1));
            }
        }
    }

    /// Single interval covering 1..n.
    static VarianceIntervalMap uniform(std::size_t n) { return {std::vector<int>(n, 1), 1}; }

    std::size_t size() const noexcept { return labels_.size(); }
    int interval_count() const noexcept { return static_cast<int>(counts_.size()); }
    const std::vector<int>& labels() const noexcept { return labels_; }
    /// Label of 1-based index t.
    int label(std::size_t t) const { return labels_[t - 1]; }
    /// n_j for 1-based label j.
    std::size_t count(int j) const { return counts_[static_cast<std::size_t>(j - 1)]; }

private:
    std::vector<int> labels_;
    std::vector<std::size_t> counts_;
};

struct SegmentRange {
    std::size_t first; // 1-based, inclusive
    std::size_t last;  // 1-based, inclusive
    std::size_t length() const noexcept { return last - first + 1; }
    friend bool operator==(const SegmentRange&, const SegmentRange&) = default;
};

/// K segments of 1..n described by their K-1 interior breakpoints and K
/// fitted means.
class Segmentation {
public:
    Segmentation(std::size_t n, std::vector<std::size_t> breakpoints, std::vector<double> means)
        : n_(n), breakpoints_(std::move(breakpoints)), means_(std::move(means)) {
        if (n_ < 1) {
            throw Error(ErrorCode::InvalidSegmentation, "empty index range");
        }
        std::size_t prev = 0;
        for (std::size_t t : breakpoints_) {
            if (t <= prev || t >= n_) {
                throw Error(ErrorCode::InvalidSegmentation,
                            "breakpoints must be strictly increasing within 1..n-1");
            }
            prev = t;
        }
        if (means_.size() != breakpoints_.size() + 1) {
            throw Error(ErrorCode::InvalidSegmentation, "need exactly one mean per segment");
        }
    }

    std::size_t n() const noexcept { return n_; }
    std::size_t segment_count() const noexcept { return breakpoints_.size() + 1; }
    const std::vector<std::size_t>& breakpoints() const noexcept { return breakpoints_; }
    const std::vector<double>& means() const noexcept { return means_; }

    /// Segment k, 1-based.
    SegmentRange segment(std::size_t k) const {
        const std::size_t first = k == 1 ? 1 : breakpoints_[k - 2] + 1;
        const std::size_t last = k == segment_count() ? n_ : breakpoints_[k - 1];
        return {first, last};
    }

    std::vector<SegmentRange> segments() const {
        std::vector<SegmentRange> out;
        out.reserve(segment_count());
        for (std::size_t k = 1; k <= segment_count(); ++k) out.push_back(segment(k));
        return out;
    }

    std::vector<std::size_t> segment_lengths() const {
        std::vector<std::size_t> out;
        for (const auto& s : segments()) out.push_back(s.length());
        return out;
    }

    /// Fitted mean at 1-based index t.
    double fitted(std::size_t t) const {
        const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t);
        return means_[static_cast<std::size_t>(it - breakpoints_.begin())];
    }

    friend bool operator==(const Segmentation&, const Segmentation&) = default;

private:
    std::size_t n_;
    std::vector<std::size_t> breakpoints_;
    std::vector<double> means_;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <class T>
T parse_number(std::string_view token) {
    T value{};
    const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
        throw Error(ErrorCode::ParseError, "bad number '" + std::string(token) + "'");
    }
    return value;
}

} // namespace detail

/// One-line text form: `n=<n> breaks=<t1,...> means=<m1,...>`. Doubles use the
/// shortest round-trip representation.
inline std::string serialize(const Segmentation& seg) {
    std::string out = "n=" + std::to_string(seg.n()) + " breaks=";
    for (std::size_t i = 0; i < seg.breakpoints().size(); ++i) {
        if (i) out += ',';
        out += std::to_string(seg.breakpoints()[i]);
    }
    out += " means=";
    for (std::size_t i = 0; i < seg.means().size(); ++i) {
        if (i) out += ',';
        out += detail::format_double(seg.means()[i]);
    }
    return out;
}

inline Segmentation parse_segmentation(std::string_view text) {
    auto field = [&](std::string_view key) -> std::string_view {
        const auto pos = text.find(key);
        if (pos == std::string_view::npos) {
            throw Error(ErrorCode::ParseError, "missing field '" + std::string(key) + "'");
        }
        auto rest = text.substr(pos + key.size());
        return rest.substr(0, rest.find(' '));
    };
    auto split = [](std::string_view list) {
        std::vector<std::string_view> parts;
        while (!list.empty()) {
            const auto comma = list.find(',');
            parts.push_back(list.substr(0, comma));
            if (comma == std::string_view::npos) break;
            list.remove_prefix(comma + 1);
        }
        return parts;
    };
    const auto n = detail::parse_number<std::size_t>(field("n="));
    std::vector<std::size_t> breaks;
    for (auto tok : split(field("breaks="))) breaks.push_back(detail::parse_number<std::size_t>(tok));
    std::vector<double> means;
    for (auto tok : split(field("means="))) means.push_back(detail::parse_number<double>(tok));
    return {n, std::move(breaks), std::move(means)};
}

/// Robust standard deviation per variance interval (index j-1 holds sigma_j).
class ScaleEstimates {
public:
    explicit ScaleEstimates(std::vector<double> sigma) : sigma_(std::move(sigma)) {
        if (sigma_.empty()) {
            throw Error(ErrorCode::InvalidArgument, "no scale estimates");
        }
        for (std::size_t j = 0; j < sigma_.size(); ++j) {
            if (!(sigma_[j] > 0.0) || !std::isfinite(sigma_[j])) {
                throw Error(ErrorCode::ZeroScale, "scale of interval " + std::to_string(j + 1) + " is not positive",
                            static_cast<long>(j + 1));
            }
        }
    }

    std::size_t size() const noexcept { return sigma_.size(); }
    const std::vector<double>& values() const noexcept { return sigma_; }
    /// sigma for 1-based label j.
    double sigma(int j) const { return sigma_[static_cast<std::size_t>(j - 1)]; }

private:
    std::vector<double> sigma_;
};

/// Per-K contrast values and the K chosen by each model-selection criterion.
struct SelectionReport {
    std::vector<double> contrast; // contrast[K-1]
    std::map<std::string, std::size_t> chosen;
    std::map<std::string, std::map<std::string, double>> diagnostics;
    std::vector<std::string> warnings;
};

struct CheckedInput {
    TimeSeries series;
    VarianceIntervalMap map;
};

inline void validate_inputs(const TimeSeries& series, const VarianceIntervalMap& map) {
    if (series.size() != map.size()) {
        throw Error(ErrorCode::LengthMismatch, "series has " + std::to_string(series.size()) +
                                                   " values but the interval map has " +
                                                   std::to_string(map.size()) + " labels");
    }
}

/// Builds and checks a (series, interval map) pair from raw columns.
inline CheckedInput validate_inputs(std::vector<double> values, std::vector<int> labels, int interval_count,
                                    std::optional<std::vector<Day>> dates = std::nullopt) {
    if (values.size() != labels.size()) {
        throw Error(ErrorCode::LengthMismatch, "series has " + std::to_string(values.size()) +
                                                   " values but " + std::to_string(labels.size()) + " labels");
    }
    CheckedInput out{TimeSeries(std::move(values), std::move(dates)),
                     VarianceIntervalMap(std::move(labels), interval_count)};
    validate_inputs(out.series, out.map);
    return out;
}

} // namespace hetseg
