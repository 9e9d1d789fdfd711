#pragma once

// Robust per-interval scale estimation from the differenced series.
//
// Differencing turns mean breakpoints into a handful of outlying differences;
// the first-quartile pairwise-difference estimator ignores them. The
// differenced process has variance 2 sigma^2, hence the 1/sqrt(2).

#include "hetseg/core.hpp"
#include "hetseg/gaussian.hpp"
#include "hetseg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace hetseg {

namespace detail {

/// Above this many points the pairwise differences are no longer materialized.
inline constexpr std::size_t kPairwiseMaterializeLimit = 2048;

/// k-th smallest (1-based) of |x_i - x_j|, i < j, by full enumeration.
inline double kth_pairwise_naive(std::span<const double> x, std::size_t k) {
    std::vector<double> diffs;
    diffs.reserve(x.size() * (x.size() - 1) / 2);
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) diffs.push_back(std::abs(x[i] - x[j]));
    }
    auto nth = diffs.begin() + static_cast<std::ptrdiff_t>(k - 1);
    std::nth_element(diffs.begin(), nth, diffs.end());
    return *nth;
}

/// Smallest value whose cumulative weight reaches half of the total.
inline double weighted_high_median(std::vector<std::pair<double, std::size_t>>& items) {
    std::sort(items.begin(), items.end());
    std::size_t total = 0;
    for (const auto& it : items) total += it.second;
    std::size_t acc = 0;
    for (const auto& it : items) {
        acc += it.second;
        if (2 * acc >= total) return it.first;
    }
    return items.back().first;
}

/// k-th smallest (1-based) pairwise difference y_j - y_i (j > i) of sorted y,
/// in O(m log m) time and O(m) memory.
///
/// Row i of the implicit difference matrix holds y_j - y_i for j = i+1..m-1
/// and is increasing in j. Each row keeps an active column window; every pass
/// probes the weighted median of the row medians, counts entries below it with
/// a monotone sweep, and discards the side of every window that cannot hold
/// the answer. Once few candidates remain they are selected directly.
inline double kth_pairwise_sorted(std::span<const double> y, std::size_t k) {
    const std::size_t m = y.size();
    std::vector<std::size_t> left(m), right(m), below(m), at_most(m);
    for (std::size_t i = 0; i < m; ++i) {
        left[i] = i + 1;
        right[i] = m - 1; // row m-1 is empty: left > right
    }
    std::size_t active = m * (m - 1) / 2;
    std::size_t skipped = 0; // entries left of the windows, all below the answer
    std::vector<std::pair<double, std::size_t>> medians;
    medians.reserve(m);

    while (active > m) {
        medians.clear();
        for (std::size_t i = 0; i + 1 < m; ++i) {
            if (left[i] <= right[i]) {
                const std::size_t mid = left[i] + (right[i] - left[i]) / 2;
                medians.emplace_back(y[mid] - y[i], right[i] - left[i] + 1);
            }
        }
        const double trial = weighted_high_median(medians);

        std::size_t count_below = 0, count_at_most = 0;
        std::size_t j = 0;
        for (std::size_t i = 0; i + 1 < m; ++i) {
            j = std::max(j, i + 1);
            while (j < m && y[j] - y[i] < trial) ++j;
            below[i] = j - (i + 1);
            count_below += below[i];
        }
        j = 0;
        for (std::size_t i = 0; i + 1 < m; ++i) {
            j = std::max(j, i + 1);
            while (j < m && y[j] - y[i] <= trial) ++j;
            at_most[i] = j - (i + 1);
            count_at_most += at_most[i];
        }

        if (k <= count_below) {
            for (std::size_t i = 0; i + 1 < m; ++i) right[i] = i + below[i];
        } else if (k > count_at_most) {
            for (std::size_t i = 0; i + 1 < m; ++i) left[i] = i + 1 + at_most[i];
        } else {
            return trial;
        }

        active = 0;
        skipped = 0;
        for (std::size_t i = 0; i + 1 < m; ++i) {
            skipped += left[i] - (i + 1);
            if (left[i] <= right[i]) active += right[i] - left[i] + 1;
        }
    }

    std::vector<double> rest;
    rest.reserve(active);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        for (std::size_t c = left[i]; c <= right[i] && c < m; ++c) rest.push_back(y[c] - y[i]);
    }
    auto nth = rest.begin() + static_cast<std::ptrdiff_t>(k - 1 - skipped);
    std::nth_element(rest.begin(), nth, rest.end());
    return *nth;
}

inline double kth_pairwise(std::span<const double> x, std::size_t k) {
    if (x.size() <= kPairwiseMaterializeLimit) return kth_pairwise_naive(x, k);
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    return kth_pairwise_sorted(sorted, k);
}

} // namespace detail

/// Rank of the first quartile among the m(m-1)/2 pairwise differences.
inline std::size_t qn_rank(std::size_t m) {
    const std::size_t pairs = m * (m - 1) / 2;
    return (pairs + 3) / 4;
}

/// c_Q times the first quartile of the pairwise absolute differences of x.
/// Consistent for the standard deviation of i.i.d. Gaussian x.
inline double qn_scale(std::span<const double> x) {
    if (x.size() < 2) {
        throw Error(ErrorCode::TooShort, "need at least 2 values, got " + std::to_string(x.size()));
    }
    return gaussian::qn_constant() * detail::kth_pairwise(x, qn_rank(x.size()));
}

struct DifferencedSeries {
    std::vector<double> diffs;
    std::optional<int> source_label;
};

namespace detail {

inline bool adjacent_days(const TimeSeries& y, std::size_t t) {
    if (!y.has_dates()) return true;
    const auto& d = y.dates();
    return (d[t] - d[t - 1]).count() == 1; // t is 1-based: d[t-1] is date(t), d[t] is date(t+1)
}

} // namespace detail

/// y_{t+1} - y_t for every adjacent pair (consecutive days when dated).
inline DifferencedSeries differences(const TimeSeries& y) {
    DifferencedSeries out;
    for (std::size_t t = 1; t < y.size(); ++t) {
        if (detail::adjacent_days(y, t)) out.diffs.push_back(y(t + 1) - y(t));
    }
    return out;
}

/// Differences whose two endpoints both carry label j (and are consecutive
/// days when the series is dated).
inline DifferencedSeries differences(const TimeSeries& y, const VarianceIntervalMap& map, int j) {
    validate_inputs(y, map);
    DifferencedSeries out;
    out.source_label = j;
    for (std::size_t t = 1; t < y.size(); ++t) {
        if (map.label(t) == j && map.label(t + 1) == j && detail::adjacent_days(y, t)) {
            out.diffs.push_back(y(t + 1) - y(t));
        }
    }
    return out;
}

inline double sigma_from_diffs(const DifferencedSeries& x) { return qn_scale(x.diffs) / std::numbers::sqrt2; }

struct ScaleOptions {
    /// Replace a zero interval scale by floor_ratio * (global scale of all
    /// differences) instead of failing.
    bool zero_scale_floor = false;
    double floor_ratio = 1e-6;
};

inline ScaleEstimates sigma_per_interval(const TimeSeries& y, const VarianceIntervalMap& map,
                                         const ScaleOptions& opts = {}) {
    validate_inputs(y, map);
    std::vector<double> sigma(static_cast<std::size_t>(map.interval_count()));
    std::optional<double> global;
    for (int j = 1; j <= map.interval_count(); ++j) {
        const auto x = differences(y, map, j);
        const bool constant =
            !x.diffs.empty() && std::all_of(x.diffs.begin(), x.diffs.end(), [](double v) { return v == 0.0; });
        if (x.diffs.size() < 2 && !constant) {
            throw Error(ErrorCode::IntervalTooSparse,
                        "interval " + std::to_string(j) + " has " + std::to_string(x.diffs.size()) +
                            " admissible differences, need 2",
                        j);
        }
        double s = constant ? 0.0 : sigma_from_diffs(x);
        if (s == 0.0 && opts.zero_scale_floor) {
            if (!global) {
                const auto all = differences(y);
                global = all.diffs.size() >= 2 ? sigma_from_diffs(all) : 0.0;
            }
            s = opts.floor_ratio * *global;
        }
        if (!(s > 0.0)) {
            throw Error(ErrorCode::ZeroScale, "estimated scale of interval " + std::to_string(j) + " is zero", j);
        }
        sigma[static_cast<std::size_t>(j - 1)] = s;
    }
    return ScaleEstimates(std::move(sigma));
}

/// Influence function of the Q_n scale functional at the standard Gaussian.
inline double influence_function(double x) {
    const double c = gaussian::qn_constant();
    const double inv_c = 1.0 / c;
    const double denom = std::exp(-1.0 / (4.0 * c * c)) / (2.0 * std::sqrt(std::numbers::pi));
    return c * (0.25 - gaussian::cdf(x + inv_c) + gaussian::cdf(x - inv_c)) / denom;
}

/// sigma * E[IF^2(nu_0/(sqrt2 sigma))] + 2 sigma * E[IF(nu_0/..) IF(nu_1/..)]
/// with (nu_0, nu_1) the lag-0/lag-1 pair of the differenced i.i.d. noise
/// (correlation -1/2; higher lags are independent). The expectations are
/// computed by Monte Carlo.
inline double asymptotic_variance(double sigma, std::size_t draws = 1'000'000, std::uint64_t seed = 0) {
    if (!(sigma > 0.0)) {
        throw Error(ErrorCode::NonPositiveSigma, "sigma must be positive");
    }
    if (draws == 0) {
        throw Error(ErrorCode::InvalidArgument, "need at least one Monte-Carlo draw");
    }
    auto engine = rng::make_engine(seed);
    std::normal_distribution<double> normal;
    constexpr double rho = -0.5;
    const double tail = std::sqrt(1.0 - rho * rho);
    double sum_sq = 0.0, sum_cross = 0.0;
    for (std::size_t i = 0; i < draws; ++i) {
        const double z0 = normal(engine);
        const double z1 = rho * z0 + tail * normal(engine);
        const double f0 = influence_function(z0);
        sum_sq += f0 * f0;
        sum_cross += f0 * influence_function(z1);
    }
    const double n = static_cast<double>(draws);
    return sigma * (sum_sq / n) + 2.0 * sigma * (sum_cross / n);
}

} // namespace hetseg
