#pragma once

// Exact segmentation in the mean under the variance-weighted least-squares
// contrast. With the interval scales plugged in, the contrast is additive over
// segments, so the optimal K-segmentation for every K <= Kmax follows from one
// O(Kmax n^2) dynamic program over O(1) prefix-sum segment costs.

#include "hetseg/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace hetseg {

/// Optimal cost and segmentation for every K = 1..Kmax.
struct DPResult {
    std::vector<double> costs;               // costs[K-1]
    std::vector<Segmentation> segmentations; // segmentations[K-1]

    std::size_t kmax() const noexcept { return costs.size(); }
    double cost(std::size_t k) const { return costs.at(k - 1); }
    const Segmentation& segmentation(std::size_t k) const { return segmentations.at(k - 1); }
};

/// Kmax used when the caller gives none: min(floor(n/5), 100), at least 1.
inline std::size_t default_kmax(std::size_t n) { return std::max<std::size_t>(1, std::min<std::size_t>(n / 5, 100)); }

/// Relative gap below which two contrast values count as tied.
inline constexpr double kTieTolerance = 1e-12;

/// True when `c` beats `best` by more than the tie tolerance.
inline bool strictly_better(double c, double best) noexcept {
    if (best == std::numeric_limits<double>::infinity()) return c < best;
    return c < best - kTieTolerance * (1.0 + std::abs(best));
}

/// Segment-additive dynamic program.
///
/// `cost(a, b)` and `mean(a, b)` are evaluated on 1-based inclusive ranges.
/// Among equal-cost candidates (within kTieTolerance) the smaller last
/// breakpoint wins at every backtracking step.
template <class SegmentCost, class SegmentMean>
DPResult optimal_partition(std::size_t n, std::size_t kmax, std::size_t min_length, SegmentCost&& cost,
                           SegmentMean&& mean) {
    if (min_length < 1) min_length = 1;
    if (kmax < 1) {
        throw Error(ErrorCode::InvalidArgument, "Kmax must be at least 1");
    }
    if (kmax > n || kmax * min_length > n) {
        throw Error(ErrorCode::KmaxTooLarge, "Kmax=" + std::to_string(kmax) + " segments of length >= " +
                                                 std::to_string(min_length) + " do not fit in n=" +
                                                 std::to_string(n));
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(n + 1, inf), cur(n + 1, inf);
    std::vector<std::vector<std::uint32_t>> parent(kmax + 1);

    for (std::size_t e = min_length; e <= n; ++e) prev[e] = cost(1, e);

    DPResult out;
    out.costs.reserve(kmax);
    out.costs.push_back(prev[n]);

    for (std::size_t k = 2; k <= kmax; ++k) {
        auto& back = parent[k];
        back.assign(n + 1, 0);
        std::fill(cur.begin(), cur.end(), inf);
        for (std::size_t e = k * min_length; e <= n; ++e) {
            double best = inf;
            std::size_t best_s = 0;
            for (std::size_t s = (k - 1) * min_length; s + min_length <= e; ++s) {
                const double c = prev[s] + cost(s + 1, e);
                if (strictly_better(c, best)) {
                    best = c;
                    best_s = s;
                }
            }
            cur[e] = best;
            back[e] = static_cast<std::uint32_t>(best_s);
        }
        out.costs.push_back(cur[n]);
        std::swap(prev, cur);
    }

    out.segmentations.reserve(kmax);
    for (std::size_t k = 1; k <= kmax; ++k) {
        std::vector<std::size_t> breaks(k - 1);
        std::size_t e = n;
        for (std::size_t level = k; level >= 2; --level) {
            e = parent[level][e];
            breaks[level - 2] = e;
        }
        std::vector<double> means;
        means.reserve(k);
        std::size_t first = 1;
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t last = i + 1 < k ? breaks[i] : n;
            means.push_back(mean(first, last));
            first = last + 1;
        }
        out.segmentations.emplace_back(n, std::move(breaks), std::move(means));
    }
    return out;
}

/// Cumulative sums of w_t, w_t y_t and w_t y_t^2 with w_t = 1/sigma^2 of the
/// interval of t. Values are centred on their overall weighted mean and summed
/// with Neumaier compensation to keep Syy - Sy^2/S1 accurate.
class WeightedPrefixes {
public:
    WeightedPrefixes(std::span<const double> values, std::span<const double> weights)
        : s1_(values.size() + 1, 0.0), sy_(values.size() + 1, 0.0), syy_(values.size() + 1, 0.0) {
        if (values.size() != weights.size()) {
            throw Error(ErrorCode::LengthMismatch, "values and weights differ in length");
        }
        Accumulator w_total, wy_total;
        for (std::size_t i = 0; i < values.size(); ++i) {
            w_total.add(weights[i]);
            wy_total.add(weights[i] * values[i]);
        }
        centre_ = values.empty() ? 0.0 : wy_total.value() / w_total.value();
        Accumulator a1, ay, ayy;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double d = values[i] - centre_;
            a1.add(weights[i]);
            ay.add(weights[i] * d);
            ayy.add(weights[i] * d * d);
            s1_[i + 1] = a1.value();
            sy_[i + 1] = ay.value();
            syy_[i + 1] = ayy.value();
        }
    }

    std::size_t size() const noexcept { return s1_.size() - 1; }

    /// Minimized weighted SSE of the 1-based range a..b.
    double cost(std::size_t a, std::size_t b) const noexcept {
        if (a == b) return 0.0;
        const double w = s1_[b] - s1_[a - 1];
        const double wy = sy_[b] - sy_[a - 1];
        const double wyy = syy_[b] - syy_[a - 1];
        const double c = wyy - wy * wy / w;
        return c > 0.0 ? c : 0.0;
    }

    /// Precision-weighted mean of the range a..b.
    double mean(std::size_t a, std::size_t b) const noexcept {
        return centre_ + (sy_[b] - sy_[a - 1]) / (s1_[b] - s1_[a - 1]);
    }

    const std::vector<double>& s1() const noexcept { return s1_; }
    const std::vector<double>& sy() const noexcept { return sy_; }
    const std::vector<double>& syy() const noexcept { return syy_; }
    double centre() const noexcept { return centre_; }

private:
    struct Accumulator {
        double sum = 0.0, comp = 0.0;
        void add(double v) noexcept {
            const double t = sum + v;
            comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
            sum = t;
        }
        double value() const noexcept { return sum + comp; }
    };

    std::vector<double> s1_, sy_, syy_;
    double centre_ = 0.0;
};

namespace detail {

inline void check_scales(const VarianceIntervalMap& map, const ScaleEstimates& scales) {
    if (static_cast<int>(scales.size()) != map.interval_count()) {
        throw Error(ErrorCode::LengthMismatch, "got " + std::to_string(scales.size()) + " scales for " +
                                                   std::to_string(map.interval_count()) + " intervals");
    }
}

inline std::vector<double> precisions(const VarianceIntervalMap& map, const ScaleEstimates& scales) {
    std::vector<double> w(map.size());
    for (std::size_t t = 1; t <= map.size(); ++t) {
        const double s = scales.sigma(map.label(t));
        w[t - 1] = 1.0 / (s * s);
    }
    return w;
}

inline void check_range(std::size_t a, std::size_t b, std::size_t n) {
    if (a < 1 || a > b || b > n) {
        throw Error(ErrorCode::InvalidRange, "range " + std::to_string(a) + ".." + std::to_string(b) +
                                                 " is not within 1.." + std::to_string(n));
    }
}

} // namespace detail

inline WeightedPrefixes make_prefixes(const TimeSeries& y, const VarianceIntervalMap& map,
                                      const ScaleEstimates& scales) {
    validate_inputs(y, map);
    detail::check_scales(map, scales);
    const auto w = detail::precisions(map, scales);
    return WeightedPrefixes(y.values(), w);
}

inline double segment_cost(const WeightedPrefixes& p, std::size_t a, std::size_t b) {
    detail::check_range(a, b, p.size());
    return p.cost(a, b);
}

inline double weighted_mean(const TimeSeries& y, const VarianceIntervalMap& map, const ScaleEstimates& scales,
                            std::size_t a, std::size_t b) {
    validate_inputs(y, map);
    detail::check_scales(map, scales);
    detail::check_range(a, b, y.size());
    if (a == b) return y(a);
    double sw = 0.0, swy = 0.0;
    for (std::size_t t = a; t <= b; ++t) {
        const double s = scales.sigma(map.label(t));
        sw += 1.0 / (s * s);
        swy += y(t) / (s * s);
    }
    return swy / sw;
}

/// Weighted within-segment sum of squares of a given segmentation, evaluated
/// directly (weighted means first, then squared residuals).
inline double weighted_sse(const TimeSeries& y, const VarianceIntervalMap& map, const ScaleEstimates& scales,
                           std::span<const std::size_t> breakpoints) {
    double total = 0.0;
    std::size_t first = 1;
    for (std::size_t k = 0; k <= breakpoints.size(); ++k) {
        const std::size_t last = k < breakpoints.size() ? breakpoints[k] : y.size();
        const double mu = weighted_mean(y, map, scales, first, last);
        for (std::size_t t = first; t <= last; ++t) {
            const double s = scales.sigma(map.label(t));
            total += (y(t) - mu) * (y(t) - mu) / (s * s);
        }
        first = last + 1;
    }
    return total;
}

struct DpOptions {
    std::size_t min_segment_length = 1;
};

inline DPResult dp_segment(const TimeSeries& y, const VarianceIntervalMap& map, const ScaleEstimates& scales,
                           std::size_t kmax, const DpOptions& opts = {}) {
    const auto p = make_prefixes(y, map, scales);
    return optimal_partition(
        y.size(), kmax, opts.min_segment_length, [&p](std::size_t a, std::size_t b) { return p.cost(a, b); },
        [&p](std::size_t a, std::size_t b) { return p.mean(a, b); });
}

/// Exhaustive search over all K-segmentations; same tie-break as dp_segment.
inline std::pair<double, Segmentation> brute_force_segment(const TimeSeries& y, const VarianceIntervalMap& map,
                                                           const ScaleEstimates& scales, std::size_t k) {
    validate_inputs(y, map);
    detail::check_scales(map, scales);
    const std::size_t n = y.size();
    if (k < 1 || k > n) {
        throw Error(ErrorCode::KmaxTooLarge, "K must lie in 1..n");
    }
    double combos = 1.0;
    for (std::size_t i = 1; i < k; ++i) combos = combos * static_cast<double>(n - i) / static_cast<double>(i);
    if (combos > 1e6 + 0.5) {
        throw Error(ErrorCode::TooManySegmentations, "C(n-1, K-1) exceeds 10^6");
    }

    const std::size_t r = k - 1;
    std::vector<std::size_t> breaks(r);
    for (std::size_t i = 0; i < r; ++i) breaks[i] = i + 1;
    std::vector<std::size_t> best;
    double best_cost = std::numeric_limits<double>::infinity();
    auto later_breaks_smaller = [](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
        return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
    };
    while (true) {
        const double c = weighted_sse(y, map, scales, breaks);
        const bool tied = !strictly_better(c, best_cost) && !strictly_better(best_cost, c);
        if (strictly_better(c, best_cost) || (tied && later_breaks_smaller(breaks, best))) {
            best_cost = c;
            best = breaks;
        }
        // next combination of r values from 1..n-1 in lexicographic order
        std::size_t i = r;
        while (i > 0 && breaks[i - 1] == n - 1 - (r - i)) --i;
        if (i == 0) break;
        ++breaks[i - 1];
        for (std::size_t j = i; j < r; ++j) breaks[j] = breaks[j - 1] + 1;
    }

    std::vector<double> means;
    std::size_t first = 1;
    for (std::size_t i = 0; i <= best.size(); ++i) {
        const std::size_t last = i < best.size() ? best[i] : n;
        means.push_back(weighted_mean(y, map, scales, first, last));
        first = last + 1;
    }
    return {best_cost, Segmentation(n, std::move(best), std::move(means))};
}

} // namespace hetseg
