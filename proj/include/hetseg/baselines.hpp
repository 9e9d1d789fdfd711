#pragma once

// Comparison segmentation models sharing the DP engine:
//   MHomo   - mean changes under one homogeneous variance (plain least squares)
//   MHetero - mean and variance change together (per-segment Gaussian likelihood)

#include "hetseg/core.hpp"
#include "hetseg/model_selection.hpp"
#include "hetseg/robust_scale.hpp"
#include "hetseg/weighted_dp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace hetseg {

enum class BaselineKind { MHomo, MHetero };

inline const char* to_string(BaselineKind kind) { return kind == BaselineKind::MHomo ? "MHomo" : "MHetero"; }

/// Least-squares segmentation; costs are unweighted SSE.
inline DPResult mhomo_dp(const TimeSeries& y, std::size_t kmax) {
    const std::vector<double> ones(y.size(), 1.0);
    const WeightedPrefixes p(y.values(), ones);
    return optimal_partition(
        y.size(), kmax, 1, [&p](std::size_t a, std::size_t b) { return p.cost(a, b); },
        [&p](std::size_t a, std::size_t b) { return p.mean(a, b); });
}

/// ML standard deviation of the homogeneous model with K segments.
inline double mhomo_fitted_sd(const DPResult& dp, std::size_t k) {
    const double n = static_cast<double>(dp.segmentation(k).n());
    return std::sqrt(dp.cost(k) / n);
}

/// Lower bound applied to per-segment ML variances: 1e-3 * var(y) / n^2.
inline double mhetero_variance_floor(const TimeSeries& y) {
    const std::vector<double> ones(y.size(), 1.0);
    const WeightedPrefixes p(y.values(), ones);
    const double n = static_cast<double>(y.size());
    const double floor = 1e-3 * (p.cost(1, y.size()) / n) / (n * n);
    return floor > 0.0 ? floor : std::numeric_limits<double>::min();
}

/// Mean-and-variance segmentation: segment cost n_k log(sigma_k^2) with the
/// per-segment ML variance, segments of at least 2 points.
inline DPResult mhetero_dp(const TimeSeries& y, std::size_t kmax) {
    if (kmax > y.size() / 2) {
        throw Error(ErrorCode::KmaxTooLarge, "MHetero needs Kmax <= n/2");
    }
    const std::vector<double> ones(y.size(), 1.0);
    const WeightedPrefixes p(y.values(), ones);
    const double floor = mhetero_variance_floor(y);
    return optimal_partition(
        y.size(), kmax, 2,
        [&p, floor](std::size_t a, std::size_t b) {
            const double len = static_cast<double>(b - a + 1);
            return len * std::log(std::max(p.cost(a, b) / len, floor));
        },
        [&p](std::size_t a, std::size_t b) { return p.mean(a, b); });
}

/// Per-segment ML variances (floored) of a segmentation, as used by MHetero.
inline std::vector<double> segment_variances(const TimeSeries& y, const Segmentation& seg) {
    const std::vector<double> ones(y.size(), 1.0);
    const WeightedPrefixes p(y.values(), ones);
    const double floor = mhetero_variance_floor(y);
    std::vector<double> out;
    for (const auto& s : seg.segments()) {
        out.push_back(std::max(p.cost(s.first, s.last) / static_cast<double>(s.length()), floor));
    }
    return out;
}

struct BaselineAnalysis {
    BaselineKind kind;
    DPResult dp;
    SelectionReport report;
    /// MHomo only: robust global scale used to standardize the contrast.
    double standardizing_sigma = 1.0;
};

/// Fits a baseline model and runs every criterion on its own contrast.
///
/// MHomo: criteria see SSE / sigma^2 with sigma the robust scale of the whole
/// differenced series. MHetero: criteria see sum_k n_k log sigma_k^2 and count
/// two parameters per segment in the BM penalty.
inline BaselineAnalysis baseline_select(BaselineKind kind, const TimeSeries& y, std::size_t kmax,
                                        CriterionConfig cfg = {}) {
    if (kind == BaselineKind::MHomo) {
        auto dp = mhomo_dp(y, kmax);
        const double sigma = sigma_from_diffs(differences(y));
        if (!(sigma > 0.0)) {
            throw Error(ErrorCode::ZeroScale, "robust global scale is zero", 1);
        }
        std::vector<double> contrast(dp.costs);
        for (double& c : contrast) c /= sigma * sigma;
        auto report = select_all(contrast, dp.segmentations, y.size(), cfg);
        return {kind, std::move(dp), std::move(report), sigma};
    }
    auto dp = mhetero_dp(y, kmax);
    cfg.dims_per_segment = 2.0;
    auto report = select_all(dp.costs, dp.segmentations, y.size(), cfg);
    return {kind, std::move(dp), std::move(report), 1.0};
}

} // namespace hetseg
