#pragma once

// Choosing the number of segments from the optimal contrast curve.
//
//   lav   normalized-second-difference elbow rule with threshold s
//   bm1   BM penalty 5 D_K + 2 K log(n/K), constant from the dimension jump
//   bm2   BM penalty, constant from the slope of the large-K contrast tail
//   mbic  modified BIC for known variances (maximized)

#include "hetseg/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace hetseg {

struct CriterionConfig {
    double threshold = 0.7;        // Lavielle s
    double slope_fit_window = 0.5; // fraction of the largest K used by bm2
    double dims_per_segment = 1.0; // D_K = dims_per_segment * K
    std::size_t bm1_grid_points = 200;
    std::size_t lad_iterations = 50;
};

/// Outcome of one criterion: the chosen K plus what led to it.
struct Choice {
    std::size_t k = 1;
    std::string warning;
    std::map<std::string, double> diagnostics;
};

inline const std::vector<std::string>& criterion_names() {
    static const std::vector<std::string> names{"lav", "bm1", "bm2", "mbic"};
    return names;
}

inline double bm_penalty(std::size_t k, std::size_t n, double dims_per_segment = 1.0) {
    if (k < 1 || k > n) {
        throw Error(ErrorCode::InvalidArgument, "bm_penalty needs 1 <= K <= n");
    }
    const double kk = static_cast<double>(k);
    return 5.0 * dims_per_segment * kk + 2.0 * kk * std::log(static_cast<double>(n) / kk);
}

namespace detail {

inline void check_costs(std::span<const double> costs, std::size_t min_kmax) {
    if (costs.size() < min_kmax) {
        throw Error(ErrorCode::InvalidArgument,
                    "need a contrast curve with Kmax >= " + std::to_string(min_kmax) + ", got " +
                        std::to_string(costs.size()));
    }
    for (double c : costs) {
        if (!std::isfinite(c)) throw Error(ErrorCode::NonFiniteValue, "contrast curve has a non-finite value");
    }
}

/// argmin_K costs[K] + alpha * pen[K]; ties go to the smaller K.
inline std::size_t penalized_argmin(std::span<const double> costs, std::span<const double> pen, double alpha) {
    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < costs.size(); ++i) {
        const double v = costs[i] + alpha * pen[i];
        if (v < best_value) {
            best_value = v;
            best = i;
        }
    }
    return best + 1;
}

inline std::vector<double> penalties(std::size_t kmax, std::size_t n, double dims_per_segment) {
    std::vector<double> pen(kmax);
    for (std::size_t k = 1; k <= kmax; ++k) pen[k - 1] = bm_penalty(k, n, dims_per_segment);
    return pen;
}

struct Line {
    double intercept = 0.0;
    double slope = 0.0;
};

inline Line ordinary_least_squares(std::span<const double> x, std::span<const double> y,
                                   std::span<const double> w) {
    double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
    }
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += w[i] * (x[i] - mx) * (x[i] - mx);
        sxy += w[i] * (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxy / sxx;
    return {my - slope * mx, slope};
}

/// Least-absolute-deviations line by iteratively reweighted least squares.
/// Falls back to the ordinary fit when the iteration does not settle.
inline Line least_absolute_deviations(std::span<const double> x, std::span<const double> y, std::size_t iterations,
                                      bool* converged = nullptr) {
    std::vector<double> w(x.size(), 1.0);
    const Line ols = ordinary_least_squares(x, y, w);
    Line fit = ols;
    double scale = 0.0;
    for (double v : y) scale = std::max(scale, std::abs(v));
    const double floor = std::max(scale, 1.0) * 1e-12;
    for (std::size_t it = 0; it < iterations; ++it) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = std::abs(y[i] - fit.intercept - fit.slope * x[i]);
            w[i] = 1.0 / std::max(r, floor);
        }
        const Line next = ordinary_least_squares(x, y, w);
        const bool settled = std::abs(next.slope - fit.slope) <= 1e-10 * std::max(1.0, std::abs(fit.slope)) &&
                             std::abs(next.intercept - fit.intercept) <=
                                 1e-10 * std::max(1.0, std::abs(fit.intercept));
        fit = next;
        if (settled) {
            if (converged) *converged = true;
            return fit;
        }
    }
    if (converged) *converged = false;
    return ols;
}

} // namespace detail

/// argmin_K costs[K] + alpha * bm_penalty(K, n) for a given constant alpha.
inline std::size_t bm_select(std::span<const double> costs, std::size_t n, double alpha,
                             const CriterionConfig& cfg = {}) {
    detail::check_costs(costs, 1);
    return detail::penalized_argmin(costs, detail::penalties(costs.size(), n, cfg.dims_per_segment), alpha);
}

/// Largest K whose normalized second difference exceeds the threshold.
inline Choice lavielle_select(std::span<const double> costs, const CriterionConfig& cfg = {}) {
    detail::check_costs(costs, 3);
    const std::size_t kmax = costs.size();
    Choice out;
    const double range = costs[kmax - 1] - costs[0];
    if (range == 0.0) {
        out.k = 1;
        out.warning = "FlatContrast: the contrast does not change with K";
        return out;
    }
    std::vector<double> level(kmax);
    for (std::size_t i = 0; i < kmax; ++i) {
        level[i] = (costs[kmax - 1] - costs[i]) / range * static_cast<double>(kmax - 1) + 1.0;
    }
    out.k = 1;
    double chosen_d = 0.0;
    for (std::size_t k = 2; k + 1 <= kmax; ++k) {
        const double d = level[k - 2] - 2.0 * level[k - 1] + level[k];
        if (d > cfg.threshold) {
            out.k = k;
            chosen_d = d;
        }
    }
    out.diagnostics["threshold"] = cfg.threshold;
    out.diagnostics["second_difference"] = chosen_d;
    return out;
}

/// Dimension-jump calibration: find the alpha where the selected dimension
/// falls the most, then select with twice that alpha.
inline Choice bm1_select(std::span<const double> costs, std::size_t n, const CriterionConfig& cfg = {}) {
    detail::check_costs(costs, 2);
    const std::size_t kmax = costs.size();
    const auto pen = detail::penalties(kmax, n, cfg.dims_per_segment);
    Choice out;

    double base = (costs[0] - costs[kmax - 1]) / pen[kmax - 1];
    if (!(base > 0.0)) base = 1.0;
    const std::size_t points = std::max<std::size_t>(cfg.bm1_grid_points, 2);
    std::vector<double> alpha(points);
    std::vector<std::size_t> chosen(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double e = -6.0 + 12.0 * static_cast<double>(i) / static_cast<double>(points - 1);
        alpha[i] = base * std::pow(10.0, e);
        chosen[i] = detail::penalized_argmin(costs, pen, alpha[i]);
    }

    std::size_t best_jump = 0, jump_at = 0;
    for (std::size_t i = 0; i + 1 < points; ++i) {
        const std::size_t jump = chosen[i] > chosen[i + 1] ? chosen[i] - chosen[i + 1] : 0;
        if (jump > best_jump) {
            best_jump = jump;
            jump_at = i + 1;
        }
    }
    if (best_jump == 0) {
        out.k = chosen[points / 2];
        out.warning = "NoJump: selected dimension is constant over the alpha grid";
        return out;
    }
    const double alpha_jump = alpha[jump_at];
    out.k = detail::penalized_argmin(costs, pen, 2.0 * alpha_jump);
    out.diagnostics["alpha_jump"] = alpha_jump;
    out.diagnostics["jump_size"] = static_cast<double>(best_jump);
    out.diagnostics["alpha_hat"] = 2.0 * alpha_jump;
    return out;
}

/// Data-driven slope calibration: robust regression of the contrast on the
/// penalty shape over the largest K values; alpha = -2 * slope.
inline Choice bm2_select(std::span<const double> costs, std::size_t n, const CriterionConfig& cfg = {}) {
    detail::check_costs(costs, 6);
    const std::size_t kmax = costs.size();
    const auto pen = detail::penalties(kmax, n, cfg.dims_per_segment);
    Choice out;

    const auto window = static_cast<std::size_t>(std::ceil(cfg.slope_fit_window * static_cast<double>(kmax)));
    const std::size_t first = kmax - std::clamp<std::size_t>(window, 1, kmax);
    const std::span<const double> x(pen.data() + first, kmax - first);
    const std::span<const double> y(costs.data() + first, kmax - first);
    if (x.size() < 2 || x.front() == x.back()) {
        throw Error(ErrorCode::DegenerateFit, "slope window holds fewer than two distinct penalty values");
    }
    bool converged = false;
    const auto line = detail::least_absolute_deviations(x, y, cfg.lad_iterations, &converged);
    if (!converged) out.warning = "LAD fit did not converge; used ordinary least squares";

    const double slope = -line.slope;
    double alpha_hat = 2.0 * slope;
    if (!(alpha_hat > 0.0)) {
        out.warning = "non-positive slope estimate; alpha set to 0";
        alpha_hat = 0.0;
    }
    out.k = detail::penalized_argmin(costs, pen, alpha_hat);
    out.diagnostics["slope"] = slope;
    out.diagnostics["alpha_hat"] = alpha_hat;
    out.diagnostics["window"] = static_cast<double>(x.size());
    return out;
}

/// mBIC value of one K, given the segment lengths of the optimal K-segmentation.
inline double mbic_value(double cost, std::span<const std::size_t> lengths, std::size_t n) {
    double log_lengths = 0.0;
    for (std::size_t len : lengths) log_lengths += std::log(static_cast<double>(len));
    const double k = static_cast<double>(lengths.size());
    return -0.5 * cost - 0.5 * log_lengths + (1.5 - k) * std::log(static_cast<double>(n));
}

inline Choice mbic_select(std::span<const double> costs, std::span<const Segmentation> segs, std::size_t n,
                          const CriterionConfig& = {}) {
    detail::check_costs(costs, 1);
    if (segs.size() != costs.size()) {
        throw Error(ErrorCode::LengthMismatch, "need one segmentation per K");
    }
    Choice out;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < costs.size(); ++i) {
        if (segs[i].segment_count() != i + 1) {
            throw Error(ErrorCode::InvalidArgument, "segmentation " + std::to_string(i + 1) + " has " +
                                                        std::to_string(segs[i].segment_count()) + " segments");
        }
        const auto lengths = segs[i].segment_lengths();
        const double v = mbic_value(costs[i], lengths, n);
        if (v > best) {
            best = v;
            out.k = i + 1;
        }
    }
    out.diagnostics["mbic"] = best;
    return out;
}

/// Runs every criterion; a failing criterion records a warning and falls
/// back to K = 1 without stopping the others.
inline SelectionReport select_all(std::span<const double> costs, std::span<const Segmentation> segs, std::size_t n,
                                  const CriterionConfig& cfg = {}) {
    SelectionReport report;
    report.contrast.assign(costs.begin(), costs.end());
    auto record = [&](const std::string& name, auto&& run) {
        try {
            Choice c = run();
            report.chosen[name] = c.k;
            report.diagnostics[name] = std::move(c.diagnostics);
            if (!c.warning.empty()) report.warnings.push_back(name + ": " + c.warning);
        } catch (const Error& e) {
            report.chosen[name] = 1;
            report.warnings.push_back(name + ": " + e.what());
        }
    };
    record("lav", [&] { return lavielle_select(costs, cfg); });
    record("bm1", [&] { return bm1_select(costs, n, cfg); });
    record("bm2", [&] { return bm2_select(costs, n, cfg); });
    record("mbic", [&] { return mbic_select(costs, segs, n, cfg); });
    return report;
}

} // namespace hetseg
