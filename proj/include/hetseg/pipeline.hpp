#pragma once

// Two-step procedure for the fixed-interval heteroscedastic model: estimate
// the interval scales robustly, then segment with those scales treated as
// known. The baseline models are exposed through the same interface.

#include "hetseg/baselines.hpp"
#include "hetseg/core.hpp"
#include "hetseg/model_selection.hpp"
#include "hetseg/robust_scale.hpp"
#include "hetseg/weighted_dp.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hetseg {

enum class Model { FixedHetero, Homo, Hetero };

inline const char* to_string(Model m) {
    switch (m) {
    case Model::FixedHetero: return "MFixedHetero";
    case Model::Homo: return "MHomo";
    case Model::Hetero: return "MHetero";
    }
    return "?";
}

inline Model parse_model(std::string_view name) {
    if (name == "fixedhetero" || name == "MFixedHetero") return Model::FixedHetero;
    if (name == "homo" || name == "MHomo") return Model::Homo;
    if (name == "hetero" || name == "MHetero") return Model::Hetero;
    throw Error(ErrorCode::InvalidArgument, "unknown model '" + std::string(name) + "'");
}

struct AnalysisOptions {
    std::size_t kmax = 0; // 0: default_kmax(n), capped at n/2 for MHetero
    ScaleOptions scale;
    CriterionConfig criteria;
    /// Plug these scales instead of estimating them (MFixedHetero only).
    std::optional<ScaleEstimates> known_scales;
};

struct Analysis {
    Model model = Model::FixedHetero;
    std::optional<ScaleEstimates> scales; // MFixedHetero
    DPResult dp;
    SelectionReport report;
    double standardizing_sigma = 1.0; // MHomo

    /// Fitted variance at every index for the K-segment solution.
    std::vector<double> fitted_variance(const TimeSeries& y, const VarianceIntervalMap& map, std::size_t k) const {
        std::vector<double> v(y.size());
        switch (model) {
        case Model::FixedHetero:
            for (std::size_t t = 1; t <= y.size(); ++t) {
                const double s = scales->sigma(map.label(t));
                v[t - 1] = s * s;
            }
            break;
        case Model::Homo: {
            const double s = mhomo_fitted_sd(dp, k);
            std::fill(v.begin(), v.end(), s * s);
            break;
        }
        case Model::Hetero: {
            const auto& seg = dp.segmentation(k);
            const auto var = segment_variances(y, seg);
            for (std::size_t i = 0; i < seg.segment_count(); ++i) {
                const auto r = seg.segment(i + 1);
                for (std::size_t t = r.first; t <= r.last; ++t) v[t - 1] = var[i];
            }
            break;
        }
        }
        return v;
    }
};

inline std::size_t resolve_kmax(Model model, std::size_t n, std::size_t requested) {
    std::size_t kmax = requested == 0 ? default_kmax(n) : requested;
    if (model == Model::Hetero && requested == 0) kmax = std::min(kmax, n / 2);
    return kmax;
}

inline Analysis analyze(Model model, const TimeSeries& y, const VarianceIntervalMap& map,
                        const AnalysisOptions& opts = {}) {
    validate_inputs(y, map);
    const std::size_t kmax = resolve_kmax(model, y.size(), opts.kmax);
    Analysis out;
    out.model = model;
    if (model == Model::FixedHetero) {
        out.scales = opts.known_scales ? *opts.known_scales : sigma_per_interval(y, map, opts.scale);
        out.dp = dp_segment(y, map, *out.scales, kmax);
        out.report = select_all(out.dp.costs, out.dp.segmentations, y.size(), opts.criteria);
        return out;
    }
    auto base = baseline_select(model == Model::Homo ? BaselineKind::MHomo : BaselineKind::MHetero, y, kmax,
                                opts.criteria);
    out.dp = std::move(base.dp);
    out.report = std::move(base.report);
    out.standardizing_sigma = base.standardizing_sigma;
    return out;
}

} // namespace hetseg
