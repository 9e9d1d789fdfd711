#pragma once

// Simulation study: step-mean series with two alternating "months" of
// different noise levels, segmented by every model and criterion.

#include "hetseg/core.hpp"
#include "hetseg/pipeline.hpp"
#include "hetseg/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

namespace hetseg::sim {

struct SimDesign {
    std::size_t n = 200;
    std::size_t years = 4;
    std::size_t months_per_year = 2;
    double sigma1 = 0.5;
    std::vector<double> sigma2_grid{0.1, 0.3, 0.5, 0.7, 0.9, 1.1, 1.3, 1.5};
    std::vector<std::size_t> true_breaks{27, 38, 88, 111, 150, 183};
    std::size_t replications = 100;
    std::uint64_t base_seed = 20190415;
    std::size_t kmax = 0; // 0: default_kmax(n)

    /// Default design for n = 200 or n = 800 (breakpoints scaled by n/200).
    static SimDesign standard(std::size_t n = 200) {
        SimDesign d;
        d.n = n;
        for (auto& t : d.true_breaks) t = t * n / 200;
        return d;
    }

    std::size_t k_star() const noexcept { return true_breaks.size() + 1; }
    std::size_t block_length() const noexcept { return n / (years * months_per_year); }

    void validate() const {
        if (years == 0 || months_per_year == 0 || n == 0 || n % (years * months_per_year) != 0) {
            throw Error(ErrorCode::InvalidArgument, "n must be a positive multiple of years * months_per_year");
        }
        if (!(sigma1 > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma1 must be positive");
        if (sigma2_grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty sigma2 grid");
        for (double s : sigma2_grid) {
            if (!(s > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma2 values must be positive");
        }
        std::size_t prev = 0;
        for (std::size_t t : true_breaks) {
            if (t <= prev || t >= n) {
                throw Error(ErrorCode::InvalidArgument, "true breakpoints must be strictly increasing in 1..n-1");
            }
            prev = t;
        }
        if (replications == 0) throw Error(ErrorCode::InvalidArgument, "need at least one replication");
    }
};

struct SimSeries {
    TimeSeries series;
    VarianceIntervalMap map;
    Segmentation truth;
    std::vector<double> true_sigma; // per label
};

/// Labels cycle 1..months_per_year in blocks of n/(years*months) points.
inline VarianceIntervalMap design_labels(const SimDesign& d) {
    std::vector<int> labels(d.n);
    const std::size_t block = d.block_length();
    for (std::size_t i = 0; i < d.n; ++i) labels[i] = static_cast<int>((i / block) % d.months_per_year) + 1;
    return {std::move(labels), static_cast<int>(d.months_per_year)};
}

/// Deterministic in (base_seed, sigma2, rep).
inline SimSeries generate_series(const SimDesign& d, double sigma2, std::size_t rep) {
    d.validate();
    auto map = design_labels(d);
    std::vector<double> sigma(d.months_per_year, d.sigma1);
    for (std::size_t j = 1; j < sigma.size(); ++j) sigma[j] = sigma2;

    std::vector<double> means(d.k_star());
    for (std::size_t k = 0; k < means.size(); ++k) means[k] = k % 2 == 0 ? 0.0 : 1.0;
    Segmentation truth(d.n, d.true_breaks, means);

    auto engine = rng::make_engine(rng::stream_seed(d.base_seed, sigma2, rep));
    std::normal_distribution<double> normal;
    std::vector<double> y(d.n);
    for (std::size_t t = 1; t <= d.n; ++t) {
        y[t - 1] = truth.fitted(t) + sigma[static_cast<std::size_t>(map.label(t) - 1)] * normal(engine);
    }
    return {TimeSeries(std::move(y)), std::move(map), std::move(truth), std::move(sigma)};
}

struct Hausdorff {
    double d1 = 0.0; // max over estimated points of the distance to the nearest true point
    double d2 = 0.0; // max over true points of the distance to the nearest estimated point
};

namespace detail {

inline double directed(const std::vector<std::size_t>& from, const std::vector<std::size_t>& to) {
    double worst = 0.0;
    for (std::size_t a : from) {
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t b : to) nearest = std::min(nearest, std::abs(static_cast<double>(a) - static_cast<double>(b)));
        worst = std::max(worst, nearest);
    }
    return worst;
}

} // namespace detail

/// Directed Hausdorff components between true and estimated breakpoints.
/// An empty side is replaced by the series boundaries {0, n}.
inline Hausdorff hausdorff_components(const std::vector<std::size_t>& true_breaks,
                                      const std::vector<std::size_t>& est_breaks, std::size_t n) {
    const std::vector<std::size_t> bounds{0, n};
    const auto& t = true_breaks.empty() ? bounds : true_breaks;
    const auto& e = est_breaks.empty() ? bounds : est_breaks;
    Hausdorff h;
    h.d1 = est_breaks.empty() ? 0.0 : detail::directed(est_breaks, t);
    h.d2 = true_breaks.empty() ? 0.0 : detail::directed(true_breaks, e);
    return h;
}

enum class SimModel { FixedHetero, FixedHeteroOracle, Homo, Hetero };

inline const char* to_string(SimModel m) {
    switch (m) {
    case SimModel::FixedHetero: return "MFixedHetero";
    case SimModel::FixedHeteroOracle: return "MFixedHeteroTrueVar";
    case SimModel::Homo: return "MHomo";
    case SimModel::Hetero: return "MHetero";
    }
    return "?";
}

/// One row of the results table.
struct RepResult {
    SimModel model;
    std::string criterion;
    double sigma2 = 0.0;
    std::size_t rep = 0;
    std::size_t k_hat = 0; // 0 marks a failed replication
    std::size_t k_star = 0;
    double d1 = std::numeric_limits<double>::quiet_NaN();
    double d2 = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> sigma_err; // fitted sd on interval j minus the true sd
    double wall_ms = 0.0;
    std::vector<std::size_t> breaks;
};

struct GridOptions {
    std::vector<SimModel> models{SimModel::FixedHetero, SimModel::Homo, SimModel::Hetero};
    /// Criterion names from criterion_names(), plus "kstar" for the true K.
    std::vector<std::string> criteria{"lav", "bm1", "bm2", "mbic"};
    /// Also run the fixed-interval model with the true variances plugged in.
    bool oracle_variances = false;
    /// Record wall time; off keeps the table byte-reproducible.
    bool timing = false;
    unsigned threads = 0; // 0: hardware concurrency
};

struct GridResult {
    std::vector<RepResult> rows;
    std::vector<std::string> failures;
};

namespace detail {

inline std::vector<RepResult> run_cell(const SimDesign& d, const GridOptions& opts,
                                       const std::vector<SimModel>& models, double sigma2, std::size_t rep,
                                       std::vector<std::string>& failures) {
    std::vector<RepResult> rows;
    const auto sim = generate_series(d, sigma2, rep);
    for (SimModel m : models) {
        const auto start = std::chrono::steady_clock::now();
        std::optional<Analysis> fit;
        std::string failure;
        try {
            AnalysisOptions ao;
            ao.kmax = d.kmax;
            Model model = Model::FixedHetero;
            if (m == SimModel::Homo) model = Model::Homo;
            if (m == SimModel::Hetero) model = Model::Hetero;
            if (m == SimModel::FixedHeteroOracle) ao.known_scales = ScaleEstimates(sim.true_sigma);
            fit = analyze(model, sim.series, sim.map, ao);
        } catch (const std::exception& e) {
            failure = e.what();
        }
        const double ms =
            opts.timing ? std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count()
                        : 0.0;
        for (const auto& crit : opts.criteria) {
            RepResult r;
            r.model = m;
            r.criterion = crit;
            r.sigma2 = sigma2;
            r.rep = rep;
            r.k_star = d.k_star();
            r.wall_ms = ms;
            r.sigma_err.assign(sim.true_sigma.size(), std::numeric_limits<double>::quiet_NaN());
            if (fit) {
                try {
                    std::size_t k = crit == "kstar" ? d.k_star() : fit->report.chosen.at(crit);
                    k = std::min(k, fit->dp.kmax());
                    const auto& seg = fit->dp.segmentation(k);
                    r.k_hat = k;
                    r.breaks = seg.breakpoints();
                    const auto h = hausdorff_components(d.true_breaks, seg.breakpoints(), d.n);
                    r.d1 = h.d1;
                    r.d2 = h.d2;
                    const auto var = fit->fitted_variance(sim.series, sim.map, k);
                    for (int j = 1; j <= sim.map.interval_count(); ++j) {
                        double acc = 0.0;
                        for (std::size_t t = 1; t <= d.n; ++t) {
                            if (sim.map.label(t) == j) acc += var[t - 1];
                        }
                        const auto idx = static_cast<std::size_t>(j - 1);
                        r.sigma_err[idx] =
                            std::sqrt(acc / static_cast<double>(sim.map.count(j))) - sim.true_sigma[idx];
                    }
                } catch (const std::out_of_range&) {
                    failures.push_back(std::string(to_string(m)) + " sigma2=" + std::to_string(sigma2) +
                                       " rep=" + std::to_string(rep) + ": unknown criterion " + crit);
                }
            }
            rows.push_back(std::move(r));
        }
        if (!fit) {
            failures.push_back(std::string(to_string(m)) + " sigma2=" + std::to_string(sigma2) +
                               " rep=" + std::to_string(rep) + ": " + failure);
        }
    }
    return rows;
}

} // namespace detail

/// Runs every (sigma2, rep) cell, possibly in parallel. Rows are ordered by
/// (sigma2 index, rep, model, criterion) whatever the scheduling.
inline GridResult run_grid(const SimDesign& d, const GridOptions& opts = {}) {
    d.validate();
    std::vector<SimModel> models = opts.models;
    if (opts.oracle_variances &&
        std::find(models.begin(), models.end(), SimModel::FixedHeteroOracle) == models.end()) {
        models.push_back(SimModel::FixedHeteroOracle);
    }
    const std::size_t cells = d.sigma2_grid.size() * d.replications;
    std::vector<std::vector<RepResult>> slots(cells);
    std::vector<std::vector<std::string>> cell_failures(cells);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t c = next++; c < cells; c = next++) {
            const double sigma2 = d.sigma2_grid[c / d.replications];
            const std::size_t rep = c % d.replications;
            slots[c] = detail::run_cell(d, opts, models, sigma2, rep, cell_failures[c]);
        }
    };
    unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, cells));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    }

    GridResult out;
    out.rows.reserve(cells * models.size() * opts.criteria.size());
    for (std::size_t c = 0; c < cells; ++c) {
        for (auto& r : slots[c]) out.rows.push_back(std::move(r));
        for (auto& f : cell_failures[c]) out.failures.push_back(std::move(f));
    }
    return out;
}

namespace detail {

inline std::string cell(double v) {
    if (std::isnan(v)) return "nan";
    return hetseg::detail::format_double(v);
}

} // namespace detail

inline const char* kTableHeader = "model\tcriterion\tsigma2\trep\tkHat\tkStar\td1\td2\tsigmaErr1\tsigmaErr2\twallMs";

/// Tab-separated results table, one row per (model, criterion, sigma2, rep).
inline void write_table(std::ostream& os, const std::vector<RepResult>& rows) {
    os << kTableHeader << '\n';
    for (const auto& r : rows) {
        const double e1 = r.sigma_err.size() > 0 ? r.sigma_err[0] : std::numeric_limits<double>::quiet_NaN();
        const double e2 = r.sigma_err.size() > 1 ? r.sigma_err[1] : std::numeric_limits<double>::quiet_NaN();
        os << to_string(r.model) << '\t' << r.criterion << '\t' << detail::cell(r.sigma2) << '\t' << r.rep << '\t'
           << r.k_hat << '\t' << r.k_star << '\t' << detail::cell(r.d1) << '\t' << detail::cell(r.d2) << '\t'
           << detail::cell(e1) << '\t' << detail::cell(e2) << '\t' << detail::cell(r.wall_ms) << '\n';
    }
}

/// Boxplot statistics (type-7 quantiles).
struct Quartiles {
    double q1 = 0, median = 0, q3 = 0;
};

inline double quantile(std::vector<double> v, double p) {
    v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }), v.end());
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const double h = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline Quartiles quartiles(const std::vector<double>& v) {
    return {quantile(v, 0.25), quantile(v, 0.5), quantile(v, 0.75)};
}

struct SummaryRow {
    SimModel model;
    std::string criterion;
    double sigma2;
    Quartiles k_err; // kHat - kStar
    Quartiles d1;
    Quartiles d2;
};

inline std::vector<SummaryRow> summarize(const std::vector<RepResult>& rows) {
    using Key = std::tuple<double, int, std::string>;
    std::map<Key, std::tuple<std::vector<double>, std::vector<double>, std::vector<double>>> groups;
    std::vector<Key> order;
    for (const auto& r : rows) {
        if (r.k_hat == 0) continue;
        Key key{r.sigma2, static_cast<int>(r.model), r.criterion};
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) order.push_back(key);
        std::get<0>(it->second).push_back(static_cast<double>(r.k_hat) - static_cast<double>(r.k_star));
        std::get<1>(it->second).push_back(r.d1);
        std::get<2>(it->second).push_back(r.d2);
    }
    std::vector<SummaryRow> out;
    for (const auto& key : order) {
        const auto& [k, a, b] = groups.at(key);
        out.push_back({static_cast<SimModel>(std::get<1>(key)), std::get<2>(key), std::get<0>(key), quartiles(k),
                       quartiles(a), quartiles(b)});
    }
    return out;
}

/// Selects rows of one (model, criterion, sigma2) combination.
inline std::vector<const RepResult*> filter(const std::vector<RepResult>& rows, SimModel model,
                                            const std::string& criterion, double sigma2) {
    std::vector<const RepResult*> out;
    for (const auto& r : rows) {
        if (r.model == model && r.criterion == criterion && r.sigma2 == sigma2) out.push_back(&r);
    }
    return out;
}

} // namespace hetseg::sim
