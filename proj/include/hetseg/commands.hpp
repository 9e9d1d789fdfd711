#pragma once

// The segment / scale / simulate commands behind the command-line tool. Each
// returns the process exit status: 0 success, 1 pipeline error, 2 usage error.

#include "hetseg/core.hpp"
#include "hetseg/ingest.hpp"
#include "hetseg/pipeline.hpp"
#include "hetseg/sim_bench.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

namespace hetseg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPipelineError = 1;
inline constexpr int kExitUsage = 2;

struct SeriesCommandOptions {
    IngestConfig ingest;
    Model model = Model::FixedHetero;
    std::size_t kmax = 0;
    std::vector<std::string> criteria{"lav", "bm1", "bm2", "mbic"};
    bool zero_scale_floor = false;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = ".";
};

struct SimulateCommandOptions {
    sim::SimDesign design;
    sim::GridOptions grid;
    std::filesystem::path out_dir = ".";
};

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / name);
    if (!out) {
        throw Error(ErrorCode::InvalidArgument, "cannot write '" + (dir / name).string() + "'");
    }
    return out;
}

inline std::string describe(const Error& e, const std::vector<std::string>& names) {
    if ((e.code() == ErrorCode::ZeroScale || e.code() == ErrorCode::IntervalTooSparse) && e.detail()) {
        const auto j = static_cast<std::size_t>(*e.detail());
        if (j >= 1 && j <= names.size()) {
            return std::string(e.what()) + " [month " + names[j - 1] + ", label " + std::to_string(j) + "]";
        }
    }
    return e.what();
}

inline void check_criteria(const std::vector<std::string>& criteria) {
    for (const auto& c : criteria) {
        const auto& known = criterion_names();
        if (std::find(known.begin(), known.end(), c) == known.end()) {
            throw Error(ErrorCode::InvalidArgument, "unknown criterion '" + c + "'");
        }
    }
}

} // namespace detail

/// Scale estimates per interval only: writes scales.tsv.
inline int cmd_scale(const SeriesCommandOptions& opts, std::ostream& out, std::ostream& err) {
    std::vector<std::string> names;
    try {
        const auto parsed = parse_series(opts.ingest);
        names = parsed.label_names;
        ScaleOptions so;
        so.zero_scale_floor = opts.zero_scale_floor;
        const auto scales = sigma_per_interval(parsed.series, parsed.map, so);
        auto file = detail::open_output(opts.out_dir, "scales.tsv");
        write_scales(file, scales, names);
        out << "n=" << parsed.series.size() << " intervals=" << scales.size() << " dropped=" << parsed.dropped
            << '\n';
        for (int j = 1; j <= static_cast<int>(scales.size()); ++j) {
            out << names[static_cast<std::size_t>(j - 1)] << '\t' << hetseg::detail::format_double(scales.sigma(j))
                << '\n';
        }
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << detail::describe(e, names) << '\n';
        return e.code() == ErrorCode::InvalidArgument ? kExitUsage : kExitPipelineError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitPipelineError;
    }
}

/// Full pipeline on a file: scales.tsv (fixed-interval model), contrast.tsv and
/// one breaks_<criterion>.tsv per requested criterion.
inline int cmd_segment(const SeriesCommandOptions& opts, std::ostream& out, std::ostream& err) {
    std::vector<std::string> names;
    try {
        detail::check_criteria(opts.criteria);
        const auto parsed = parse_series(opts.ingest);
        names = parsed.label_names;
        AnalysisOptions ao;
        ao.kmax = opts.kmax;
        ao.scale.zero_scale_floor = opts.zero_scale_floor;
        const auto fit = analyze(opts.model, parsed.series, parsed.map, ao);

        if (fit.scales) {
            auto file = detail::open_output(opts.out_dir, "scales.tsv");
            write_scales(file, *fit.scales, names);
        }
        {
            auto file = detail::open_output(opts.out_dir, "contrast.tsv");
            write_contrast(file, fit.report.contrast);
        }
        out << "model=" << to_string(opts.model) << " n=" << parsed.series.size()
            << " intervals=" << parsed.map.interval_count() << " kmax=" << fit.dp.kmax()
            << " dropped=" << parsed.dropped << '\n';
        for (const auto& crit : opts.criteria) {
            const std::size_t k = fit.report.chosen.at(crit);
            const auto& seg = fit.dp.segmentation(k);
            auto file = detail::open_output(opts.out_dir, "breaks_" + crit + ".tsv");
            write_breaks(file, seg, parsed.series);
            out << crit << ": K=" << k << " breakpoints=" << seg.breakpoints().size();
            for (std::size_t t : seg.breakpoints()) out << ' ' << format_iso_date(parsed.series.dates()[t - 1]);
            out << '\n';
        }
        for (const auto& w : fit.report.warnings) err << "warning: " << w << '\n';
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << detail::describe(e, names) << '\n';
        return e.code() == ErrorCode::InvalidArgument ? kExitUsage : kExitPipelineError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitPipelineError;
    }
}

/// Runs the simulation grid: writes simgrid.tsv and prints median summaries.
inline int cmd_simulate(const SimulateCommandOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        opts.design.validate();
        for (const auto& c : opts.grid.criteria) {
            if (c != "kstar") detail::check_criteria({c});
        }
    } catch (const Error& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }
    try {
        const auto grid = sim::run_grid(opts.design, opts.grid);
        auto file = detail::open_output(opts.out_dir, "simgrid.tsv");
        sim::write_table(file, grid.rows);
        out << "model\tcriterion\tsigma2\tmedianKerr\tmedianD1\tmedianD2\n";
        for (const auto& s : sim::summarize(grid.rows)) {
            out << sim::to_string(s.model) << '\t' << s.criterion << '\t' << s.sigma2 << '\t' << s.k_err.median
                << '\t' << s.d1.median << '\t' << s.d2.median << '\n';
        }
        for (const auto& f : grid.failures) err << "failed: " << f << '\n';
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitPipelineError;
    }
}

} // namespace hetseg::cli
