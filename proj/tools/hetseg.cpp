// hetseg: segmentation of series with interval-wise known variances.
//
//   hetseg segment  --input FILE [--model M] [--criteria lav,mbic] [--out-dir DIR]
//   hetseg scale    --input FILE [--out-dir DIR]
//   hetseg simulate [--n 200] [--replications 100] [--sigma2 0.1,1.5] [--out-dir DIR]

#include "hetseg/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

const std::map<std::string, hetseg::MissingPolicy> kMissing{{"drop", hetseg::MissingPolicy::Drop},
                                                            {"error", hetseg::MissingPolicy::Error}};
const std::map<std::string, hetseg::IntervalScheme> kSchemes{{"month", hetseg::IntervalScheme::CalendarMonth},
                                                             {"labels", hetseg::IntervalScheme::ExplicitLabels}};
const std::map<std::string, hetseg::sim::SimModel> kSimModels{{"fixedhetero", hetseg::sim::SimModel::FixedHetero},
                                                              {"homo", hetseg::sim::SimModel::Homo},
                                                              {"hetero", hetseg::sim::SimModel::Hetero}};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiple change-point detection in the mean with interval-wise variances"};
    app.require_subcommand(1);
    app.fallthrough();

    hetseg::cli::SeriesCommandOptions series;
    hetseg::cli::SimulateCommandOptions simulate;
    std::string input;
    std::string out_dir = ".";
    std::vector<std::string> criteria{"lav", "bm1", "bm2", "mbic"};
    std::size_t kmax = 0;
    std::uint64_t seed = simulate.design.base_seed;
    bool zero_scale_floor = false;

    app.add_option("--input", input, "Input table (header row, YYYY-MM-DD dates)");
    app.add_option("--date-col", series.ingest.date_column, "Date column name")->capture_default_str();
    app.add_option("--value-col", series.ingest.value_column, "Value column name")->capture_default_str();
    app.add_option("--kmax", kmax, "Largest number of segments (default min(n/5, 100))")
        ->check(CLI::PositiveNumber);
    app.add_option("--criteria", criteria, "Comma list from lav,bm1,bm2,mbic")
        ->delimiter(',')
        ->check(CLI::IsMember({"lav", "bm1", "bm2", "mbic"}))
        ->capture_default_str();
    app.add_option("--seed", seed, "Base seed of the simulation streams")->capture_default_str();
    app.add_flag("--zero-scale-floor", zero_scale_floor, "Floor zero interval scales instead of failing");
    app.add_option("--out-dir", out_dir, "Directory for the output tables")->capture_default_str();

    std::string model = "fixedhetero";
    std::string missing = "drop";
    std::string scheme = "month";
    auto* segment = app.add_subcommand("segment", "Estimate scales, segment and select K");
    segment->add_option("--model", model, "fixedhetero, homo or hetero")
        ->check(CLI::IsMember({"fixedhetero", "homo", "hetero"}))
        ->capture_default_str();
    auto* scale = app.add_subcommand("scale", "Robust scale per variance interval only");
    for (auto* sub : {segment, scale}) {
        sub->fallthrough();
        sub->add_option("--missing", missing, "Unparseable values: drop or error")
            ->check(CLI::IsMember({"drop", "error"}))
            ->capture_default_str();
        sub->add_option("--scheme", scheme, "Variance intervals: month or labels")
            ->check(CLI::IsMember({"month", "labels"}))
            ->capture_default_str();
        sub->add_option("--labels-col", series.ingest.label_column, "Label column for --scheme labels")
            ->capture_default_str();
    }

    auto* sim = app.add_subcommand("simulate", "Run the simulation grid");
    sim->fallthrough();
    std::size_t n = simulate.design.n;
    std::vector<double> sigma2 = simulate.design.sigma2_grid;
    std::vector<std::string> models{"fixedhetero", "homo", "hetero"};
    sim->add_option("--n", n, "Series length (multiple of 8)")->capture_default_str();
    sim->add_option("--replications", simulate.design.replications, "Replications per sigma2")
        ->capture_default_str();
    sim->add_option("--sigma2", sigma2, "Comma list of second-interval scales")->delimiter(',');
    sim->add_option("--sigma1", simulate.design.sigma1, "First-interval scale")->capture_default_str();
    sim->add_option("--models", models, "Comma list from fixedhetero,homo,hetero")
        ->delimiter(',')
        ->check(CLI::IsMember({"fixedhetero", "homo", "hetero"}));
    sim->add_flag("--oracle", simulate.grid.oracle_variances, "Also run with the true variances plugged in");
    sim->add_flag("--timing", simulate.grid.timing, "Record wall time per replication");
    sim->add_option("--threads", simulate.grid.threads, "Worker threads (0: all cores)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n\n" << app.help();
        return hetseg::cli::kExitUsage;
    }

    if (segment->parsed() || scale->parsed()) {
        if (input.empty()) {
            std::cerr << "usage error: --input is required\n";
            return hetseg::cli::kExitUsage;
        }
        series.ingest.input_path = input;
        series.ingest.missing = kMissing.at(missing);
        series.ingest.scheme = kSchemes.at(scheme);
        series.kmax = kmax;
        series.criteria = criteria;
        series.seed = seed;
        series.zero_scale_floor = zero_scale_floor;
        series.out_dir = out_dir;
        if (scale->parsed()) return hetseg::cli::cmd_scale(series, std::cout, std::cerr);
        series.model = hetseg::parse_model(model);
        return hetseg::cli::cmd_segment(series, std::cout, std::cerr);
    }

    const auto reps = simulate.design.replications;
    const auto sigma1 = simulate.design.sigma1;
    simulate.design = hetseg::sim::SimDesign::standard(n);
    simulate.design.replications = reps;
    simulate.design.sigma1 = sigma1;
    simulate.design.sigma2_grid = sigma2;
    simulate.design.base_seed = seed;
    simulate.design.kmax = kmax;
    simulate.grid.criteria = criteria;
    simulate.grid.models.clear();
    for (const auto& m : models) simulate.grid.models.push_back(kSimModels.at(m));
    simulate.out_dir = out_dir;
    return hetseg::cli::cmd_simulate(simulate, std::cout, std::cerr);
}
