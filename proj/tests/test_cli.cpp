#include "hetseg/ingest.hpp"
#include "hetseg/sim_bench.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;
using namespace std::chrono;

namespace {

struct Run {
    int status;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("hetseg_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Run run(const std::string& args, const fs::path& dir) {
    const std::string cmd = std::string(HETSEG_CLI_PATH) + " " + args + " > " + (dir / "stdout.txt").string() +
                            " 2> " + (dir / "stderr.txt").string();
    const int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(dir / "stdout.txt"), slurp(dir / "stderr.txt")};
}

void write_simulated_series(const fs::path& file) {
    const auto s = hetseg::sim::generate_series(hetseg::sim::SimDesign::standard(200), 0.3, 1);
    std::ofstream os(file);
    os << "day,iwv\n";
    sys_days day = year{2005} / 1 / 1;
    for (std::size_t t = 1; t <= 200; ++t, day += days{1}) {
        os << hetseg::format_iso_date(day) << ',' << hetseg::detail::format_double(s.series(t)) << '\n';
    }
}

} // namespace

TEST(Cli, HelpExitsZero) {
    const auto dir = scratch_dir("help");
    const auto r = run("--help", dir);
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("segment"), std::string::npos);
    EXPECT_NE(r.out.find("simulate"), std::string::npos);
    EXPECT_NE(r.out.find("scale"), std::string::npos);
}

TEST(Cli, UnknownFlagIsUsageError) {
    const auto dir = scratch_dir("unknown");
    const auto r = run("simulate --bogus", dir);
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.err.find("Usage"), std::string::npos) << r.err;
}

TEST(Cli, MissingSubcommandOrInputIsUsageError) {
    const auto dir = scratch_dir("nosub");
    EXPECT_EQ(run("", dir).status, 2);
    EXPECT_EQ(run("segment", dir).status, 2);
    EXPECT_EQ(run("segment --input x.csv --criteria lav,aic", dir).status, 2);
    EXPECT_EQ(run("simulate --n 203", dir).status, 2);
}

TEST(Cli, PipelineErrorExitsOne) {
    const auto dir = scratch_dir("missingfile");
    const auto r = run("segment --input " + (dir / "absent.csv").string(), dir);
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.err.find("ParseError"), std::string::npos);
}

TEST(Cli, SimulateSmoke) {
    const auto dir = scratch_dir("simulate");
    const auto start = steady_clock::now();
    const auto r = run("simulate --replications 1 --sigma2 0.5 --out-dir " + dir.string(), dir);
    const double seconds = duration<double>(steady_clock::now() - start).count();
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_LT(seconds, 5.0);
    const auto table = slurp(dir / "simgrid.tsv");
    EXPECT_EQ(table.substr(0, table.find('\n')), hetseg::sim::kTableHeader);
    EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 1 + 3 * 4);
}

TEST(Cli, SegmentIsByteIdenticalAcrossRuns) {
    const auto dir = scratch_dir("repeat");
    write_simulated_series(dir / "in.csv");
    const std::string common =
        "--date-col day --value-col iwv --input " + (dir / "in.csv").string() + " --kmax 25 --seed 3";
    ASSERT_EQ(run("segment " + common + " --out-dir " + (dir / "a").string(), dir).status, 0);
    const auto first_out = slurp(dir / "stdout.txt");
    ASSERT_EQ(run("segment " + common + " --out-dir " + (dir / "b").string(), dir).status, 0);
    EXPECT_EQ(slurp(dir / "stdout.txt"), first_out);
    for (const char* f : {"scales.tsv", "contrast.tsv", "breaks_lav.tsv", "breaks_bm1.tsv", "breaks_bm2.tsv",
                          "breaks_mbic.tsv"}) {
        EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
        EXPECT_FALSE(slurp(dir / "a" / f).empty()) << f;
    }
    EXPECT_EQ(std::count(first_out.begin(), first_out.end(), '\n'), 5);
}

TEST(Cli, BreakDatesAreObservedTimestamps) {
    const auto dir = scratch_dir("dates");
    write_simulated_series(dir / "in.csv");
    ASSERT_EQ(run("segment --date-col day --value-col iwv --criteria mbic --input " + (dir / "in.csv").string() +
                      " --out-dir " + dir.string(),
                  dir)
                  .status,
              0);
    const auto input = slurp(dir / "in.csv");
    std::istringstream in(slurp(dir / "breaks_mbic.tsv"));
    std::string line;
    std::getline(in, line);
    int rows = 0;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string k, date, index;
        fields >> k >> date >> index;
        EXPECT_NE(input.find(date + ","), std::string::npos) << date;
        ++rows;
    }
    EXPECT_GE(rows, 1);
}

TEST(Cli, ScaleTableHasOneRowPerMonth) {
    const auto dir = scratch_dir("scale");
    write_simulated_series(dir / "in.csv");
    const auto r = run("scale --date-col day --value-col iwv --input " + (dir / "in.csv").string() + " --out-dir " +
                           dir.string(),
                       dir);
    ASSERT_EQ(r.status, 0) << r.err;
    const auto table = slurp(dir / "scales.tsv");
    // 200 days from January 1st cover January through July
    EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 1 + 7);
    EXPECT_FALSE(fs::exists(dir / "contrast.tsv"));
}

TEST(Cli, ModelsAndSchemes) {
    const auto dir = scratch_dir("models");
    write_simulated_series(dir / "in.csv");
    for (const char* model : {"homo", "hetero"}) {
        const auto r = run(std::string("segment --model ") + model +
                               " --date-col day --value-col iwv --input " + (dir / "in.csv").string() +
                               " --out-dir " + (dir / model).string(),
                           dir);
        EXPECT_EQ(r.status, 0) << r.err;
        EXPECT_FALSE(fs::exists(dir / model / "scales.tsv"));
        EXPECT_TRUE(fs::exists(dir / model / "breaks_bm2.tsv"));
    }
    EXPECT_EQ(run("segment --model other --input " + (dir / "in.csv").string(), dir).status, 2);
}
