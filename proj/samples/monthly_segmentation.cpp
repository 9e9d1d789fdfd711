// Three years of daily data with a summer/winter noise cycle and two jumps in
// the mean. Scales are estimated per calendar month, then the series is
// segmented with those scales held fixed.

#include "hetseg/hetseg.hpp"

#include <chrono>
#include <iostream>
#include <random>

int main() {
    using namespace std::chrono;
    const sys_days start = year{2015} / January / 1;
    const sys_days stop = year{2018} / January / 1;

    std::mt19937_64 engine(7);
    std::normal_distribution<double> noise;
    std::vector<double> values;
    std::vector<hetseg::Day> dates;
    for (sys_days d = start; d < stop; d += days{1}) {
        const unsigned m = hetseg::month_of(d);
        const double sigma = (m >= 5 && m <= 9) ? 2.0 : 0.5;
        double mean = 0.0;
        if (d >= sys_days{year{2016} / April / 1}) mean = 1.5;
        if (d >= sys_days{year{2017} / February / 15}) mean = 0.5;
        values.push_back(mean + sigma * noise(engine));
        dates.push_back(d);
    }

    hetseg::TimeSeries y(std::move(values), std::move(dates));
    auto [map, names] = hetseg::calendar_month_map(y.dates());

    const auto fit = hetseg::analyze(hetseg::Model::FixedHetero, y, map);
    std::cout << "month sigma\n";
    for (int j = 1; j <= map.interval_count(); ++j) {
        std::cout << names[static_cast<std::size_t>(j - 1)] << ' ' << fit.scales->sigma(j) << '\n';
    }
    for (const auto& [criterion, k] : fit.report.chosen) {
        std::cout << criterion << " K=" << k << ':';
        for (std::size_t t : fit.dp.segmentation(k).breakpoints()) {
            std::cout << ' ' << hetseg::format_iso_date(y.dates()[t - 1]);
        }
        std::cout << '\n';
    }
}
