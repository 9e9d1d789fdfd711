// One cell of the benchmark design: a handful of replications at a single
// second-interval scale, summarised by criterion.

#include "hetseg/hetseg.hpp"

#include <iostream>

int main(int argc, char** argv) {
    auto design = hetseg::sim::SimDesign::standard(200);
    design.sigma2_grid = {argc > 1 ? std::stod(argv[1]) : 1.0};
    design.replications = 20;

    hetseg::sim::GridOptions opts;
    opts.models = {hetseg::sim::SimModel::FixedHetero, hetseg::sim::SimModel::Homo};
    const auto grid = hetseg::sim::run_grid(design, opts);

    std::cout << "model criterion medianKerr medianD1 medianD2\n";
    for (const auto& s : hetseg::sim::summarize(grid.rows)) {
        std::cout << hetseg::sim::to_string(s.model) << ' ' << s.criterion << ' ' << s.k_err.median << ' '
                  << s.d1.median << ' ' << s.d2.median << '\n';
    }
}
