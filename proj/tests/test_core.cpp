#include "hetseg/core.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace hetseg;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an hetseg::Error";
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST(ValidateInputs, MinimalValidInput) {
    const auto in = validate_inputs({1, 2, 3}, {1, 1, 2}, 2);
    EXPECT_EQ(in.series.size(), 3u);
    EXPECT_EQ(in.map.count(1), 2u);
    EXPECT_EQ(in.map.count(2), 1u);
}

TEST(ValidateInputs, LengthMismatch) {
    EXPECT_EQ(code_of([] { validate_inputs({1, 2}, {1, 1, 1}, 1); }), ErrorCode::LengthMismatch);
    EXPECT_EQ(code_of([] { validate_inputs(TimeSeries({1, 2}), VarianceIntervalMap::uniform(3)); }),
              ErrorCode::LengthMismatch);
}

TEST(ValidateInputs, UnusedLabelIsEmptyInterval) {
    EXPECT_EQ(code_of([] { validate_inputs({1, 2, 3}, {1, 1, 1}, 2); }), ErrorCode::EmptyInterval);
}

TEST(TimeSeries, RejectsShortNonFiniteAndUnorderedInput) {
    EXPECT_EQ(code_of([] { TimeSeries({1.0}); }), ErrorCode::InvalidSeries);
    EXPECT_EQ(code_of([] { TimeSeries({1.0, std::nan("")}); }), ErrorCode::NonFiniteValue);
    const Day d0 = std::chrono::sys_days{std::chrono::year{2020} / 1 / 2};
    EXPECT_EQ(code_of([&] { TimeSeries({1.0, 2.0}, std::vector<Day>{d0, d0}); }), ErrorCode::InvalidSeries);
    EXPECT_EQ(code_of([&] { TimeSeries({1.0, 2.0}, std::vector<Day>{d0}); }), ErrorCode::LengthMismatch);
}

TEST(TimeSeries, OneBasedAccess) {
    const TimeSeries y({4.0, 5.0, 6.0});
    EXPECT_EQ(y(1), 4.0);
    EXPECT_EQ(y(3), 6.0);
    EXPECT_FALSE(y.has_dates());
}

TEST(VarianceIntervalMap, CountsSumToN) {
    const VarianceIntervalMap map({2, 1, 3, 3, 1, 2, 2}, 3);
    EXPECT_EQ(map.count(1) + map.count(2) + map.count(3), map.size());
    EXPECT_EQ(map.label(3), 3);
    EXPECT_EQ(code_of([] { VarianceIntervalMap({1, 4}, 3); }), ErrorCode::InvalidArgument);
}

TEST(Segmentation, RejectsInvalidBreakpoints) {
    EXPECT_EQ(code_of([] { Segmentation(5, {3, 3}, {0, 0, 0}); }), ErrorCode::InvalidSegmentation);
    EXPECT_EQ(code_of([] { Segmentation(5, {5}, {0, 0}); }), ErrorCode::InvalidSegmentation);
    EXPECT_EQ(code_of([] { Segmentation(5, {2}, {0}); }), ErrorCode::InvalidSegmentation);
}

TEST(Segmentation, FittedFollowsLastIndexConvention) {
    const Segmentation s(6, {2, 4}, {1.0, 2.0, 3.0});
    EXPECT_EQ(s.segment(1), (SegmentRange{1, 2}));
    EXPECT_EQ(s.segment(3), (SegmentRange{5, 6}));
    EXPECT_EQ(s.fitted(2), 1.0);
    EXPECT_EQ(s.fitted(3), 2.0);
    EXPECT_EQ(s.fitted(6), 3.0);
}

TEST(SegmentationProperty, RangesPartitionAndRoundTrip) {
    std::mt19937_64 engine(11);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + engine() % 40;
        std::vector<std::size_t> breaks;
        for (std::size_t t = 1; t < n; ++t) {
            if (engine() % 4 == 0) breaks.push_back(t);
        }
        std::vector<double> means;
        std::normal_distribution<double> normal;
        for (std::size_t k = 0; k <= breaks.size(); ++k) means.push_back(normal(engine) * 1e3);
        const Segmentation s(n, breaks, means);

        std::size_t next = 1;
        for (const auto& r : s.segments()) {
            ASSERT_EQ(r.first, next);
            ASSERT_GE(r.last, r.first);
            next = r.last + 1;
        }
        ASSERT_EQ(next, n + 1);

        const auto back = parse_segmentation(serialize(s));
        ASSERT_EQ(back, s) << serialize(s);
    }
}

TEST(Segmentation, ParseRejectsGarbage) {
    EXPECT_EQ(code_of([] { parse_segmentation("n=5 breaks=2,x means=1,2,3"); }), ErrorCode::ParseError);
    EXPECT_EQ(code_of([] { parse_segmentation("breaks=2 means=1,2"); }), ErrorCode::ParseError);
}

TEST(ScaleEstimates, RejectsNonPositive) {
    EXPECT_EQ(code_of([] { ScaleEstimates({1.0, 0.0}); }), ErrorCode::ZeroScale);
    EXPECT_DOUBLE_EQ(ScaleEstimates({0.5, 2.0}).sigma(2), 2.0);
}
