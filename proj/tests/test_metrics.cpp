#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "xraysim/metrics.hpp"
#include "xraysim/rng.hpp"

using namespace xraysim;

namespace {

LabelMask block_mask(int n, int x0, int y0, int w, int h, std::uint8_t label) {
    LabelMask mask(n, n);
    for (int y = y0; y < y0 + h; ++y)
        for (int x = x0; x < x0 + w; ++x)
            mask.at(x, y) = label;
    return mask;
}

LabelMask random_mask(int n, std::uint64_t seed, int max_label = 3) {
    SplitMix64 rng(seed);
    LabelMask mask(n, n);
    for (auto& v : mask.data())
        v = std::uint8_t(rng.next_u64() % (max_label + 1));
    return mask;
}

} // namespace

TEST_SUITE_BEGIN("metrics");

TEST_CASE("dice ground truths") {
    const LabelMask a = block_mask(16, 2, 2, 4, 4, 5);
    CHECK(dice(a, a, 5) == 1.0);

    const LabelMask b = block_mask(16, 9, 9, 4, 4, 5);
    CHECK(dice(a, b, 5) == 0.0); // disjoint, equal area

    // 2x2 block against itself shifted by one pixel: overlap 2 of 4+4
    const LabelMask p = block_mask(8, 3, 3, 2, 2, 1);
    const LabelMask g = block_mask(8, 4, 3, 2, 2, 1);
    CHECK(dice(p, g, 1) == 0.5);
}

TEST_CASE("dice degenerate conventions") {
    const LabelMask empty(8, 8);
    CHECK(dice(empty, empty, 3) == 1.0); // both empty
    const LabelMask some = block_mask(8, 1, 1, 2, 2, 3);
    CHECK(dice(empty, some, 3) == 0.0); // exactly one empty
    CHECK(dice(some, empty, 3) == 0.0);
}

TEST_CASE("dice is symmetric and exact against the oracle on random masks") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const LabelMask a = random_mask(16, seed * 2);
        const LabelMask b = random_mask(16, seed * 2 + 1);
        for (int label = 1; label <= 3; ++label) {
            CHECK(dice(a, b, label) == dice(b, a, label));
            CHECK(dice(a, b, label) == oracle::dice(a, b, label));
        }
    }
}

TEST_CASE("asd of identical masks is zero") {
    const LabelMask a = block_mask(16, 3, 5, 6, 4, 7);
    CHECK(asd(a, a, 7) == 0.0);
}

TEST_CASE("asd of a square shifted by one pixel matches the brute-force oracle exactly") {
    const LabelMask p = block_mask(32, 8, 8, 10, 10, 2);
    const LabelMask g = block_mask(32, 9, 8, 10, 10, 2);
    const auto got = asd(p, g, 2);
    const auto expected = oracle::asd(p, g, 2);
    REQUIRE(got.has_value());
    REQUIRE(expected.has_value());
    CHECK(*got == *expected);
}

TEST_CASE("asd sentinel when the label is absent from one side") {
    const LabelMask empty(8, 8);
    const LabelMask some = block_mask(8, 2, 2, 3, 3, 4);
    CHECK(!asd(empty, some, 4).has_value());
    CHECK(!asd(some, empty, 4).has_value());
    CHECK(!asd(empty, empty, 4).has_value());
}

TEST_CASE("asd agrees with the brute-force oracle on random 16x16 masks") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const LabelMask a = random_mask(16, 1000 + seed * 2, 2);
        const LabelMask b = random_mask(16, 1001 + seed * 2, 2);
        for (int label = 1; label <= 2; ++label) {
            const auto got = asd(a, b, label);
            const auto expected = oracle::asd(a, b, label);
            REQUIRE(got.has_value() == expected.has_value());
            if (got)
                CHECK(std::abs(*got - *expected) < 1e-9);
        }
    }
}

TEST_CASE("asd is symmetric and translation-invariant") {
    const LabelMask a = block_mask(24, 4, 6, 5, 7, 9);
    const LabelMask b = block_mask(24, 6, 5, 6, 5, 9);
    CHECK(*asd(a, b, 9) == *asd(b, a, 9));

    const LabelMask a_shift = block_mask(24, 7, 9, 5, 7, 9);
    const LabelMask b_shift = block_mask(24, 9, 8, 6, 5, 9);
    CHECK(*asd(a_shift, b_shift, 9) == doctest::Approx(*asd(a, b, 9)).epsilon(1e-12));
    CHECK(dice(a_shift, b_shift, 9) == dice(a, b, 9));
}

TEST_CASE("asd scales with the supplied pixel spacing") {
    const LabelMask p = block_mask(32, 8, 8, 10, 10, 2);
    const LabelMask g = block_mask(32, 12, 8, 10, 10, 2);
    const double px = *asd(p, g, 2);
    const double mm = *asd(p, g, 2, 0.29);
    CHECK(mm == doctest::Approx(px * 0.29).epsilon(1e-12));
}

TEST_CASE("mismatched dims are rejected") {
    const LabelMask a(8, 8);
    const LabelMask b(8, 9);
    CHECK_THROWS_AS(dice(a, b, 1), DimensionMismatch);
    CHECK_THROWS_AS(asd(a, b, 1), DimensionMismatch);
}

TEST_CASE("evaluate: perfect predictions score 1 and 0 everywhere") {
    std::vector<EvalItem> items;
    for (double angle : {-30.0, 0.0, 30.0}) {
        EvalItem item;
        item.subject = "s";
        item.angle_deg = angle;
        item.copy = 0;
        item.gt = block_mask(16, 3, 3, 5, 5, 4);
        item.pred = item.gt;
        items.push_back(std::move(item));
    }
    const MetricsReport report = evaluate(items);
    REQUIRE(report.bins == std::vector<double>{0.0, 30.0});
    CHECK(report.items_per_bin == std::vector<int>{1, 2});
    for (std::size_t b = 0; b < report.bins.size(); ++b) {
        CHECK(report.dice_mean[4][b] == 1.0);
        REQUIRE(report.asd_mean[4][b].has_value());
        CHECK(*report.asd_mean[4][b] == 0.0);
    }
}

TEST_CASE("evaluate pools +30 and -30 into a single bin") {
    std::vector<EvalItem> items;
    // dice 1.0 at -30, dice 0.5 at +30 -> pooled mean 0.75
    EvalItem neg;
    neg.subject = "s";
    neg.angle_deg = -30.0;
    neg.gt = block_mask(8, 3, 3, 2, 2, 1);
    neg.pred = neg.gt;
    items.push_back(neg);

    EvalItem pos;
    pos.subject = "s";
    pos.angle_deg = 30.0;
    pos.copy = 1;
    pos.gt = block_mask(8, 3, 3, 2, 2, 1);
    pos.pred = block_mask(8, 4, 3, 2, 2, 1);
    items.push_back(pos);

    const MetricsReport report = evaluate(items);
    REQUIRE(report.bins.size() == 1);
    CHECK(report.bins[0] == 30.0);
    CHECK(report.items_per_bin[0] == 2);
    CHECK(report.dice_mean[1][0] == doctest::Approx(0.75));
}

TEST_CASE("bin means are arithmetic means: 0.8 and 1.0 give 0.9") {
    // shifted wide blocks: |P|=|G|=8, overlap 6 of 16 -> dice 0.75... build
    // an exact 0.8: |P|=|G|=10, overlap 8 -> 2*8/20 = 0.8
    EvalItem a;
    a.subject = "s";
    a.angle_deg = 10.0;
    a.gt = block_mask(16, 2, 2, 10, 1, 1);
    a.pred = block_mask(16, 4, 2, 10, 1, 1);
    REQUIRE(dice(a.pred, a.gt, 1) == 0.8);

    EvalItem b;
    b.subject = "s";
    b.angle_deg = 10.0;
    b.copy = 1;
    b.gt = block_mask(16, 2, 2, 10, 1, 1);
    b.pred = b.gt;
    std::vector<EvalItem> items{a, b};
    const MetricsReport report = evaluate(items);
    CHECK(report.dice_mean[1][0] == doctest::Approx(0.9));
}

TEST_CASE("CSV layout is 10 bone rows plus Average per metric block") {
    std::vector<EvalItem> items;
    for (double angle : {0.0, 10.0, -10.0, 20.0, -20.0, 30.0, 40.0, 50.0, 60.0, 70.0}) {
        EvalItem item;
        item.subject = "s";
        item.angle_deg = angle;
        item.gt = block_mask(16, 3, 3, 5, 5, 4);
        item.pred = item.gt;
        items.push_back(std::move(item));
    }
    const MetricsReport report = evaluate(items);
    REQUIRE(report.bins.size() == 8); // 0..70 pooled

    std::istringstream csv(report.to_csv());
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(csv, line))
        lines.push_back(line);
    REQUIRE(lines.size() == 1 + 11 + 11); // header + dice block + asd block

    CHECK(lines[0] == "metric,bone,0,10,20,30,40,50,60,70");
    CHECK(lines[1].rfind("dice,Ulna,", 0) == 0);
    CHECK(lines[10].rfind("dice,Trapezium,", 0) == 0);
    CHECK(lines[11].rfind("dice,Average,", 0) == 0);
    CHECK(lines[12].rfind("asd,Ulna,", 0) == 0);
    CHECK(lines[22].rfind("asd,Average,", 0) == 0);

    // every cell in the Dice block of a perfect run is 1
    for (int row = 1; row <= 10; ++row) {
        std::istringstream ss(lines[row]);
        std::string cell;
        std::getline(ss, cell, ',');
        std::getline(ss, cell, ',');
        int cells = 0;
        while (std::getline(ss, cell, ',')) {
            // absent bones pool to dice 1.0 under the both-empty rule too
            CHECK(cell == "1");
            ++cells;
        }
        CHECK(cells == 8);
    }
}

TEST_SUITE_END();
