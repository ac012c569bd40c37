#include <doctest.h>

#include <algorithm>
#include <set>

#include "oracles.hpp"
#include "xraysim/labelproj.hpp"
#include "xraysim/rng.hpp"

using namespace xraysim;

namespace {

LabelVolume random_labels(Dims3 dims, std::uint64_t seed, double fg_prob = 0.3) {
    SplitMix64 rng(seed);
    LabelVolume vol(dims, {1, 1, 1});
    for (auto& v : vol.data())
        v = rng.next_unit() < fg_prob ? std::uint8_t(1 + rng.next_u64() % (kNumLabels - 1)) : 0;
    return vol;
}

} // namespace

TEST_SUITE_BEGIN("labelproj");

TEST_CASE("a column holding one label projects that label") {
    LabelVolume vol({1, 1, 8}, {1, 1, 1});
    vol.at(0, 0, 3) = 5;
    vol.at(0, 0, 6) = 5;
    CHECK(project_labels(vol).at(0, 0) == 5);
}

TEST_CASE("overlap resolves to the label nearer the viewer") {
    LabelVolume vol({1, 1, 10}, {1, 1, 1});
    vol.at(0, 0, 3) = 8;
    vol.at(0, 0, 7) = 4;
    CHECK(project_labels(vol).at(0, 0) == 8);
    CHECK(project_labels(vol, /*from_far_side=*/true).at(0, 0) == 4);
}

TEST_CASE("an all-background column projects 0") {
    const LabelVolume vol({2, 2, 5}, {1, 1, 1});
    const LabelMask mask = project_labels(vol);
    for (auto v : mask.data())
        CHECK(v == 0);
}

TEST_CASE("projection matches the depth-scan oracle on random volumes") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const LabelVolume vol = random_labels({8, 8, 8}, seed);
        CHECK(project_labels(vol).data() == oracle::project_labels(vol, false));
        CHECK(project_labels(vol, true).data() == oracle::project_labels(vol, true));
    }
}

TEST_CASE("depth consistency: shuffling behind the first hit changes nothing") {
    LabelVolume vol({1, 1, 6}, {1, 1, 1});
    vol.at(0, 0, 2) = 7;
    vol.at(0, 0, 4) = 3;
    vol.at(0, 0, 5) = 9;
    const auto before = project_labels(vol).at(0, 0);

    std::swap(vol.at(0, 0, 4), vol.at(0, 0, 5)); // permute behind z=2
    CHECK(project_labels(vol).at(0, 0) == before);
}

TEST_CASE("mask labels are always a subset of the volume labels") {
    const LabelVolume vol = random_labels({12, 12, 6}, 77, 0.1);
    std::set<std::uint8_t> in_vol(vol.data().begin(), vol.data().end());
    const LabelMask mask = project_labels(vol);
    for (auto v : mask.data())
        CHECK(in_vol.count(v) == 1);
}

TEST_CASE("resize_mask identity and uniform cases") {
    LabelMask mask(6, 4);
    SplitMix64 rng(5);
    for (auto& v : mask.data())
        v = std::uint8_t(rng.next_u64() % kNumLabels);
    CHECK(resize_mask(mask, 6, 4) == mask);

    const LabelMask uniform(9, 9, 2);
    const LabelMask shrunk = resize_mask(uniform, 5, 7);
    for (auto v : shrunk.data())
        CHECK(v == 2);
}

TEST_CASE("checkerboard downscale stays within the label set, nearest-center") {
    const int n = 16;
    LabelMask board(n, n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x)
            board.at(x, y) = ((x + y) % 2 == 0) ? 1 : 2;

    const LabelMask out = resize_mask(board, n / 2, n / 2);
    for (int y = 0; y < n / 2; ++y)
        for (int x = 0; x < n / 2; ++x) {
            CHECK((out.at(x, y) == 1 || out.at(x, y) == 2));
            // nearest-center oracle with the corner-aligned mapping
            const int sx = int(std::lround(double(x) * (n - 1) / (n / 2 - 1)));
            const int sy = int(std::lround(double(y) * (n - 1) / (n / 2 - 1)));
            CHECK(out.at(x, y) == board.at(std::min(sx, n - 1), std::min(sy, n - 1)));
        }
}

TEST_CASE("mask construction rejects out-of-range class IDs") {
    std::vector<std::uint8_t> bad(4, 11);
    CHECK_THROWS_AS(LabelMask(2, 2, bad), Error);
}

TEST_SUITE_END();
