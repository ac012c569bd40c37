#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "oracles.hpp"
#include "xraysim/projection.hpp"
#include "xraysim/rng.hpp"

using namespace xraysim;

namespace {

CtVolume random_volume(Dims3 dims, std::uint64_t seed, float hi = 1000.0f) {
    SplitMix64 rng(seed);
    CtVolume vol(dims, {0.5, 0.5, 0.5});
    for (float& v : vol.data())
        v = float(rng.next_range(0.0, hi));
    return vol;
}

Radiograph image_from(std::vector<float> values, int w, int h,
                      ImageStage stage = ImageStage::raw_projection) {
    Radiograph img(w, h, stage);
    img.data() = std::move(values);
    return img;
}

} // namespace

TEST_SUITE_BEGIN("projection");

TEST_CASE("projecting an all-zero volume gives the constant image 1") {
    const CtVolume vol({5, 4, 6}, {0.5, 0.5, 0.5}, 0.0f);
    const Radiograph img = project(vol, {});
    for (float v : img.data())
        CHECK(v == 1.0f);
}

TEST_CASE("single-voxel column evaluates the attenuation law directly") {
    const double alpha = 2e-4, sz = 0.625, v = 800.0;
    CtVolume vol({1, 1, 1}, {0.29, 0.29, sz}, float(v));
    ProjectionConfig config;
    config.attenuation_scale = alpha;
    const Radiograph img = project(vol, config);
    // exact at the image's scalar precision: one term in the exponent sum
    CHECK(img.at(0, 0) == float(std::exp(-alpha * (v * sz))));
    CHECK(double(img.at(0, 0)) ==
          doctest::Approx(std::exp(-alpha * v * sz)).epsilon(1e-7));
}

TEST_CASE("projection matches the brute-force ray-sum oracle on random volumes") {
    ProjectionConfig config;
    config.attenuation_scale = 1e-4;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const CtVolume vol = random_volume({8, 8, 8}, seed);
        const Radiograph img = project(vol, config);
        const std::vector<double> expected = oracle::project(vol, config.attenuation_scale);
        for (std::size_t i = 0; i < expected.size(); ++i)
            CHECK(std::abs(double(img.data()[i]) - expected[i]) < 1e-6);
    }
}

TEST_CASE("adaptive attenuation maps the densest ray to exp(-c)") {
    const CtVolume vol = random_volume({6, 6, 6}, 5);
    ProjectionConfig config; // adaptive by default, c = 4
    const Radiograph img = project(vol, config);
    const float lo = *std::min_element(img.data().begin(), img.data().end());
    CHECK(lo == doctest::Approx(std::exp(-4.0)).epsilon(1e-6));
    for (float v : img.data()) {
        CHECK(v > 0.0f);
        CHECK(v <= 1.0f);
    }
}

TEST_CASE("projection is monotone: denser voxels never brighten pixels") {
    ProjectionConfig config;
    config.attenuation_scale = 1e-3;
    CtVolume vol = random_volume({5, 5, 5}, 8);
    const Radiograph before = project(vol, config);
    vol.at(2, 3, 1) += 500.0f;
    const Radiograph after = project(vol, config);
    for (std::size_t i = 0; i < before.data().size(); ++i)
        CHECK(after.data()[i] <= before.data()[i]);
}

TEST_CASE("tissue reduction matches the hand-checked 1..100 case") {
    std::vector<float> values(100);
    std::iota(values.begin(), values.end(), 1.0f);
    const Radiograph img = image_from(values, 10, 10);
    const Radiograph out = tissue_reduction(img, {});
    // nearest-rank p20 = 20, p10 = 10; pixels 1..19 all become 10
    for (int i = 0; i < 19; ++i)
        CHECK(out.data()[i] == 10.0f);
    for (int i = 19; i < 100; ++i)
        CHECK(out.data()[i] == float(i + 1));
}

TEST_CASE("tissue reduction leaves constant images untouched") {
    const Radiograph img = image_from(std::vector<float>(64, 0.4f), 8, 8);
    const Radiograph out = tissue_reduction(img, {});
    CHECK(out.data() == img.data());
}

TEST_CASE("tissue reduction never touches pixels at or above the low percentile") {
    SplitMix64 rng(12);
    std::vector<float> values(400);
    for (float& v : values)
        v = float(rng.next_unit());
    const Radiograph img = image_from(values, 20, 20);
    const Radiograph out = tissue_reduction(img, {});

    const float p20 = oracle::percentile(values, 20.0);
    const float p10 = oracle::percentile(values, 10.0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < p20)
            CHECK(out.data()[i] == p10);
        else
            CHECK(out.data()[i] == values[i]);
    }
}

TEST_CASE("tissue reduction polarity flag mirrors the literal rule") {
    SplitMix64 rng(13);
    std::vector<float> values(100);
    for (float& v : values)
        v = float(rng.next_unit());
    const Radiograph img = image_from(values, 10, 10);

    ProjectionConfig inverted;
    inverted.invert_for_tissue_reduction = true;
    const Radiograph out = tissue_reduction(img, inverted);

    // inverted path = invert, literal rule, invert back
    std::vector<float> flipped(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        flipped[i] = 1.0f - values[i];
    const Radiograph expect_inner = tissue_reduction(image_from(flipped, 10, 10), {});
    for (std::size_t i = 0; i < values.size(); ++i)
        CHECK(out.data()[i] == 1.0f - expect_inner.data()[i]);
}

TEST_CASE("min-max normalization basics") {
    const Radiograph img = image_from({2.0f, 4.0f, 6.0f}, 3, 1);
    const Radiograph out = normalize_minmax(img);
    CHECK(out.data() == std::vector<float>{0.0f, 0.5f, 1.0f});

    const Radiograph constant = image_from(std::vector<float>(12, 3.3f), 4, 3);
    const Radiograph zeros = normalize_minmax(constant);
    for (float v : zeros.data())
        CHECK(v == 0.0f);
}

TEST_CASE("normalization pins min to 0 and max to 1, and is idempotent") {
    SplitMix64 rng(3);
    std::vector<float> values(256);
    for (float& v : values)
        v = float(rng.next_range(-3.0, 9.0));
    const Radiograph out = normalize_minmax(image_from(values, 16, 16));
    CHECK(*std::min_element(out.data().begin(), out.data().end()) == 0.0f);
    CHECK(*std::max_element(out.data().begin(), out.data().end()) == 1.0f);
    CHECK(normalize_minmax(out).data() == out.data());
}

TEST_CASE("resize at the same size is bitwise identity") {
    SplitMix64 rng(19);
    std::vector<float> values(256 * 256);
    for (float& v : values)
        v = float(rng.next_unit());
    const Radiograph img = image_from(values, 256, 256, ImageStage::normalized);
    const Radiograph out = resize(img, 256, 256);
    CHECK(out.data() == img.data());
}

TEST_CASE("resize of a constant image is constant") {
    const Radiograph img = image_from(std::vector<float>(40 * 30, 0.7f), 40, 30);
    const Radiograph out = resize(img, 17, 23);
    for (float v : out.data())
        CHECK(v == doctest::Approx(0.7f));
}

TEST_CASE("downscaling a linear ramp keeps it a ramp with the same endpoints") {
    const int w = 64;
    std::vector<float> values(w * 8);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < w; ++x)
            values[y * w + x] = float(x);
    const Radiograph img = image_from(values, w, 8);
    const Radiograph out = resize(img, w / 2, 8);

    CHECK(out.at(0, 3) == doctest::Approx(0.0).epsilon(1e-5));
    CHECK(out.at(w / 2 - 1, 3) == doctest::Approx(double(w - 1)).epsilon(1e-5));
    for (int x = 0; x < w / 2; ++x) {
        const double expected = double(x) * double(w - 1) / double(w / 2 - 1);
        CHECK(out.at(x, 4) == doctest::Approx(expected).epsilon(1e-5));
    }
}

TEST_CASE("resize respects the input value range") {
    SplitMix64 rng(23);
    std::vector<float> values(31 * 17);
    for (float& v : values)
        v = float(rng.next_range(-2.0, 5.0));
    const Radiograph img = image_from(values, 31, 17);
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const Radiograph out = resize(img, 77, 9);
    for (float v : out.data()) {
        CHECK(v >= *lo - 1e-5f);
        CHECK(v <= *hi + 1e-5f);
    }
}

namespace {

std::pair<CtVolume, LabelVolume> two_bone_phantom(int n = 24) {
    PhantomSpec spec;
    spec.dims = {n, n, n};
    spec.spacing = {0.5, 0.5, 0.5};
    const double mm = 0.5 * n;
    spec.primitives.push_back({PhantomPrimitive::Shape::box, {mm / 2, mm / 2, mm / 3},
                               {mm / 3, mm / 2, mm / 4}, Axis::y, 700.0f, 4});
    spec.primitives.push_back({PhantomPrimitive::Shape::sphere, {mm / 2, mm / 2, 2 * mm / 3},
                               {mm / 5, 0, 0}, Axis::y, 1100.0f, 8});
    return make_phantom(spec, 1);
}

} // namespace

TEST_CASE("simulate_view equals the manually chained stages bitwise") {
    const auto [ct, labels] = two_bone_phantom();
    ProjectionConfig config;
    config.output_width = 32;
    config.output_height = 32;
    const double angle = 20.0;

    const auto [img, mask] = simulate_view(ct, labels, angle, config);

    const CtVolume conditioned = clamp_air(clamp_artifacts(ct, config.artifact_percentile));
    Radiograph expected = project(rotate_volume(conditioned, angle), config);
    expected = tissue_reduction(expected, config);
    expected = normalize_minmax(expected);
    expected = resize(expected, config.output_width, config.output_height);
    CHECK(img.data() == expected.data());

    LabelMask expected_mask = project_labels(rotate_volume(labels, angle));
    expected_mask = resize_mask(expected_mask, config.output_width, config.output_height);
    CHECK(mask.data() == expected_mask.data());
}

TEST_CASE("the default sweep yields 15 distinct view pairs") {
    const auto angles = ProjectionConfig::default_view_angles();
    REQUIRE(angles.size() == 15);
    CHECK(angles.front() == -70.0);
    CHECK(angles.back() == 70.0);

    const auto [ct, labels] = two_bone_phantom(16);
    ProjectionConfig config;
    config.output_width = 16;
    config.output_height = 16;

    std::set<std::vector<float>> images;
    for (double angle : angles)
        images.insert(simulate_view(ct, labels, angle, config).first.data());
    CHECK(images.size() == 15);
}

TEST_CASE("a single axis-aligned box masks exactly its (x,y) footprint at 0 degrees") {
    PhantomSpec spec;
    spec.dims = {16, 16, 16};
    spec.spacing = {1, 1, 1};
    // box spanning x in [4,8), y in [6,12) voxel centers
    spec.primitives.push_back({PhantomPrimitive::Shape::box, {6, 9, 8}, {4, 6, 6},
                               Axis::y, 500.0f, 4});
    const auto [ct, labels] = make_phantom(spec, 0);

    const LabelMask mask = project_labels(rotate_volume(labels, 0.0));
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) {
            bool in_fp = false;
            for (int z = 0; z < 16 && !in_fp; ++z)
                in_fp = labels.at(x, y, z) == 4;
            CHECK(mask.at(x, y) == (in_fp ? 4 : 0));
        }
}

TEST_CASE("full pipeline respects a right-angle symmetry of the phantom") {
    // phantom symmetric under 180-degree rotation about y (centered cylinder)
    PhantomSpec spec;
    spec.dims = {20, 20, 20};
    spec.spacing = {1, 1, 1};
    spec.primitives.push_back({PhantomPrimitive::Shape::cylinder, {10, 10, 10}, {5, 12, 0},
                               Axis::y, 900.0f, 2});
    const auto [ct, labels] = make_phantom(spec, 0);

    ProjectionConfig config;
    config.output_width = 20;
    config.output_height = 20;
    const auto [img0, mask0] = simulate_view(ct, labels, 0.0, config);
    const auto [img180, mask180] = simulate_view(ct, labels, 180.0, config);

    // 180-degree view of this phantom equals the 0-degree view mirrored in x
    for (int y = 0; y < 20; ++y)
        for (int x = 0; x < 20; ++x)
            CHECK(std::abs(img180.at(x, y) - img0.at(19 - x, y)) < 1e-6f);
}

TEST_CASE("simulate_view is deterministic across calls") {
    const auto [ct, labels] = two_bone_phantom(12);
    ProjectionConfig config;
    config.output_width = 24;
    config.output_height = 24;
    const auto a = simulate_view(ct, labels, 30.0, config);
    const auto b = simulate_view(ct, labels, 30.0, config);
    CHECK(a.first.data() == b.first.data());
    CHECK(a.second.data() == b.second.data());
}

TEST_CASE("config validation rejects out-of-contract values") {
    ProjectionConfig bad;
    bad.tissue_low_percentile = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    ProjectionConfig swapped;
    swapped.tissue_target_percentile = 30.0;
    CHECK_THROWS_AS(swapped.validate(), ConfigError);

    ProjectionConfig tiny;
    tiny.output_width = 4;
    CHECK_THROWS_AS(tiny.validate(), ConfigError);

    ProjectionConfig empty;
    empty.view_angles.clear();
    CHECK_THROWS_AS(empty.validate(), ConfigError);
}

TEST_SUITE_END();
