// Randomized 2D affine augmentation of (image, mask) pairs with reproducible
// parameter sampling.
#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "xraysim/labelproj.hpp"
#include "xraysim/projection.hpp"

namespace xraysim {

struct AugmentParams {
    double rotation_deg = 0.0;   // [-40, 40]
    double translate_x = 0.0;    // fraction of width, [-0.2, 0.2]
    double translate_y = 0.0;    // fraction of height, [-0.2, 0.2]
    double zoom = 1.0;           // [0.8, 1.2]
    bool hflip = false;

    bool is_identity() const {
        return rotation_deg == 0.0 && translate_x == 0.0 && translate_y == 0.0 &&
               zoom == 1.0 && !hflip;
    }
    bool operator==(const AugmentParams&) const = default;
};

struct AugmentConfig {
    int copies_per_image = 7;
    double max_rotation_deg = 40.0;
    double max_translate_frac = 0.2;
    double max_zoom_frac = 0.2;
    bool enable_hflip = true;

    void validate() const;
};

/// Draw parameters uniformly and independently from the configured ranges;
/// hflip with probability 0.5. Pure function of (seed, config).
AugmentParams sample_params(std::uint64_t seed, const AugmentConfig& config);

/// One affine transform composed as flip -> zoom about center -> rotate about
/// center -> translate; identical geometry for both outputs. Image resamples
/// bilinearly, mask nearest-neighbor, both with 0 fill.
std::pair<Radiograph, LabelMask> apply_augmentation(const Radiograph& img, const LabelMask& mask,
                                                    const AugmentParams& params);

std::string params_to_json(const AugmentParams& p);
AugmentParams params_from_json(const std::string& json_text);

} // namespace xraysim
