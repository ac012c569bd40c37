#include "xraysim/augment.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "xraysim/rng.hpp"

namespace xraysim {

void AugmentConfig::validate() const {
    if (copies_per_image < 1)
        throw ConfigError("copies_per_image must be >= 1");
    if (max_rotation_deg < 0.0 || max_translate_frac < 0.0 || max_zoom_frac < 0.0)
        throw ConfigError("augmentation ranges must be non-negative");
    if (max_zoom_frac >= 1.0)
        throw ConfigError("zoom range must keep the scale factor positive");
}

AugmentParams sample_params(std::uint64_t seed, const AugmentConfig& config) {
    config.validate();
    SplitMix64 rng(seed);
    AugmentParams p;
    // Draw order is part of the reproducibility contract; do not reorder.
    p.rotation_deg = rng.next_range(-config.max_rotation_deg, config.max_rotation_deg);
    p.translate_x = rng.next_range(-config.max_translate_frac, config.max_translate_frac);
    p.translate_y = rng.next_range(-config.max_translate_frac, config.max_translate_frac);
    p.zoom = rng.next_range(1.0 - config.max_zoom_frac, 1.0 + config.max_zoom_frac);
    p.hflip = config.enable_hflip && rng.next_bool();
    return p;
}

namespace {

struct InverseAffine {
    double cx, cy;      // rotation/zoom center
    double tx_px, ty_px;
    double cos_t, sin_t;
    double inv_zoom;
    bool hflip;
    int w, h;

    // Walks the forward composition (flip -> zoom -> rotate -> translate)
    // backwards from an output pixel to its source coordinate.
    void map(double x, double y, double& sx, double& sy) const {
        x -= tx_px;
        y -= ty_px;
        double dx = x - cx, dy = y - cy;
        const double rx = cos_t * dx + sin_t * dy;
        const double ry = -sin_t * dx + cos_t * dy;
        dx = rx * inv_zoom;
        dy = ry * inv_zoom;
        sx = cx + dx;
        sy = cy + dy;
        if (hflip)
            sx = (w - 1) - sx;
    }
};

float sample_bilinear_zero(const Radiograph& img, double x, double y) {
    if (x < 0.0 || y < 0.0 || x > img.width() - 1 || y > img.height() - 1)
        return 0.0f;
    const int x0 = int(x), y0 = int(y);
    const int x1 = std::min(x0 + 1, img.width() - 1);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double fx = x - x0, fy = y - y0;
    const double top = img.at(x0, y0) * (1 - fx) + img.at(x1, y0) * fx;
    const double bot = img.at(x0, y1) * (1 - fx) + img.at(x1, y1) * fx;
    return float(top * (1 - fy) + bot * fy);
}

std::uint8_t sample_nearest_zero(const LabelMask& mask, double x, double y) {
    const int xi = int(std::lround(x));
    const int yi = int(std::lround(y));
    if (xi < 0 || yi < 0 || xi >= mask.width() || yi >= mask.height())
        return 0;
    return mask.at(xi, yi);
}

} // namespace

std::pair<Radiograph, LabelMask> apply_augmentation(const Radiograph& img, const LabelMask& mask,
                                                    const AugmentParams& params) {
    if (img.width() != mask.width() || img.height() != mask.height())
        throw DimensionMismatch("image and mask dims differ");

    const double rad = params.rotation_deg * std::acos(-1.0) / 180.0;
    const InverseAffine inv{
        (img.width() - 1) / 2.0,
        (img.height() - 1) / 2.0,
        params.translate_x * img.width(),
        params.translate_y * img.height(),
        std::cos(rad),
        std::sin(rad),
        1.0 / params.zoom,
        params.hflip,
        img.width(),
        img.height(),
    };

    Radiograph out_img(img.width(), img.height(), img.stage(), img.pixel_spacing_x(),
                       img.pixel_spacing_y());
    LabelMask out_mask(mask.width(), mask.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            double sx, sy;
            inv.map(x, y, sx, sy);
            out_img.at(x, y) = sample_bilinear_zero(img, sx, sy);
            out_mask.at(x, y) = sample_nearest_zero(mask, sx, sy);
        }
    return {std::move(out_img), std::move(out_mask)};
}

std::string params_to_json(const AugmentParams& p) {
    nlohmann::json j;
    j["rotation_deg"] = p.rotation_deg;
    j["translate_x"] = p.translate_x;
    j["translate_y"] = p.translate_y;
    j["zoom"] = p.zoom;
    j["hflip"] = p.hflip;
    return j.dump();
}

AugmentParams params_from_json(const std::string& json_text) {
    try {
        const auto j = nlohmann::json::parse(json_text);
        AugmentParams p;
        p.rotation_deg = j.at("rotation_deg").get<double>();
        p.translate_x = j.at("translate_x").get<double>();
        p.translate_y = j.at("translate_y").get<double>();
        p.zoom = j.at("zoom").get<double>();
        p.hflip = j.at("hflip").get<bool>();
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("augment params: ") + e.what());
    }
}

} // namespace xraysim
