#include "xraysim/projection.hpp"

#include <algorithm>
#include <cmath>

#include "xraysim/stats.hpp"

namespace xraysim {

std::vector<double> ProjectionConfig::default_view_angles() {
    std::vector<double> angles;
    for (int a = -70; a <= 70; a += 10)
        angles.push_back(double(a));
    return angles;
}

void ProjectionConfig::validate() const {
    auto in_open = [](double q) { return q > 0.0 && q < 100.0; };
    if (!in_open(tissue_low_percentile) || !in_open(tissue_target_percentile) ||
        !in_open(artifact_percentile))
        throw ConfigError("percentile fields must lie in (0, 100)");
    if (!(tissue_target_percentile < tissue_low_percentile))
        throw ConfigError("tissue target percentile must be below the low percentile");
    if (output_width < 8 || output_height < 8)
        throw ConfigError("output size components must be >= 8");
    if (view_angles.empty())
        throw ConfigError("view angle list must be non-empty");
}

Radiograph project(const CtVolume& vol, const ProjectionConfig& config) {
    const Dims3& d = vol.dims();
    if (d.nx < 1 || d.ny < 1 || d.nz < 1)
        throw DegenerateVolume("cannot project an empty volume");

    const Vec3 s = vol.spacing();
    Radiograph out(d.nx, d.ny, ImageStage::raw_projection, s.x, s.y);

    // Ray sums S(x,y) = sz * sum_z vol(x,y,z); rays are parallel to z, so the
    // integral is an axis-aligned column sum once rotation has been applied.
    std::vector<double> sums(std::size_t(d.nx) * d.ny, 0.0);
    for (int z = 0; z < d.nz; ++z)
        for (int y = 0; y < d.ny; ++y) {
            const std::size_t row = std::size_t(y) * d.nx;
            for (int x = 0; x < d.nx; ++x)
                sums[row + x] += vol.at(x, y, z);
        }
    for (double& v : sums)
        v *= s.z;

    double alpha = config.attenuation_scale;
    if (!(alpha > 0.0)) {
        const double max_sum = *std::max_element(sums.begin(), sums.end());
        // Adaptive scale maps ray sums onto [exp(-c), 1]; an all-air volume
        // stays at exp(0) = 1 everywhere.
        alpha = max_sum > 0.0 ? config.adaptive_scale_c / max_sum : 0.0;
    }

    auto& px = out.data();
    for (std::size_t i = 0; i < sums.size(); ++i)
        px[i] = float(std::exp(-alpha * sums[i]));
    return out;
}

Radiograph tissue_reduction(const Radiograph& img, const ProjectionConfig& config) {
    Radiograph out = img;
    auto& data = out.data();
    if (config.invert_for_tissue_reduction)
        for (float& v : data)
            v = 1.0f - v;

    const float low = percentile_nearest_rank(data, config.tissue_low_percentile);
    const float target = percentile_nearest_rank(data, config.tissue_target_percentile);
    for (float& v : data)
        if (v < low)
            v = target;

    if (config.invert_for_tissue_reduction)
        for (float& v : data)
            v = 1.0f - v;
    out.set_stage(ImageStage::tissue_reduced);
    return out;
}

Radiograph normalize_minmax(const Radiograph& img) {
    Radiograph out = img;
    auto& data = out.data();
    const auto [lo_it, hi_it] = std::minmax_element(data.begin(), data.end());
    const float lo = *lo_it, hi = *hi_it;
    if (hi == lo) {
        std::fill(data.begin(), data.end(), 0.0f);
    } else {
        // true division so the extremes land on 0 and 1 exactly
        const float range = hi - lo;
        for (float& v : data)
            v = (v - lo) / range;
    }
    out.set_stage(ImageStage::normalized);
    return out;
}

namespace {

// Corner-aligned source coordinate: endpoints map onto endpoints, identity
// resize is bitwise exact, and a linear ramp stays a ramp with the same
// endpoints under any scale.
double resize_coord(int dst, int dst_n, int src_n) {
    if (dst_n == 1)
        return (src_n - 1) / 2.0;
    return double(dst) * double(src_n - 1) / double(dst_n - 1);
}

} // namespace

Radiograph resize(const Radiograph& img, int width, int height) {
    if (width < 1 || height < 1)
        throw Error("resize target must be >= 1 per axis");
    const double nominal_x =
        img.pixel_spacing_x() * (width > 1 && img.width() > 1 ? double(img.width() - 1) / (width - 1) : 1.0);
    const double nominal_y =
        img.pixel_spacing_y() * (height > 1 && img.height() > 1 ? double(img.height() - 1) / (height - 1) : 1.0);
    Radiograph out(width, height, ImageStage::resized, nominal_x, nominal_y);
    for (int y = 0; y < height; ++y) {
        const double sy = resize_coord(y, height, img.height());
        const int y0 = int(sy);
        const int y1 = std::min(y0 + 1, img.height() - 1);
        const double fy = sy - y0;
        for (int x = 0; x < width; ++x) {
            const double sx = resize_coord(x, width, img.width());
            const int x0 = int(sx);
            const int x1 = std::min(x0 + 1, img.width() - 1);
            const double fx = sx - x0;
            const double top = img.at(x0, y0) * (1 - fx) + img.at(x1, y0) * fx;
            const double bot = img.at(x0, y1) * (1 - fx) + img.at(x1, y1) * fx;
            out.at(x, y) = float(top * (1 - fy) + bot * fy);
        }
    }
    return out;
}

std::pair<Radiograph, LabelMask> simulate_view(const CtVolume& ct, const LabelVolume& labels,
                                               double angle_deg, const ProjectionConfig& config) {
    if (ct.dims() != labels.dims())
        throw DimensionMismatch("CT and label volumes must be co-registered");
    config.validate();

    const CtVolume conditioned = clamp_air(clamp_artifacts(ct, config.artifact_percentile));
    const CtVolume rotated = rotate_volume(conditioned, angle_deg);
    Radiograph img = project(rotated, config);
    img = tissue_reduction(img, config);
    img = normalize_minmax(img);
    img = resize(img, config.output_width, config.output_height);

    const LabelVolume rotated_labels = rotate_volume(labels, angle_deg);
    LabelMask mask = project_labels(rotated_labels, config.scan_from_far_side);
    mask = resize_mask(mask, config.output_width, config.output_height);
    return {std::move(img), std::move(mask)};
}

} // namespace xraysim
