// Orthographic Beer-Lambert projection of a conditioned CT volume, followed by
// the image-domain post-processing stages (tissue reduction, min-max
// normalization, resizing) and the full per-view pipeline.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "xraysim/labelproj.hpp"
#include "xraysim/types.hpp"
#include "xraysim/volume.hpp"

namespace xraysim {

enum class ImageStage : std::uint8_t {
    raw_projection,
    tissue_reduced,
    normalized,
    resized,
};

/// 2D floating-point image, x-fastest: index = x + width*y.
class Radiograph {
public:
    Radiograph() = default;
    Radiograph(int width, int height, ImageStage stage, double px_mm = 1.0, double py_mm = 1.0)
        : w_(check(width)), h_(check(height)), stage_(stage), px_mm_(px_mm), py_mm_(py_mm),
          data_(std::size_t(width) * std::size_t(height), 0.0f) {}

    int width() const { return w_; }
    int height() const { return h_; }
    ImageStage stage() const { return stage_; }
    void set_stage(ImageStage s) { stage_ = s; }
    /// Physical pixel pitch; nominal only after the resize stage.
    double pixel_spacing_x() const { return px_mm_; }
    double pixel_spacing_y() const { return py_mm_; }

    const std::vector<float>& data() const { return data_; }
    std::vector<float>& data() { return data_; }
    float at(int x, int y) const { return data_[std::size_t(x) + std::size_t(w_) * std::size_t(y)]; }
    float& at(int x, int y) { return data_[std::size_t(x) + std::size_t(w_) * std::size_t(y)]; }

    bool operator==(const Radiograph&) const = default;

private:
    static int check(int n) {
        if (n < 1)
            throw DegenerateVolume("image dims must be >= 1");
        return n;
    }

    int w_ = 0, h_ = 0;
    ImageStage stage_ = ImageStage::raw_projection;
    double px_mm_ = 1.0, py_mm_ = 1.0;
    std::vector<float> data_;
};

struct ProjectionConfig {
    /// Fixed attenuation scale in 1/(CT-number * mm); <= 0 selects the
    /// adaptive rule alpha = adaptive_scale_c / max(ray sum), which maps ray
    /// sums onto [exp(-c), 1] and sidesteps exp underflow on raw CT numbers.
    double attenuation_scale = 0.0;
    double adaptive_scale_c = 4.0;

    double tissue_low_percentile = 20.0;
    double tissue_target_percentile = 10.0;
    double artifact_percentile = 99.0;
    /// Compute tissue-reduction percentiles on 1-I instead of I (display
    /// polarity) and invert back afterwards. Off = literal attenuation image.
    bool invert_for_tissue_reduction = false;

    /// Label overlap resolution side; see project_labels.
    bool scan_from_far_side = false;

    int output_width = 256;
    int output_height = 256;

    /// View sweep in degrees; default -70..70 step 10 (15 views, 0 = AP).
    std::vector<double> view_angles = default_view_angles();

    static std::vector<double> default_view_angles();
    void validate() const;
};

/// Beer-Lambert collapse along z: S(x,y) = sz * sum_z vol(x,y,z),
/// I(x,y) = exp(-alpha * S). Requires a clamp_air'd volume (min >= 0).
/// An all-zero volume maps to the constant image 1.
Radiograph project(const CtVolume& vol, const ProjectionConfig& config);

/// Raise everything below the low percentile to the target percentile
/// (nearest-rank over all pixels). Suppresses soft tissue so bone dominates.
Radiograph tissue_reduction(const Radiograph& img, const ProjectionConfig& config);

/// (I - min) / (max - min); a constant image maps to all zeros.
Radiograph normalize_minmax(const Radiograph& img);

/// Bilinear resize, direct (aspect-distorting), corner-aligned coordinates.
Radiograph resize(const Radiograph& img, int width, int height);

/// Full per-view pipeline: clamp_artifacts -> clamp_air -> rotate(angle) ->
/// project -> tissue_reduction -> normalize_minmax -> resize, with the label
/// volume tracking the same geometry (nearest rotate -> project_labels ->
/// resize_mask). Outputs stay pixel-aligned at every stage.
std::pair<Radiograph, LabelMask> simulate_view(const CtVolume& ct, const LabelVolume& labels,
                                               double angle_deg, const ProjectionConfig& config);

} // namespace xraysim
