// Depth-resolved projection of multi-label volumes to 2D masks.
#pragma once

#include <cstdint>
#include <vector>

#include "xraysim/types.hpp"
#include "xraysim/volume.hpp"

namespace xraysim {

/// 2D class-ID mask, x-fastest, values in [0, kNumLabels-1].
class LabelMask {
public:
    LabelMask() = default;
    LabelMask(int width, int height, std::uint8_t fill = 0);
    LabelMask(int width, int height, std::vector<std::uint8_t> data);

    int width() const { return w_; }
    int height() const { return h_; }
    const std::vector<std::uint8_t>& data() const { return data_; }
    std::vector<std::uint8_t>& data() { return data_; }
    std::uint8_t at(int x, int y) const { return data_[std::size_t(x) + std::size_t(w_) * std::size_t(y)]; }
    std::uint8_t& at(int x, int y) { return data_[std::size_t(x) + std::size_t(w_) * std::size_t(y)]; }

    bool operator==(const LabelMask&) const = default;

private:
    int w_ = 0, h_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Collapse a label volume along z: each pixel takes the first nonzero label
/// met when scanning the column from the viewer side. The viewer sits at
/// z = 0 by convention; from_far_side scans from z = nz-1 instead.
LabelMask project_labels(const LabelVolume& labels, bool from_far_side = false);

/// Nearest-neighbor resize with the same corner-aligned mapping the image
/// resize uses, so mask and image stay pixel-aligned.
LabelMask resize_mask(const LabelMask& mask, int width, int height);

} // namespace xraysim
