#include "xraysim/labelproj.hpp"

#include <algorithm>
#include <cmath>

namespace xraysim {

namespace {

void check_mask_values(const std::vector<std::uint8_t>& data) {
    for (std::uint8_t v : data)
        if (v >= kNumLabels)
            throw Error("mask value " + std::to_string(int(v)) + " outside [0, 10]");
}

int check_dim(int n) {
    if (n < 1)
        throw DegenerateVolume("mask dims must be >= 1");
    return n;
}

} // namespace

LabelMask::LabelMask(int width, int height, std::uint8_t fill)
    : w_(check_dim(width)), h_(check_dim(height)),
      data_(std::size_t(width) * std::size_t(height), fill) {
    check_mask_values(data_);
}

LabelMask::LabelMask(int width, int height, std::vector<std::uint8_t> data)
    : w_(check_dim(width)), h_(check_dim(height)), data_(std::move(data)) {
    if (data_.size() != std::size_t(width) * std::size_t(height))
        throw DimensionMismatch("mask data length does not match dims");
    check_mask_values(data_);
}

LabelMask project_labels(const LabelVolume& labels, bool from_far_side) {
    const Dims3& d = labels.dims();
    LabelMask out(d.nx, d.ny);
    for (int y = 0; y < d.ny; ++y)
        for (int x = 0; x < d.nx; ++x) {
            std::uint8_t hit = 0;
            if (from_far_side) {
                for (int z = d.nz - 1; z >= 0; --z)
                    if (std::uint8_t v = labels.at(x, y, z); v != 0) {
                        hit = v;
                        break;
                    }
            } else {
                for (int z = 0; z < d.nz; ++z)
                    if (std::uint8_t v = labels.at(x, y, z); v != 0) {
                        hit = v;
                        break;
                    }
            }
            out.at(x, y) = hit;
        }
    return out;
}

namespace {

// Same corner-aligned mapping as the bilinear image resize, rounded to the
// nearest source pixel so class IDs are never blended.
int nearest_coord(int dst, int dst_n, int src_n) {
    if (dst_n == 1)
        return (src_n - 1) / 2;
    const double s = double(dst) * double(src_n - 1) / double(dst_n - 1);
    return std::clamp(int(std::lround(s)), 0, src_n - 1);
}

} // namespace

LabelMask resize_mask(const LabelMask& mask, int width, int height) {
    if (width < 1 || height < 1)
        throw Error("resize target must be >= 1 per axis");
    LabelMask out(width, height);
    for (int y = 0; y < height; ++y) {
        const int sy = nearest_coord(y, height, mask.height());
        for (int x = 0; x < width; ++x)
            out.at(x, y) = mask.at(nearest_coord(x, width, mask.width()), sy);
    }
    return out;
}

} // namespace xraysim
