// Independent test oracles. Everything here recomputes expected values from
// first principles (plain loops, full sorts, all-pairs scans) and must stay
// decoupled from the library's implementation paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "xraysim/labelproj.hpp"
#include "xraysim/projection.hpp"
#include "xraysim/volume.hpp"

namespace oracle {

// Nearest-rank percentile by full sort: value at 1-indexed rank ceil(q*n/100).
template <typename T>
T percentile(std::vector<T> values, double q) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    auto rank = std::size_t(std::ceil(q * double(n) / 100.0 - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return values[rank - 1];
}

// Per-pixel Beer-Lambert: independent column sum then exponentiate.
inline std::vector<double> project(const xraysim::CtVolume& vol, double alpha) {
    const auto& d = vol.dims();
    std::vector<double> img(std::size_t(d.nx) * d.ny);
    for (int y = 0; y < d.ny; ++y)
        for (int x = 0; x < d.nx; ++x) {
            double s = 0.0;
            for (int z = 0; z < d.nz; ++z)
                s += vol.at(x, y, z);
            img[std::size_t(y) * d.nx + x] = std::exp(-alpha * s * vol.spacing().z);
        }
    return img;
}

// First nonzero label along each column, scanning from the viewer side.
inline std::vector<std::uint8_t> project_labels(const xraysim::LabelVolume& labels,
                                                bool from_far_side) {
    const auto& d = labels.dims();
    std::vector<std::uint8_t> mask(std::size_t(d.nx) * d.ny, 0);
    for (int y = 0; y < d.ny; ++y)
        for (int x = 0; x < d.nx; ++x) {
            for (int i = 0; i < d.nz; ++i) {
                const int z = from_far_side ? d.nz - 1 - i : i;
                if (const std::uint8_t v = labels.at(x, y, z); v != 0) {
                    mask[std::size_t(y) * d.nx + x] = v;
                    break;
                }
            }
        }
    return mask;
}

// Right-handed quarter turn about +y: +90 deg sends the z axis toward x,
// so out(x, y, z) = in(n-1-z, y, x) on an n x ny x n grid.
template <typename G>
G rotate90_about_y(const G& vol) {
    const auto& d = vol.dims();
    G out(d, vol.spacing());
    for (int z = 0; z < d.nz; ++z)
        for (int y = 0; y < d.ny; ++y)
            for (int x = 0; x < d.nx; ++x)
                out.at(x, y, z) = vol.at(d.nx - 1 - z, y, x);
    return out;
}

// Boundary per the 4-connectivity definition; out-of-image is non-foreground.
inline std::vector<std::pair<int, int>> boundary_pixels(const xraysim::LabelMask& mask,
                                                        int label) {
    std::vector<std::pair<int, int>> pts;
    const int w = mask.width(), h = mask.height();
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (mask.at(x, y) != label)
                continue;
            const bool edge = x == 0 || x == w - 1 || y == 0 || y == h - 1 ||
                              mask.at(x - 1, y) != label || mask.at(x + 1, y) != label ||
                              mask.at(x, y - 1) != label || mask.at(x, y + 1) != label;
            if (edge)
                pts.emplace_back(x, y);
        }
    return pts;
}

// Symmetric ASD by all-pairs nearest-boundary search.
inline std::optional<double> asd(const xraysim::LabelMask& pred, const xraysim::LabelMask& gt,
                                 int label) {
    bool pred_has = false, gt_has = false;
    for (auto v : pred.data()) pred_has |= v == label;
    for (auto v : gt.data()) gt_has |= v == label;
    if (!pred_has || !gt_has)
        return std::nullopt;

    const auto bp = boundary_pixels(pred, label);
    const auto bg = boundary_pixels(gt, label);
    auto directed = [](const auto& from, const auto& to) {
        double sum = 0.0;
        for (const auto& [fx, fy] : from) {
            double best = 1e300;
            for (const auto& [tx, ty] : to) {
                const double dx = fx - tx, dy = fy - ty;
                best = std::min(best, dx * dx + dy * dy);
            }
            sum += std::sqrt(best);
        }
        return sum / double(from.size());
    };
    return 0.5 * (directed(bp, bg) + directed(bg, bp));
}

inline double dice(const xraysim::LabelMask& pred, const xraysim::LabelMask& gt, int label) {
    std::int64_t p = 0, g = 0, both = 0;
    for (std::size_t i = 0; i < pred.data().size(); ++i) {
        const bool in_p = pred.data()[i] == label;
        const bool in_g = gt.data()[i] == label;
        p += in_p;
        g += in_g;
        both += in_p && in_g;
    }
    if (p == 0 && g == 0) return 1.0;
    if (p == 0 || g == 0) return 0.0;
    return 2.0 * double(both) / double(p + g);
}

} // namespace oracle
