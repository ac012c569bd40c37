// 3D CT and label grids plus the volume-domain operations: resampling,
// rotation, intensity conditioning, and synthetic phantom construction.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xraysim/types.hpp"

namespace xraysim {

/// Regular 3D grid, x-fastest storage: index = x + nx*(y + ny*z).
/// Axis convention: x radial-ulnar, y proximal-distal (long axis of the
/// forearm), z dorsal-volar (the projection ray direction).
/// Physical voxel centers sit at (i + 0.5) * spacing per axis, with the
/// volume's origin corner at 0.
template <typename T>
class Grid3 {
public:
    Grid3() = default;
    Grid3(Dims3 dims, Vec3 spacing, T fill = T{})
        : dims_(dims), spacing_(spacing),
          data_(std::size_t(validate(dims, spacing).voxel_count()), fill) {}
    Grid3(Dims3 dims, Vec3 spacing, std::vector<T> data)
        : dims_(dims), spacing_(spacing), data_(std::move(data)) {
        validate(dims, spacing);
        if (std::int64_t(data_.size()) != dims.voxel_count())
            throw DimensionMismatch("grid data length does not match dims");
    }

    const Dims3& dims() const { return dims_; }
    const Vec3& spacing() const { return spacing_; }
    const std::vector<T>& data() const { return data_; }
    std::vector<T>& data() { return data_; }

    std::size_t index(int x, int y, int z) const {
        return std::size_t(x) + std::size_t(dims_.nx) * (std::size_t(y) + std::size_t(dims_.ny) * std::size_t(z));
    }
    T at(int x, int y, int z) const { return data_[index(x, y, z)]; }
    T& at(int x, int y, int z) { return data_[index(x, y, z)]; }

    /// Physical edge length per axis, dims * spacing.
    Vec3 extent() const {
        return {dims_.nx * spacing_.x, dims_.ny * spacing_.y, dims_.nz * spacing_.z};
    }

    bool operator==(const Grid3&) const = default;

private:
    static Dims3 validate(Dims3 d, Vec3 s) {
        if (d.nx < 1 || d.ny < 1 || d.nz < 1)
            throw DegenerateVolume("grid dims must be >= 1");
        if (!(s.x > 0.0) || !(s.y > 0.0) || !(s.z > 0.0))
            throw DegenerateVolume("grid spacing must be > 0");
        return d;
    }

    Dims3 dims_{};
    Vec3 spacing_{1, 1, 1};
    std::vector<T> data_;
};

using CtVolume = Grid3<float>;

/// Label grid; every value must stay in [0, kNumLabels-1].
class LabelVolume : public Grid3<std::uint8_t> {
public:
    LabelVolume() = default;
    LabelVolume(Dims3 dims, Vec3 spacing, std::uint8_t fill = 0)
        : Grid3(dims, spacing, fill) { check_labels(); }
    LabelVolume(Dims3 dims, Vec3 spacing, std::vector<std::uint8_t> data)
        : Grid3(dims, spacing, std::move(data)) { check_labels(); }

private:
    void check_labels() const;
};

// ---- intensity conditioning ------------------------------------------------

/// Clamp negative (air) CT values to 0. Idempotent.
CtVolume clamp_air(const CtVolume& vol);

/// Clamp everything above the nearest-rank percentile (default 99th) of the
/// whole volume; tames metal artifacts before projection.
CtVolume clamp_artifacts(const CtVolume& vol, double percentile = 99.0);

// ---- resampling ------------------------------------------------------------

/// Trilinear resample onto an iso-cubic grid anchored at the origin corner.
/// Output dims = ceil(physical extent / target) per axis; samples past the
/// last voxel center clamp to the edge.
CtVolume resample_isotropic(const CtVolume& vol, double target_mm = 0.5);

/// Nearest-neighbor resample for class IDs; never invents labels.
LabelVolume resample_labels(const LabelVolume& vol, double target_mm);

// ---- rotation ----------------------------------------------------------------

/// Rotate about the given axis (default y, the forearm long axis, so 0 deg is
/// the AP view) and resample onto the input grid. Points falling outside the
/// rotated source box are filled with 0. Exact index permutations handle
/// multiples of 90 deg: always for 0/180, and for 90/270 whenever the in-plane
/// dims and spacing are square.
CtVolume rotate_volume(const CtVolume& vol, double angle_deg, Axis axis = Axis::y);
LabelVolume rotate_volume(const LabelVolume& vol, double angle_deg, Axis axis = Axis::y);

// ---- phantoms ----------------------------------------------------------------

/// Synthetic test volume description. No clinical data ships with the repo;
/// phantoms stand in for CT subjects everywhere a test needs one.
struct PhantomPrimitive {
    enum class Shape { box, sphere, cylinder };
    Shape shape = Shape::box;
    Vec3 center_mm{};
    /// box: full edge lengths; sphere: [radius,-,-]; cylinder: [radius, length,-].
    Vec3 size_mm{};
    Axis cyl_axis = Axis::y;
    float intensity = 0.0f;
    int label = 0;
};

struct PhantomSpec {
    Dims3 dims{};
    Vec3 spacing{1, 1, 1};
    std::vector<PhantomPrimitive> primitives;
    /// Gaussian sigma added to CT intensities (never labels); 0 = exact.
    double noise_sigma = 0.0;
};

/// Rasterize the spec; later primitives overwrite earlier ones on overlap.
/// Deterministic for a given (spec, seed).
std::pair<CtVolume, LabelVolume> make_phantom(const PhantomSpec& spec, std::uint64_t seed);

PhantomSpec parse_phantom_spec(const std::string& json_text);
PhantomSpec load_phantom_spec(const std::string& path);

} // namespace xraysim
