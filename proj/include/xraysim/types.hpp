// Shared scalar/geometry types and the error hierarchy.
#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace xraysim {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    bool operator==(const Vec3&) const = default;
};

struct Dims3 {
    int nx = 0, ny = 0, nz = 0;

    int operator[](int i) const { return i == 0 ? nx : (i == 1 ? ny : nz); }
    bool operator==(const Dims3&) const = default;
    std::int64_t voxel_count() const {
        return std::int64_t(nx) * ny * nz;
    }
};

enum class Axis { x = 0, y = 1, z = 2 };

/// Bone class IDs, 0 = background. Mask values are always within [0, kNumLabels-1].
inline constexpr int kNumLabels = 11;

/// Display names for the 11 classes, index = class ID.
const std::array<std::string, kNumLabels>& label_names();

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoFailure : Error { using Error::Error; };
struct MalformedHeader : Error { using Error::Error; };
struct UnsupportedDatatype : Error { using Error::Error; };
struct UnsupportedOrientation : Error { using Error::Error; };
struct DegenerateVolume : Error { using Error::Error; };
struct SpecOutOfBounds : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct PairingMismatch : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

} // namespace xraysim
