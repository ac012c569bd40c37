#include "xraysim/io/nifti.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "xraysim/io/raw_json.hpp"

namespace xraysim::io {

namespace {

namespace fs = std::filesystem;

constexpr int kHeaderSize = 348;
constexpr std::int16_t kDtUint8 = 2;
constexpr std::int16_t kDtInt16 = 4;
constexpr std::int16_t kDtFloat32 = 16;

template <typename T>
T swap_bytes(T v) {
    auto bytes = std::bit_cast<std::array<std::uint8_t, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
}

struct Header {
    std::int16_t dim[8];
    std::int16_t datatype;
    std::int16_t bitpix;
    float pixdim[8];
    float vox_offset;
    float scl_slope;
    float scl_inter;
    std::int16_t qform_code;
    std::int16_t sform_code;
    float quatern[3]; // b, c, d
    float srow[3][4];
    char magic[4];
    bool swapped;
};

template <typename T>
T read_at(const std::vector<std::uint8_t>& buf, std::size_t offset, bool swap) {
    T v;
    std::memcpy(&v, buf.data() + offset, sizeof(T));
    return swap ? swap_bytes(v) : v;
}

Header parse_header(const std::vector<std::uint8_t>& buf, const std::string& path) {
    if (buf.size() < kHeaderSize)
        throw MalformedHeader(path + ": file shorter than a NIfTI-1 header");

    std::int32_t sizeof_hdr = read_at<std::int32_t>(buf, 0, false);
    bool swap = false;
    if (sizeof_hdr != kHeaderSize) {
        if (swap_bytes(sizeof_hdr) != kHeaderSize)
            throw MalformedHeader(path + ": sizeof_hdr is not 348 in either byte order");
        swap = true;
    }

    Header h{};
    h.swapped = swap;
    for (int i = 0; i < 8; ++i) {
        h.dim[i] = read_at<std::int16_t>(buf, 40 + 2 * i, swap);
        h.pixdim[i] = read_at<float>(buf, 76 + 4 * i, swap);
    }
    h.datatype = read_at<std::int16_t>(buf, 70, swap);
    h.bitpix = read_at<std::int16_t>(buf, 72, swap);
    h.vox_offset = read_at<float>(buf, 108, swap);
    h.scl_slope = read_at<float>(buf, 112, swap);
    h.scl_inter = read_at<float>(buf, 116, swap);
    h.qform_code = read_at<std::int16_t>(buf, 252, swap);
    h.sform_code = read_at<std::int16_t>(buf, 254, swap);
    for (int i = 0; i < 3; ++i)
        h.quatern[i] = read_at<float>(buf, 256 + 4 * i, swap);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c)
            h.srow[r][c] = read_at<float>(buf, 280 + 16 * r + 4 * c, swap);
    std::memcpy(h.magic, buf.data() + 344, 4);
    return h;
}

bool row_is_axis_aligned(const float row[4]) {
    // Exactly one of the first three entries may be (relatively) nonzero.
    double mag[3] = {std::abs(row[0]), std::abs(row[1]), std::abs(row[2])};
    const double largest = std::max({mag[0], mag[1], mag[2]});
    if (largest == 0.0)
        return false;
    int significant = 0;
    for (double m : mag)
        if (m > 1e-3 * largest)
            ++significant;
    return significant == 1;
}

void check_orientation(const Header& h, const std::string& path) {
    if (h.sform_code > 0) {
        for (int r = 0; r < 3; ++r)
            if (!row_is_axis_aligned(h.srow[r]))
                throw UnsupportedOrientation(path + ": oblique sform orientation");
        return;
    }
    if (h.qform_code > 0) {
        const double b = h.quatern[0], c = h.quatern[1], d = h.quatern[2];
        const double aa = 1.0 - (b * b + c * c + d * d);
        const double a = aa > 0.0 ? std::sqrt(aa) : 0.0;
        const double rot[3][3] = {
            {a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)},
            {2 * (b * c + a * d), a * a + c * c - b * b - d * d, 2 * (c * d - a * b)},
            {2 * (b * d - a * c), 2 * (c * d + a * b), a * a + d * d - b * b - c * c},
        };
        for (int r = 0; r < 3; ++r) {
            const float row[4] = {float(rot[r][0]), float(rot[r][1]), float(rot[r][2]), 0.0f};
            if (!row_is_axis_aligned(row))
                throw UnsupportedOrientation(path + ": oblique qform orientation");
        }
    }
    // both codes 0: ANALYZE-style, pixdim alone carries the geometry
}

struct NiftiData {
    Dims3 dims;
    Vec3 spacing;
    std::vector<float> values;
};

NiftiData load_nifti(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoFailure("cannot open: " + path);
    std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
    const Header h = parse_header(buf, path);

    const bool single_file = std::memcmp(h.magic, "n+1", 4) == 0;
    if (!single_file && std::memcmp(h.magic, "ni1", 4) != 0)
        throw MalformedHeader(path + ": bad magic (want n+1 or ni1)");

    if (h.dim[0] < 3 || h.dim[0] > 7)
        throw MalformedHeader(path + ": dim[0] out of range");
    for (int i = 4; i <= h.dim[0]; ++i)
        if (h.dim[i] > 1)
            throw UnsupportedDatatype(path + ": >3D volumes not supported");
    const Dims3 dims{h.dim[1], h.dim[2], h.dim[3]};
    if (dims.nx < 1 || dims.ny < 1 || dims.nz < 1)
        throw MalformedHeader(path + ": non-positive dims");
    const Vec3 spacing{h.pixdim[1], h.pixdim[2], h.pixdim[3]};
    if (!(spacing.x > 0.0f) || !(spacing.y > 0.0f) || !(spacing.z > 0.0f))
        throw MalformedHeader(path + ": non-positive pixdim");

    std::size_t bytes_per_voxel;
    switch (h.datatype) {
        case kDtUint8: bytes_per_voxel = 1; break;
        case kDtInt16: bytes_per_voxel = 2; break;
        case kDtFloat32: bytes_per_voxel = 4; break;
        default:
            throw UnsupportedDatatype(path + ": datatype " + std::to_string(h.datatype) +
                                      " (want uint8/int16/float32)");
    }
    if (h.bitpix != std::int16_t(bytes_per_voxel * 8))
        throw MalformedHeader(path + ": bitpix disagrees with datatype");

    check_orientation(h, path);

    const std::size_t n = std::size_t(dims.voxel_count());
    const std::size_t payload_bytes = n * bytes_per_voxel;

    std::vector<std::uint8_t> payload;
    if (single_file) {
        const auto offset = std::size_t(h.vox_offset);
        if (offset < kHeaderSize || buf.size() < offset + payload_bytes)
            throw MalformedHeader(path + ": payload truncated (" +
                                  std::to_string(buf.size()) + " bytes, need " +
                                  std::to_string(offset + payload_bytes) + ")");
        payload.assign(buf.begin() + offset, buf.begin() + offset + payload_bytes);
    } else {
        const fs::path img_path = fs::path(path).replace_extension(".img");
        std::ifstream img(img_path, std::ios::binary);
        if (!img)
            throw IoFailure("cannot open: " + img_path.string());
        payload.assign((std::istreambuf_iterator<char>(img)), std::istreambuf_iterator<char>());
        const auto offset = std::size_t(std::max(0.0f, h.vox_offset));
        if (payload.size() < offset + payload_bytes)
            throw MalformedHeader(img_path.string() + ": payload truncated");
        payload.erase(payload.begin(), payload.begin() + offset);
    }

    NiftiData out;
    out.dims = dims;
    out.spacing = spacing;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        float v;
        if (h.datatype == kDtUint8) {
            v = float(payload[i]);
        } else if (h.datatype == kDtInt16) {
            auto raw = read_at<std::int16_t>(payload, 2 * i, h.swapped);
            v = float(raw);
        } else {
            v = read_at<float>(payload, 4 * i, h.swapped);
        }
        // slope 0 means "no scaling stored" per the format
        if (h.scl_slope != 0.0f)
            v = v * h.scl_slope + h.scl_inter;
        out.values[i] = v;
    }
    return out;
}

} // namespace

CtVolume load_ct_nifti(const std::string& path) {
    NiftiData d = load_nifti(path);
    return CtVolume(d.dims, d.spacing, std::move(d.values));
}

LabelVolume load_labels_nifti(const std::string& path) {
    const NiftiData d = load_nifti(path);
    std::vector<std::uint8_t> labels(d.values.size());
    for (std::size_t i = 0; i < d.values.size(); ++i) {
        const float v = d.values[i];
        if (v != std::floor(v) || v < 0.0f || v >= float(kNumLabels))
            throw UnsupportedDatatype(path + ": label volume has non class-ID value " +
                                      std::to_string(v));
        labels[i] = std::uint8_t(v);
    }
    return LabelVolume(d.dims, d.spacing, std::move(labels));
}

namespace {

bool has_extension(const std::string& path, const char* ext) {
    const std::string e = fs::path(path).extension().string();
    std::string lower(e);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    return lower == ext;
}

} // namespace

CtVolume load_ct(const std::string& path) {
    if (has_extension(path, ".json"))
        return load_ct_raw_json(path);
    if (has_extension(path, ".nii") || has_extension(path, ".hdr"))
        return load_ct_nifti(path);
    throw UnsupportedDatatype("unrecognized volume format (want .json, .nii or .hdr): " + path);
}

LabelVolume load_labels(const std::string& path) {
    if (has_extension(path, ".json"))
        return load_labels_raw_json(path);
    if (has_extension(path, ".nii") || has_extension(path, ".hdr"))
        return load_labels_nifti(path);
    throw UnsupportedDatatype("unrecognized volume format (want .json, .nii or .hdr): " + path);
}

} // namespace xraysim::io
