#include "xraysim/io/raw_json.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace xraysim::io {

namespace {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little,
              "raw payloads are little-endian; big-endian hosts need swapping");

struct Sidecar {
    Dims3 dims;
    Vec3 spacing;
    std::string dtype;
    fs::path data_file;
};

Sidecar read_sidecar(const std::string& json_path) {
    std::ifstream in(json_path, std::ios::binary);
    if (!in)
        throw IoFailure("cannot open sidecar: " + json_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedHeader(json_path + ": " + e.what());
    }
    try {
        Sidecar sc;
        const auto& dims = j.at("dims");
        sc.dims = {dims.at(0).get<int>(), dims.at(1).get<int>(), dims.at(2).get<int>()};
        const auto& sp = j.at("spacing_mm");
        sc.spacing = {sp.at(0).get<double>(), sp.at(1).get<double>(), sp.at(2).get<double>()};
        sc.dtype = j.at("dtype").get<std::string>();
        if (j.value("order", "x-fastest") != "x-fastest")
            throw UnsupportedDatatype(json_path + ": only x-fastest order supported");
        sc.data_file = fs::path(json_path).parent_path() / j.at("data_file").get<std::string>();
        return sc;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedHeader(json_path + ": " + e.what());
    }
}

std::vector<std::uint8_t> read_payload(const fs::path& path, std::size_t expected_bytes) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoFailure("cannot open payload: " + path.string());
    in.seekg(0, std::ios::end);
    const auto actual = std::size_t(in.tellg());
    if (actual != expected_bytes)
        throw MalformedHeader(path.string() + ": payload is " + std::to_string(actual) +
                              " bytes, header declares " + std::to_string(expected_bytes));
    in.seekg(0);
    std::vector<std::uint8_t> bytes(expected_bytes);
    in.read(reinterpret_cast<char*>(bytes.data()), std::streamsize(expected_bytes));
    if (!in)
        throw IoFailure("short read: " + path.string());
    return bytes;
}

std::size_t dtype_size(const std::string& dtype, const std::string& where) {
    if (dtype == "f32") return 4;
    if (dtype == "i16") return 2;
    if (dtype == "u8") return 1;
    throw UnsupportedDatatype(where + ": dtype '" + dtype + "' (want f32|i16|u8)");
}

} // namespace

CtVolume load_ct_raw_json(const std::string& json_path) {
    const Sidecar sc = read_sidecar(json_path);
    const std::size_t n = std::size_t(sc.dims.voxel_count());
    const auto bytes = read_payload(sc.data_file, n * dtype_size(sc.dtype, json_path));

    std::vector<float> data(n);
    if (sc.dtype == "f32") {
        std::memcpy(data.data(), bytes.data(), bytes.size());
    } else if (sc.dtype == "i16") {
        for (std::size_t i = 0; i < n; ++i) {
            std::int16_t v;
            std::memcpy(&v, bytes.data() + 2 * i, 2);
            data[i] = float(v);
        }
    } else { // u8
        for (std::size_t i = 0; i < n; ++i)
            data[i] = float(bytes[i]);
    }
    return CtVolume(sc.dims, sc.spacing, std::move(data));
}

LabelVolume load_labels_raw_json(const std::string& json_path) {
    const Sidecar sc = read_sidecar(json_path);
    if (sc.dtype != "u8")
        throw UnsupportedDatatype(json_path + ": label volumes must be u8");
    const std::size_t n = std::size_t(sc.dims.voxel_count());
    auto bytes = read_payload(sc.data_file, n);
    return LabelVolume(sc.dims, sc.spacing, std::move(bytes));
}

namespace {

void write_sidecar_and_payload(const std::string& base_path, Dims3 dims, Vec3 spacing,
                               const char* dtype, const void* payload, std::size_t bytes) {
    const fs::path base(base_path);
    const fs::path raw_path = fs::path(base_path + ".raw");

    nlohmann::json j;
    j["dims"] = {dims.nx, dims.ny, dims.nz};
    j["spacing_mm"] = {spacing.x, spacing.y, spacing.z};
    j["dtype"] = dtype;
    j["data_file"] = raw_path.filename().string();
    j["order"] = "x-fastest";

    std::ofstream sidecar(base_path + ".json", std::ios::binary | std::ios::trunc);
    if (!sidecar)
        throw IoFailure("cannot write sidecar: " + base_path + ".json");
    sidecar << j.dump(2) << '\n';

    std::ofstream raw(raw_path, std::ios::binary | std::ios::trunc);
    if (!raw)
        throw IoFailure("cannot write payload: " + raw_path.string());
    raw.write(static_cast<const char*>(payload), std::streamsize(bytes));
    if (!raw)
        throw IoFailure("short write: " + raw_path.string());
}

} // namespace

void save_raw_json(const CtVolume& vol, const std::string& base_path) {
    write_sidecar_and_payload(base_path, vol.dims(), vol.spacing(), "f32", vol.data().data(),
                              vol.data().size() * sizeof(float));
}

void save_raw_json(const LabelVolume& vol, const std::string& base_path) {
    write_sidecar_and_payload(base_path, vol.dims(), vol.spacing(), "u8", vol.data().data(),
                              vol.data().size());
}

} // namespace xraysim::io
