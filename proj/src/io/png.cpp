#include "xraysim/io/png.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include <zlib.h>

namespace xraysim::io {

namespace {

constexpr std::uint8_t kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

std::uint32_t crc32_of(const std::uint8_t* data, std::size_t len) {
    return std::uint32_t(::crc32(0L, data, uInt(len)));
}

void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(std::uint8_t(v >> 24));
    out.push_back(std::uint8_t(v >> 16));
    out.push_back(std::uint8_t(v >> 8));
    out.push_back(std::uint8_t(v));
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::vector<std::uint8_t>& payload) {
    put_u32_be(out, std::uint32_t(payload.size()));
    std::vector<std::uint8_t> body(type, type + 4);
    body.insert(body.end(), payload.begin(), payload.end());
    out.insert(out.end(), body.begin(), body.end());
    put_u32_be(out, crc32_of(body.data(), body.size()));
}

std::vector<std::uint8_t> deflate_bytes(const std::vector<std::uint8_t>& raw) {
    // Fixed level: identical input must yield identical bytes run to run.
    uLongf bound = compressBound(uLong(raw.size()));
    std::vector<std::uint8_t> out(bound);
    if (compress2(out.data(), &bound, raw.data(), uLong(raw.size()), 6) != Z_OK)
        throw IoFailure("PNG deflate failed");
    out.resize(bound);
    return out;
}

std::vector<std::uint8_t> encode_gray(const std::uint8_t* samples, int width, int height,
                                      int bytes_per_px) {
    // Scanlines with filter 0 (None); zlib handles the entropy coding.
    const std::size_t stride = std::size_t(width) * bytes_per_px;
    std::vector<std::uint8_t> raw;
    raw.reserve((stride + 1) * height);
    for (int y = 0; y < height; ++y) {
        raw.push_back(0);
        raw.insert(raw.end(), samples + y * stride, samples + (y + 1) * stride);
    }

    std::vector<std::uint8_t> png(kSignature, kSignature + 8);
    std::vector<std::uint8_t> ihdr;
    put_u32_be(ihdr, std::uint32_t(width));
    put_u32_be(ihdr, std::uint32_t(height));
    ihdr.push_back(std::uint8_t(bytes_per_px * 8)); // bit depth
    ihdr.push_back(0);                              // color type: grayscale
    ihdr.push_back(0);                              // compression
    ihdr.push_back(0);                              // filter method
    ihdr.push_back(0);                              // no interlace
    append_chunk(png, "IHDR", ihdr);
    append_chunk(png, "IDAT", deflate_bytes(raw));
    append_chunk(png, "IEND", {});
    return png;
}

void write_file(const std::vector<std::uint8_t>& bytes, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoFailure("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out)
        throw IoFailure("short write: " + path);
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoFailure("cannot open: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

struct DecodedGray {
    int width = 0, height = 0, bit_depth = 0;
    std::vector<std::uint8_t> samples; // de-filtered, big-endian for 16 bit
};

std::uint32_t get_u32_be(const std::uint8_t* p) {
    return std::uint32_t(p[0]) << 24 | std::uint32_t(p[1]) << 16 | std::uint32_t(p[2]) << 8 |
           std::uint32_t(p[3]);
}

std::vector<std::uint8_t> inflate_bytes(const std::vector<std::uint8_t>& in,
                                        std::size_t expected) {
    std::vector<std::uint8_t> out(expected);
    uLongf out_len = uLongf(expected);
    const int rc = uncompress(out.data(), &out_len, in.data(), uLong(in.size()));
    if (rc != Z_OK || out_len != expected)
        throw MalformedHeader("PNG inflate failed or size mismatch");
    return out;
}

int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc)
        return a;
    return pb <= pc ? b : c;
}

DecodedGray decode_gray(const std::vector<std::uint8_t>& bytes, const std::string& path) {
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kSignature, 8) != 0)
        throw MalformedHeader("not a PNG file: " + path);

    DecodedGray img;
    std::vector<std::uint8_t> idat;
    std::size_t pos = 8;
    bool saw_ihdr = false, saw_iend = false;
    while (pos + 12 <= bytes.size() && !saw_iend) {
        const std::uint32_t len = get_u32_be(&bytes[pos]);
        if (pos + 12 + len > bytes.size())
            throw MalformedHeader("truncated PNG chunk: " + path);
        const char* type = reinterpret_cast<const char*>(&bytes[pos + 4]);
        const std::uint8_t* payload = &bytes[pos + 8];
        const std::uint32_t stored_crc = get_u32_be(&bytes[pos + 8 + len]);
        if (crc32_of(&bytes[pos + 4], len + 4) != stored_crc)
            throw MalformedHeader("PNG chunk CRC mismatch: " + path);

        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (len != 13)
                throw MalformedHeader("bad IHDR length: " + path);
            img.width = int(get_u32_be(payload));
            img.height = int(get_u32_be(payload + 4));
            img.bit_depth = payload[8];
            const int color_type = payload[9];
            if (color_type != 0 || (img.bit_depth != 8 && img.bit_depth != 16))
                throw UnsupportedDatatype("only 8/16-bit grayscale PNG supported: " + path);
            if (payload[12] != 0)
                throw UnsupportedDatatype("interlaced PNG not supported: " + path);
            saw_ihdr = true;
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), payload, payload + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            saw_iend = true;
        }
        // ancillary chunks are skipped
        pos += 12 + len;
    }
    if (!saw_ihdr || !saw_iend || img.width < 1 || img.height < 1)
        throw MalformedHeader("incomplete PNG: " + path);

    const int bpp = img.bit_depth / 8;
    const std::size_t stride = std::size_t(img.width) * bpp;
    const std::vector<std::uint8_t> raw = inflate_bytes(idat, (stride + 1) * img.height);

    img.samples.resize(stride * img.height);
    std::vector<std::uint8_t> prev(stride, 0);
    for (int y = 0; y < img.height; ++y) {
        const std::uint8_t filter = raw[y * (stride + 1)];
        const std::uint8_t* src = &raw[y * (stride + 1) + 1];
        std::uint8_t* dst = &img.samples[y * stride];
        for (std::size_t i = 0; i < stride; ++i) {
            const int a = i >= std::size_t(bpp) ? dst[i - bpp] : 0;
            const int b = prev[i];
            const int c = i >= std::size_t(bpp) ? prev[i - bpp] : 0;
            int v = src[i];
            switch (filter) {
                case 0: break;
                case 1: v += a; break;
                case 2: v += b; break;
                case 3: v += (a + b) / 2; break;
                case 4: v += paeth(a, b, c); break;
                default: throw MalformedHeader("unknown PNG filter: " + path);
            }
            dst[i] = std::uint8_t(v);
        }
        std::memcpy(prev.data(), dst, stride);
    }
    return img;
}

} // namespace

std::vector<std::uint8_t> encode_png_gray16(const Radiograph& img) {
    std::vector<std::uint8_t> samples(std::size_t(img.width()) * img.height() * 2);
    const auto& data = img.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double clamped = std::clamp(double(data[i]), 0.0, 1.0);
        const std::uint16_t v = std::uint16_t(std::lround(clamped * 65535.0));
        samples[2 * i] = std::uint8_t(v >> 8);
        samples[2 * i + 1] = std::uint8_t(v & 0xff);
    }
    return encode_gray(samples.data(), img.width(), img.height(), 2);
}

std::vector<std::uint8_t> encode_png_gray8(const LabelMask& mask) {
    return encode_gray(mask.data().data(), mask.width(), mask.height(), 1);
}

void save_png_gray16(const Radiograph& img, const std::string& path) {
    write_file(encode_png_gray16(img), path);
}

void save_png_gray8(const LabelMask& mask, const std::string& path) {
    write_file(encode_png_gray8(mask), path);
}

Radiograph load_png_gray16(const std::string& path, ImageStage stage) {
    const DecodedGray dec = decode_gray(read_file(path), path);
    Radiograph img(dec.width, dec.height, stage);
    auto& data = img.data();
    if (dec.bit_depth == 16) {
        for (std::size_t i = 0; i < data.size(); ++i) {
            const std::uint16_t v =
                std::uint16_t(dec.samples[2 * i]) << 8 | dec.samples[2 * i + 1];
            data[i] = float(v / 65535.0);
        }
    } else {
        for (std::size_t i = 0; i < data.size(); ++i)
            data[i] = float(dec.samples[i] / 255.0);
    }
    return img;
}

LabelMask load_png_gray8(const std::string& path) {
    const DecodedGray dec = decode_gray(read_file(path), path);
    if (dec.bit_depth != 8)
        throw UnsupportedDatatype("label masks must be 8-bit PNG: " + path);
    return LabelMask(dec.width, dec.height, dec.samples);
}

} // namespace xraysim::io
