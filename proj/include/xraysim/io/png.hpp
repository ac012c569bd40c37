// Grayscale PNG encode/decode, the only pixel formats this pipeline emits:
// 16-bit for radiographs (value = round(65535 * I)), 8-bit for label masks
// (raw class IDs). zlib does the DEFLATE work; fixed filter choice and
// compression level keep the byte streams run-to-run deterministic.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xraysim/labelproj.hpp"
#include "xraysim/projection.hpp"

namespace xraysim::io {

std::vector<std::uint8_t> encode_png_gray16(const Radiograph& img);
std::vector<std::uint8_t> encode_png_gray8(const LabelMask& mask);

void save_png_gray16(const Radiograph& img, const std::string& path);
void save_png_gray8(const LabelMask& mask, const std::string& path);

/// Decodes non-interlaced grayscale PNG, bit depth 16 (values mapped back to
/// [0,1]) or 8. `stage` tags the result; files carry no stage metadata.
Radiograph load_png_gray16(const std::string& path, ImageStage stage = ImageStage::resized);
LabelMask load_png_gray8(const std::string& path);

} // namespace xraysim::io
