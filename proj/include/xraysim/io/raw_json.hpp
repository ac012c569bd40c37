// raw+json volume fixtures: a .json sidecar describing dims/spacing/dtype and
// a little-endian .raw voxel payload, x-fastest.
#pragma once

#include <string>

#include "xraysim/volume.hpp"

namespace xraysim::io {

CtVolume load_ct_raw_json(const std::string& json_path);
LabelVolume load_labels_raw_json(const std::string& json_path);

/// Writes <base>.json and <base>.raw (dtype f32 for CT, u8 for labels).
void save_raw_json(const CtVolume& vol, const std::string& base_path);
void save_raw_json(const LabelVolume& vol, const std::string& base_path);

} // namespace xraysim::io
