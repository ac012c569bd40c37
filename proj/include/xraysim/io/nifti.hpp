// Minimal NIfTI-1 reader: single-file .nii or .hdr/.img pairs, int16/uint8/
// float32, orthogonal orientations only. Read-only by design; the raw+json
// sidecar format is the canonical fixture format.
#pragma once

#include <string>

#include "xraysim/volume.hpp"

namespace xraysim::io {

/// Honors dim, pixdim, datatype and scl_slope/scl_inter (slope 0 = unscaled).
/// Throws MalformedHeader / UnsupportedDatatype / UnsupportedOrientation /
/// IoFailure per the usual contract.
CtVolume load_ct_nifti(const std::string& path);

/// Same reader; voxel values must already be integer class IDs in range.
LabelVolume load_labels_nifti(const std::string& path);

/// Route by extension: ".json" -> raw+json, ".nii"/".hdr" -> NIfTI-1.
CtVolume load_ct(const std::string& path);
LabelVolume load_labels(const std::string& path);

} // namespace xraysim::io
