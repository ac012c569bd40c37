// End-to-end dataset generation: (volume, angle, copy) grid -> image/mask
// PNGs plus a JSON-lines manifest, resumable and worker-count independent.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xraysim/augment.hpp"
#include "xraysim/projection.hpp"

namespace xraysim {

struct VolumeEntry {
    std::string subject;
    std::string ct_path;
    std::string labels_path;
    std::string split = "train"; // "train" | "test"
};

struct DatasetConfig {
    std::vector<VolumeEntry> volumes;
    ProjectionConfig projection;
    AugmentConfig augment;
    std::string output_dir;
    std::uint64_t seed = 0;
    /// Iso-cubic resample applied at load; <= 0 skips (volumes already iso).
    double resample_mm = 0.0;
    int jobs = 1;
    bool resume = false;

    void validate() const;
};

/// One manifest row. `checksum` fields are SHA-256 of the emitted PNG bytes.
struct ManifestItem {
    std::string subject;
    std::string source;          // ct path
    double angle_deg = 0.0;
    int copy = 0;
    AugmentParams params;
    std::string image_path;      // relative to the manifest's directory
    std::string mask_path;
    std::string image_sha256;
    std::string mask_sha256;
    std::string error;           // empty = ok

    bool ok() const { return error.empty(); }
    std::string key() const;
};

struct DatasetManifest {
    std::vector<ManifestItem> items;

    int failed_count() const;
    std::string to_jsonl() const;
    static DatasetManifest from_jsonl(const std::string& text);
    static DatasetManifest load(const std::string& path);
    void save(const std::string& path) const;
};

/// Run the full grid. Items are independent work units; per-item failures are
/// recorded on the row and generation continues. The manifest comes back
/// sorted by (subject, angle, copy) no matter how workers were scheduled, and
/// with config.resume previously emitted items whose checksums still match
/// are skipped.
DatasetManifest generate(const DatasetConfig& config);

/// Re-emit a completed manifest as a trainer-ready tree: images/ and labels/
/// with 1:1 matched names plus a JSON descriptor of the class IDs.
void export_training_layout(const DatasetManifest& manifest, const std::string& manifest_dir,
                            const std::string& out_dir);

/// Parse the TOML dataset config (see README for the schema). Relative paths
/// stay relative; the CLI resolves them against the config file's directory.
DatasetConfig parse_dataset_config(const std::string& toml_text);
DatasetConfig load_dataset_config(const std::string& path);

} // namespace xraysim
