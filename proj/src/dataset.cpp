#include "xraysim/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "xraysim/digest.hpp"
#include "xraysim/io/nifti.hpp"
#include "xraysim/io/png.hpp"
#include "xraysim/io/toml.hpp"
#include "xraysim/rng.hpp"

namespace xraysim {

namespace fs = std::filesystem;

void DatasetConfig::validate() const {
    if (volumes.empty())
        throw ConfigError("dataset config lists no volumes");
    if (output_dir.empty())
        throw ConfigError("dataset config needs an output directory");
    std::set<std::string> subjects;
    for (const VolumeEntry& v : volumes) {
        if (v.subject.empty())
            throw ConfigError("volume entry without a subject ID");
        if (!subjects.insert(v.subject).second)
            throw ConfigError("duplicate subject ID '" + v.subject + "'");
        if (v.split != "train" && v.split != "test")
            throw ConfigError("split for '" + v.subject + "' must be train or test");
    }
    projection.validate();
    augment.validate();
}

namespace {

std::string format_angle(double angle) {
    std::ostringstream ss;
    ss << (angle < 0.0 ? 'm' : 'p');
    double mag = std::abs(angle);
    if (mag == std::floor(mag)) {
        ss << std::int64_t(mag);
    } else {
        ss << mag;
    }
    std::string s = ss.str();
    std::replace(s.begin(), s.end(), '.', '_');
    return s;
}

std::string item_id(const std::string& subject, double angle, int copy) {
    return subject + "_a" + format_angle(angle) + "_c" + std::to_string(copy);
}

nlohmann::json params_json(const AugmentParams& p) {
    return nlohmann::json{{"rotation_deg", p.rotation_deg},
                          {"translate_x", p.translate_x},
                          {"translate_y", p.translate_y},
                          {"zoom", p.zoom},
                          {"hflip", p.hflip}};
}

AugmentParams params_from(const nlohmann::json& j) {
    AugmentParams p;
    p.rotation_deg = j.at("rotation_deg").get<double>();
    p.translate_x = j.at("translate_x").get<double>();
    p.translate_y = j.at("translate_y").get<double>();
    p.zoom = j.at("zoom").get<double>();
    p.hflip = j.at("hflip").get<bool>();
    return p;
}

} // namespace

std::string ManifestItem::key() const {
    std::ostringstream ss;
    ss << subject << '|' << angle_deg << '|' << copy;
    return ss.str();
}

int DatasetManifest::failed_count() const {
    int n = 0;
    for (const ManifestItem& item : items)
        n += !item.ok();
    return n;
}

std::string DatasetManifest::to_jsonl() const {
    std::ostringstream out;
    for (const ManifestItem& item : items) {
        nlohmann::json j;
        j["subject"] = item.subject;
        j["source"] = item.source;
        j["angle_deg"] = item.angle_deg;
        j["copy"] = item.copy;
        j["params"] = params_json(item.params);
        j["image"] = item.image_path;
        j["mask"] = item.mask_path;
        j["image_sha256"] = item.image_sha256;
        j["mask_sha256"] = item.mask_sha256;
        j["error"] = item.error;
        out << j.dump() << '\n';
    }
    return out.str();
}

DatasetManifest DatasetManifest::from_jsonl(const std::string& text) {
    DatasetManifest manifest;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        try {
            const auto j = nlohmann::json::parse(line);
            ManifestItem item;
            item.subject = j.at("subject").get<std::string>();
            item.source = j.value("source", std::string());
            item.angle_deg = j.at("angle_deg").get<double>();
            item.copy = j.at("copy").get<int>();
            if (j.contains("params"))
                item.params = params_from(j.at("params"));
            item.image_path = j.value("image", std::string());
            item.mask_path = j.value("mask", std::string());
            item.image_sha256 = j.value("image_sha256", std::string());
            item.mask_sha256 = j.value("mask_sha256", std::string());
            item.error = j.value("error", std::string());
            manifest.items.push_back(std::move(item));
        } catch (const nlohmann::json::exception& e) {
            throw MalformedHeader("manifest line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return manifest;
}

DatasetManifest DatasetManifest::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoFailure("cannot open manifest: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_jsonl(ss.str());
}

void DatasetManifest::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoFailure("cannot write manifest: " + path);
    out << to_jsonl();
    if (!out)
        throw IoFailure("short write: " + path);
}

namespace {

void write_legend(const fs::path& path) {
    nlohmann::json legend;
    for (int i = 0; i < kNumLabels; ++i)
        legend[std::to_string(i)] = label_names()[i];
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoFailure("cannot write legend: " + path.string());
    out << legend.dump(2) << '\n';
}

struct ItemPlan {
    int volume_index;
    int angle_index;
    int copy;
    AugmentParams params;
};

bool file_matches(const fs::path& path, const std::string& sha) {
    if (sha.empty() || !fs::exists(path))
        return false;
    try {
        return sha256_file_hex(path.string()) == sha;
    } catch (const Error&) {
        return false;
    }
}

} // namespace

DatasetManifest generate(const DatasetConfig& config) {
    config.validate();

    const fs::path out_dir(config.output_dir);
    const fs::path images_dir = out_dir / "images";
    const fs::path masks_dir = out_dir / "masks";
    fs::create_directories(images_dir);
    fs::create_directories(masks_dir);
    write_legend(out_dir / "legend.json");

    // Previously emitted rows, keyed for the resume check.
    std::map<std::string, ManifestItem> prior;
    const fs::path manifest_path = out_dir / "manifest.jsonl";
    if (config.resume && fs::exists(manifest_path)) {
        for (ManifestItem& item : DatasetManifest::load(manifest_path.string()).items)
            prior.emplace(item.key(), std::move(item));
    }

    const int n_angles = int(config.projection.view_angles.size());
    const int n_copies = config.augment.copies_per_image;
    const std::size_t total = config.volumes.size() * std::size_t(n_angles) * n_copies;
    std::vector<ManifestItem> rows(total);

    auto row_index = [&](int vi, int ai, int ci) {
        return (std::size_t(vi) * n_angles + ai) * n_copies + ci;
    };

    // One claimable unit per volume: copies share the per-angle simulation,
    // and per-item seeds make results independent of which worker runs what.
    std::atomic<std::size_t> next_volume{0};
    auto process_volume = [&](int vi) {
        const VolumeEntry& entry = config.volumes[vi];

        // Fill in the invariant fields and the deterministic params first.
        for (int ai = 0; ai < n_angles; ++ai)
            for (int ci = 0; ci < n_copies; ++ci) {
                ManifestItem& row = rows[row_index(vi, ai, ci)];
                row.subject = entry.subject;
                row.source = entry.ct_path;
                row.angle_deg = config.projection.view_angles[ai];
                row.copy = ci;
                row.params = sample_params(derive_item_seed(config.seed, entry.subject, ai, ci),
                                           config.augment);
                const std::string id = item_id(entry.subject, row.angle_deg, ci);
                row.image_path = "images/" + id + ".png";
                row.mask_path = "masks/" + id + ".png";
            }

        auto resumable = [&](const ManifestItem& row) {
            const auto it = prior.find(row.key());
            if (it == prior.end())
                return false;
            const ManifestItem& old = it->second;
            return old.ok() && old.params == row.params && old.image_path == row.image_path &&
                   old.mask_path == row.mask_path &&
                   file_matches(out_dir / old.image_path, old.image_sha256) &&
                   file_matches(out_dir / old.mask_path, old.mask_sha256);
        };

        bool all_resumed = true;
        for (int ai = 0; ai < n_angles && all_resumed; ++ai)
            for (int ci = 0; ci < n_copies; ++ci)
                if (!resumable(rows[row_index(vi, ai, ci)])) {
                    all_resumed = false;
                    break;
                }
        if (all_resumed) {
            for (int ai = 0; ai < n_angles; ++ai)
                for (int ci = 0; ci < n_copies; ++ci) {
                    ManifestItem& row = rows[row_index(vi, ai, ci)];
                    row = prior.at(row.key());
                }
            return;
        }

        CtVolume ct;
        LabelVolume labels;
        try {
            ct = io::load_ct(entry.ct_path);
            labels = io::load_labels(entry.labels_path);
            if (config.resample_mm > 0.0) {
                ct = resample_isotropic(ct, config.resample_mm);
                labels = resample_labels(labels, config.resample_mm);
            }
        } catch (const std::exception& e) {
            for (int ai = 0; ai < n_angles; ++ai)
                for (int ci = 0; ci < n_copies; ++ci)
                    rows[row_index(vi, ai, ci)].error = e.what();
            return;
        }

        for (int ai = 0; ai < n_angles; ++ai) {
            std::optional<std::pair<Radiograph, LabelMask>> view;
            for (int ci = 0; ci < n_copies; ++ci) {
                ManifestItem& row = rows[row_index(vi, ai, ci)];
                if (resumable(row)) {
                    row = prior.at(row.key());
                    continue;
                }
                try {
                    if (!view)
                        view = simulate_view(ct, labels, row.angle_deg, config.projection);
                    const auto [img, mask] = apply_augmentation(view->first, view->second, row.params);
                    const auto img_bytes = io::encode_png_gray16(img);
                    const auto mask_bytes = io::encode_png_gray8(mask);

                    auto write_bytes = [](const fs::path& path, const std::vector<std::uint8_t>& bytes) {
                        std::ofstream f(path, std::ios::binary | std::ios::trunc);
                        if (!f)
                            throw IoFailure("cannot write: " + path.string());
                        f.write(reinterpret_cast<const char*>(bytes.data()),
                                std::streamsize(bytes.size()));
                        if (!f)
                            throw IoFailure("short write: " + path.string());
                    };
                    write_bytes(out_dir / row.image_path, img_bytes);
                    write_bytes(out_dir / row.mask_path, mask_bytes);
                    row.image_sha256 = sha256_hex(img_bytes);
                    row.mask_sha256 = sha256_hex(mask_bytes);
                } catch (const std::exception& e) {
                    row.error = e.what();
                }
            }
        }
    };

    const int jobs = std::max(1, config.jobs);
    if (jobs == 1) {
        for (std::size_t vi = 0; vi < config.volumes.size(); ++vi)
            process_volume(int(vi));
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t)
            pool.emplace_back([&] {
                while (true) {
                    const std::size_t vi = next_volume.fetch_add(1);
                    if (vi >= config.volumes.size())
                        break;
                    process_volume(int(vi));
                }
            });
        for (std::thread& t : pool)
            t.join();
    }

    DatasetManifest manifest;
    manifest.items = std::move(rows);
    std::sort(manifest.items.begin(), manifest.items.end(),
              [](const ManifestItem& a, const ManifestItem& b) {
                  return std::tie(a.subject, a.angle_deg, a.copy) <
                         std::tie(b.subject, b.angle_deg, b.copy);
              });
    manifest.save(manifest_path.string());
    return manifest;
}

void export_training_layout(const DatasetManifest& manifest, const std::string& manifest_dir,
                            const std::string& out_dir) {
    if (manifest.failed_count() > 0)
        throw ConfigError("manifest has failed items; regenerate before exporting");

    const fs::path src_root(manifest_dir);
    const fs::path dst_root(out_dir);
    fs::create_directories(dst_root / "images");
    fs::create_directories(dst_root / "labels");

    for (const ManifestItem& item : manifest.items) {
        const std::string name = fs::path(item.image_path).filename().string();
        try {
            fs::copy_file(src_root / item.image_path, dst_root / "images" / name,
                          fs::copy_options::overwrite_existing);
            fs::copy_file(src_root / item.mask_path, dst_root / "labels" / name,
                          fs::copy_options::overwrite_existing);
        } catch (const fs::filesystem_error& e) {
            throw IoFailure(std::string("export failed: ") + e.what());
        }
    }

    nlohmann::json desc;
    nlohmann::json classes = nlohmann::json::array();
    for (int i = 0; i < kNumLabels; ++i)
        classes.push_back({{"id", i}, {"name", label_names()[i]}});
    desc["classes"] = classes;
    desc["num_items"] = manifest.items.size();
    desc["image_dir"] = "images";
    desc["label_dir"] = "labels";
    std::ofstream out(dst_root / "dataset.json", std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoFailure("cannot write dataset descriptor");
    out << desc.dump(2) << '\n';
}

namespace {

std::vector<double> angles_from(const toml::Table& t) {
    if (!t.has("view_angles"))
        return ProjectionConfig::default_view_angles();
    std::vector<double> angles;
    for (const toml::Value& v : t.get("view_angles").as_array())
        angles.push_back(v.as_number());
    return angles;
}

} // namespace

DatasetConfig parse_dataset_config(const std::string& toml_text) {
    const toml::Document doc = toml::parse(toml_text);
    DatasetConfig config;

    const toml::Table& output = doc.table_or_empty("output");
    config.output_dir = output.get_string("dir", "");

    const toml::Table& gen = doc.table_or_empty("generate");
    config.seed = std::uint64_t(gen.get_int("seed", 0));
    config.resample_mm = gen.get_number("resample_mm", 0.0);
    config.jobs = int(gen.get_int("jobs", 1));

    const toml::Table& proj = doc.table_or_empty("projection");
    ProjectionConfig& p = config.projection;
    p.attenuation_scale = proj.get_number("attenuation_scale", 0.0);
    p.adaptive_scale_c = proj.get_number("adaptive_scale_c", 4.0);
    p.tissue_low_percentile = proj.get_number("tissue_low_percentile", 20.0);
    p.tissue_target_percentile = proj.get_number("tissue_target_percentile", 10.0);
    p.artifact_percentile = proj.get_number("artifact_percentile", 99.0);
    p.invert_for_tissue_reduction = proj.get_bool("invert_for_tissue_reduction", false);
    p.scan_from_far_side = proj.get_bool("scan_from_far_side", false);
    if (proj.has("output_size")) {
        const toml::Array& size = proj.get("output_size").as_array();
        if (size.size() != 2)
            throw ConfigError("output_size must be [width, height]");
        p.output_width = int(size[0].as_int());
        p.output_height = int(size[1].as_int());
    }
    p.view_angles = angles_from(proj);

    const toml::Table& aug = doc.table_or_empty("augment");
    AugmentConfig& a = config.augment;
    a.copies_per_image = int(aug.get_int("copies_per_image", 7));
    a.max_rotation_deg = aug.get_number("rotation_deg", 40.0);
    a.max_translate_frac = aug.get_number("translation_frac", 0.2);
    a.max_zoom_frac = aug.get_number("zoom_frac", 0.2);
    a.enable_hflip = aug.get_bool("enable_hflip", true);

    const auto it = doc.table_arrays.find("volumes");
    if (it != doc.table_arrays.end()) {
        for (const toml::Table& t : it->second) {
            VolumeEntry entry;
            entry.subject = t.get_string("subject", "");
            entry.ct_path = t.get_string("ct", "");
            entry.labels_path = t.get_string("labels", "");
            entry.split = t.get_string("split", "train");
            config.volumes.push_back(std::move(entry));
        }
    }
    return config;
}

DatasetConfig load_dataset_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoFailure("cannot open config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    DatasetConfig config = parse_dataset_config(ss.str());

    // Relative paths in the file resolve against the config's directory;
    // paths given on the command line stay CWD-relative.
    const fs::path base = fs::path(path).parent_path();
    auto resolve = [&](std::string& p) {
        if (!p.empty() && fs::path(p).is_relative())
            p = (base / p).string();
    };
    for (VolumeEntry& v : config.volumes) {
        resolve(v.ct_path);
        resolve(v.labels_path);
    }
    resolve(config.output_dir);
    return config;
}

} // namespace xraysim
