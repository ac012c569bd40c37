// JSONL manifest pairing for evaluation runs.
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "xraysim/io/png.hpp"
#include "xraysim/metrics.hpp"

namespace xraysim {

namespace {

namespace fs = std::filesystem;

struct ManifestRow {
    std::string subject;
    double angle_deg = 0.0;
    int copy = 0;
    std::string mask_path;
};

using Key = std::tuple<std::string, double, int>;

std::map<Key, ManifestRow> read_rows(const std::string& path, bool skip_failed) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoFailure("cannot open manifest: " + path);
    std::map<Key, ManifestRow> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
            if (skip_failed && !j.value("error", std::string()).empty())
                continue;
            ManifestRow row;
            row.subject = j.at("subject").get<std::string>();
            row.angle_deg = j.at("angle_deg").get<double>();
            row.copy = j.at("copy").get<int>();
            row.mask_path = j.at("mask").get<std::string>();
            Key key{row.subject, row.angle_deg, row.copy};
            if (!rows.emplace(key, std::move(row)).second)
                throw PairingMismatch("duplicate item key in " + path + " line " +
                                      std::to_string(line_no));
        } catch (const nlohmann::json::exception& e) {
            throw MalformedHeader(path + " line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return rows;
}

std::string resolve(const std::string& manifest_path, const std::string& rel) {
    fs::path p(rel);
    if (p.is_absolute())
        return rel;
    return (fs::path(manifest_path).parent_path() / p).string();
}

} // namespace

MetricsReport evaluate_manifests(const std::string& pred_manifest_path,
                                 const std::string& gt_manifest_path,
                                 std::optional<double> spacing_mm) {
    const auto gt_rows = read_rows(gt_manifest_path, /*skip_failed=*/true);
    const auto pred_rows = read_rows(pred_manifest_path, /*skip_failed=*/false);

    if (gt_rows.size() != pred_rows.size())
        throw PairingMismatch("manifests differ in item count: gt " +
                              std::to_string(gt_rows.size()) + " vs pred " +
                              std::to_string(pred_rows.size()));

    std::vector<EvalItem> items;
    items.reserve(gt_rows.size());
    for (const auto& [key, gt_row] : gt_rows) {
        const auto it = pred_rows.find(key);
        if (it == pred_rows.end()) {
            std::ostringstream msg;
            msg << "no prediction for item subject=" << gt_row.subject
                << " angle=" << gt_row.angle_deg << " copy=" << gt_row.copy;
            throw PairingMismatch(msg.str());
        }
        EvalItem item;
        item.subject = gt_row.subject;
        item.angle_deg = gt_row.angle_deg;
        item.copy = gt_row.copy;
        item.gt = io::load_png_gray8(resolve(gt_manifest_path, gt_row.mask_path));
        item.pred = io::load_png_gray8(resolve(pred_manifest_path, it->second.mask_path));
        items.push_back(std::move(item));
    }
    return evaluate(items, spacing_mm);
}

std::string MetricsReport::to_json() const {
    nlohmann::json j;
    j["bins"] = bins;
    j["items_per_bin"] = items_per_bin;
    j["asd_unit"] = asd_unit;
    nlohmann::json dice_obj, asd_obj;
    for (int label = 1; label < kNumLabels; ++label) {
        dice_obj[label_names()[label]] = dice_mean[label];
        nlohmann::json row = nlohmann::json::array();
        for (const auto& v : asd_mean[label])
            row.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
        asd_obj[label_names()[label]] = row;
    }
    dice_obj["Average"] = dice_average_row();
    nlohmann::json avg_row = nlohmann::json::array();
    for (const auto& v : asd_average_row())
        avg_row.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
    asd_obj["Average"] = avg_row;
    j["dice"] = dice_obj;
    j["asd"] = asd_obj;
    return j.dump(2);
}

} // namespace xraysim
