// xraysim CLI: phantom | simulate | augment | generate | evaluate | export.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "xraysim/dataset.hpp"
#include "xraysim/digest.hpp"
#include "xraysim/io/nifti.hpp"
#include "xraysim/io/png.hpp"
#include "xraysim/io/raw_json.hpp"
#include "xraysim/io/toml.hpp"
#include "xraysim/metrics.hpp"
#include "xraysim/rng.hpp"

namespace fs = std::filesystem;
using namespace xraysim;

namespace {

struct PhantomArgs {
    std::string spec_path;
    std::string out_dir;
    std::string name = "phantom";
    std::uint64_t seed = 0;
};

int run_phantom(const PhantomArgs& args) {
    const PhantomSpec spec = load_phantom_spec(args.spec_path);
    const auto [ct, labels] = make_phantom(spec, args.seed);
    fs::create_directories(args.out_dir);
    const fs::path base = fs::path(args.out_dir) / args.name;
    io::save_raw_json(ct, (base.string() + "_ct"));
    io::save_raw_json(labels, (base.string() + "_labels"));
    std::cerr << "phantom: wrote " << base.string() << "_ct.{json,raw} and _labels.{json,raw}\n";
    return 0;
}

ProjectionConfig projection_from_toml(const std::string& config_path) {
    if (config_path.empty())
        return ProjectionConfig{};
    std::ifstream in(config_path, std::ios::binary);
    if (!in)
        throw IoFailure("cannot open config: " + config_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    // Reuse the dataset schema; only [projection] matters here.
    DatasetConfig parsed = parse_dataset_config(ss.str());
    return parsed.projection;
}

struct SimulateArgs {
    std::string ct_path;
    std::string labels_path;
    double angle = 0.0;
    std::string config_path;
    std::string out_dir;
};

int run_simulate(const SimulateArgs& args) {
    const ProjectionConfig config = projection_from_toml(args.config_path);
    const CtVolume ct = io::load_ct(args.ct_path);
    const LabelVolume labels = io::load_labels(args.labels_path);
    const auto [img, mask] = simulate_view(ct, labels, args.angle, config);

    fs::create_directories(args.out_dir);
    const std::string stem = fs::path(args.ct_path).stem().string();

    ManifestItem item;
    item.subject = stem;
    item.source = args.ct_path;
    item.angle_deg = args.angle;
    item.copy = 0;
    std::ostringstream id;
    id << stem << "_a" << (args.angle < 0 ? "m" : "p") << std::abs(args.angle);
    item.image_path = id.str() + ".png";
    item.mask_path = id.str() + "_mask.png";

    const auto img_bytes = io::encode_png_gray16(img);
    const auto mask_bytes = io::encode_png_gray8(mask);
    auto write = [&](const std::string& rel, const std::vector<std::uint8_t>& bytes) {
        std::ofstream f(fs::path(args.out_dir) / rel, std::ios::binary | std::ios::trunc);
        if (!f)
            throw IoFailure("cannot write: " + rel);
        f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    };
    write(item.image_path, img_bytes);
    write(item.mask_path, mask_bytes);
    item.image_sha256 = sha256_hex(img_bytes);
    item.mask_sha256 = sha256_hex(mask_bytes);

    DatasetManifest manifest;
    manifest.items.push_back(item);
    manifest.save((fs::path(args.out_dir) / "manifest.jsonl").string());

    nlohmann::json legend;
    for (int i = 0; i < kNumLabels; ++i)
        legend[std::to_string(i)] = label_names()[i];
    std::ofstream legend_out(fs::path(args.out_dir) / "legend.json",
                             std::ios::binary | std::ios::trunc);
    legend_out << legend.dump(2) << '\n';

    std::cerr << "simulate: wrote " << item.image_path << ", " << item.mask_path
              << " and manifest.jsonl\n";
    return 0;
}

struct AugmentArgs {
    std::string image_path;
    std::string mask_path;
    std::string out_dir;
    int copies = 7;
    std::uint64_t seed = 0;
};

int run_augment(const AugmentArgs& args) {
    const Radiograph img = io::load_png_gray16(args.image_path);
    const LabelMask mask = io::load_png_gray8(args.mask_path);
    AugmentConfig config;
    config.copies_per_image = args.copies;

    fs::create_directories(args.out_dir);
    const std::string stem = fs::path(args.image_path).stem().string();
    std::ofstream manifest(fs::path(args.out_dir) / "augment_manifest.jsonl",
                           std::ios::binary | std::ios::trunc);

    for (int c = 0; c < args.copies; ++c) {
        const AugmentParams params = sample_params(derive_item_seed(args.seed, stem, 0, c), config);
        const auto [aug_img, aug_mask] = apply_augmentation(img, mask, params);
        const std::string img_name = stem + "_c" + std::to_string(c) + ".png";
        const std::string mask_name = stem + "_c" + std::to_string(c) + "_mask.png";
        io::save_png_gray16(aug_img, (fs::path(args.out_dir) / img_name).string());
        io::save_png_gray8(aug_mask, (fs::path(args.out_dir) / mask_name).string());
        manifest << "{\"image\": \"" << img_name << "\", \"mask\": \"" << mask_name
                 << "\", \"params\": " << params_to_json(params) << "}\n";
    }
    std::cerr << "augment: wrote " << args.copies << " copies to " << args.out_dir << "\n";
    return 0;
}

struct GenerateArgs {
    std::string config_path;
    std::optional<int> jobs;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    bool resume = false;
};

int run_generate(const GenerateArgs& args) {
    DatasetConfig config = load_dataset_config(args.config_path);
    // flags win over config values
    if (args.jobs)
        config.jobs = *args.jobs;
    if (args.seed)
        config.seed = *args.seed;
    if (args.out_dir)
        config.output_dir = *args.out_dir;
    config.resume = args.resume;

    const DatasetManifest manifest = generate(config);
    const int failed = manifest.failed_count();
    std::cerr << "generate: " << manifest.items.size() << " items, " << failed << " failed; "
              << "manifest at " << (fs::path(config.output_dir) / "manifest.jsonl").string()
              << "\n";
    return failed == 0 ? 0 : 1;
}

struct EvaluateArgs {
    std::string pred_path;
    std::string gt_path;
    std::string csv_out;
    std::string json_out;
    std::optional<double> spacing;
};

int run_evaluate(const EvaluateArgs& args) {
    const MetricsReport report = evaluate_manifests(args.pred_path, args.gt_path, args.spacing);
    {
        std::ofstream out(args.csv_out, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoFailure("cannot write report: " + args.csv_out);
        out << report.to_csv();
    }
    if (!args.json_out.empty()) {
        std::ofstream out(args.json_out, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoFailure("cannot write report: " + args.json_out);
        out << report.to_json() << '\n';
    }
    std::cerr << "evaluate: " << report.bins.size() << " angle bins, ASD in " << report.asd_unit
              << ", report at " << args.csv_out << "\n";
    return 0;
}

struct ExportArgs {
    std::string manifest_path;
    std::string layout = "paired-folders";
    std::string out_dir;
};

int run_export(const ExportArgs& args) {
    if (args.layout != "paired-folders")
        throw ConfigError("unknown layout '" + args.layout + "' (supported: paired-folders)");
    const DatasetManifest manifest = DatasetManifest::load(args.manifest_path);
    const std::string manifest_dir = fs::path(args.manifest_path).parent_path().string();
    export_training_layout(manifest, manifest_dir.empty() ? "." : manifest_dir, args.out_dir);
    std::cerr << "export: " << manifest.items.size() << " pairs to " << args.out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CT-to-radiograph simulation with pixel-aligned bone masks"};
    app.require_subcommand(1);

    PhantomArgs phantom_args;
    auto* phantom = app.add_subcommand("phantom", "Rasterize a synthetic phantom volume pair");
    phantom->add_option("--spec", phantom_args.spec_path, "Phantom spec JSON")->required();
    phantom->add_option("--out", phantom_args.out_dir, "Output directory")->required();
    phantom->add_option("--name", phantom_args.name, "Output base name");
    phantom->add_option("--seed", phantom_args.seed, "Noise seed");

    SimulateArgs sim_args;
    auto* simulate = app.add_subcommand("simulate", "Simulate one view from a CT/label pair");
    simulate->add_option("--in", sim_args.ct_path, "CT volume (.json or .nii)")->required();
    simulate->add_option("--labels", sim_args.labels_path, "Label volume")->required();
    simulate->add_option("--angle", sim_args.angle, "View angle in degrees")->required();
    simulate->add_option("--config", sim_args.config_path, "TOML config ([projection] table)");
    simulate->add_option("--out", sim_args.out_dir, "Output directory")->required();

    AugmentArgs aug_args;
    auto* augment = app.add_subcommand("augment", "Augmented copies of an (image, mask) pair");
    augment->add_option("--image", aug_args.image_path, "16-bit grayscale PNG")->required();
    augment->add_option("--mask", aug_args.mask_path, "8-bit class-ID PNG")->required();
    augment->add_option("--out", aug_args.out_dir, "Output directory")->required();
    augment->add_option("--copies", aug_args.copies, "Copies per input");
    augment->add_option("--seed", aug_args.seed, "Root seed");

    GenerateArgs gen_args;
    int gen_jobs = 0;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    auto* gen = app.add_subcommand("generate", "Generate a full dataset from a TOML config");
    gen->add_option("--config", gen_args.config_path, "Dataset TOML")->required();
    auto* jobs_opt = gen->add_option("--jobs", gen_jobs, "Worker threads");
    auto* seed_opt = gen->add_option("--seed", gen_seed, "Root seed (overrides config)");
    auto* out_opt = gen->add_option("--out", gen_out, "Output directory (overrides config)");
    gen->add_flag("--resume", gen_args.resume, "Skip items whose checksums still match");

    EvaluateArgs eval_args;
    double eval_spacing = 0.0;
    auto* evaluate = app.add_subcommand("evaluate", "Score predicted masks against ground truth");
    evaluate->add_option("--pred", eval_args.pred_path, "Prediction manifest JSONL")->required();
    evaluate->add_option("--gt", eval_args.gt_path, "Ground-truth manifest JSONL")->required();
    evaluate->add_option("--out", eval_args.csv_out, "CSV report path")->required();
    evaluate->add_option("--json", eval_args.json_out, "Optional JSON report path");
    auto* spacing_opt = evaluate->add_option("--spacing", eval_spacing, "mm per pixel for ASD");

    ExportArgs export_args;
    auto* exp = app.add_subcommand("export", "Re-emit a manifest as a trainer-ready tree");
    exp->add_option("--manifest", export_args.manifest_path, "Manifest JSONL")->required();
    exp->add_option("--layout", export_args.layout, "Tree layout (paired-folders)");
    exp->add_option("--out", export_args.out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*phantom)
            return run_phantom(phantom_args);
        if (*simulate)
            return run_simulate(sim_args);
        if (*augment)
            return run_augment(aug_args);
        if (*gen) {
            if (*jobs_opt)
                gen_args.jobs = gen_jobs;
            if (*seed_opt)
                gen_args.seed = gen_seed;
            if (*out_opt)
                gen_args.out_dir = gen_out;
            return run_generate(gen_args);
        }
        if (*evaluate) {
            if (*spacing_opt)
                eval_args.spacing = eval_spacing;
            return run_evaluate(eval_args);
        }
        if (*exp)
            return run_export(export_args);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
