// pybind11 bindings for the core operations, numpy in/out.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "xraysim/augment.hpp"
#include "xraysim/dataset.hpp"
#include "xraysim/io/nifti.hpp"
#include "xraysim/io/png.hpp"
#include "xraysim/io/raw_json.hpp"
#include "xraysim/metrics.hpp"
#include "xraysim/projection.hpp"
#include "xraysim/volume.hpp"

namespace py = pybind11;
using namespace xraysim;

namespace {

// numpy volumes are (z, y, x) C-order, which matches the x-fastest storage.
CtVolume ct_from_numpy(py::array_t<float, py::array::c_style | py::array::forcecast> arr,
                       std::tuple<double, double, double> spacing) {
    if (arr.ndim() != 3)
        throw DimensionMismatch("expected a 3D array (z, y, x)");
    const Dims3 dims{int(arr.shape(2)), int(arr.shape(1)), int(arr.shape(0))};
    std::vector<float> data(std::size_t(dims.voxel_count()));
    std::memcpy(data.data(), arr.data(), data.size() * sizeof(float));
    return CtVolume(dims, {std::get<0>(spacing), std::get<1>(spacing), std::get<2>(spacing)},
                    std::move(data));
}

py::array_t<float> ct_to_numpy(const CtVolume& vol) {
    const Dims3& d = vol.dims();
    py::array_t<float> arr({d.nz, d.ny, d.nx});
    std::memcpy(arr.mutable_data(), vol.data().data(), vol.data().size() * sizeof(float));
    return arr;
}

LabelVolume labels_from_numpy(py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> arr,
                              std::tuple<double, double, double> spacing) {
    if (arr.ndim() != 3)
        throw DimensionMismatch("expected a 3D array (z, y, x)");
    const Dims3 dims{int(arr.shape(2)), int(arr.shape(1)), int(arr.shape(0))};
    std::vector<std::uint8_t> data(std::size_t(dims.voxel_count()));
    std::memcpy(data.data(), arr.data(), data.size());
    return LabelVolume(dims, {std::get<0>(spacing), std::get<1>(spacing), std::get<2>(spacing)},
                       std::move(data));
}

py::array_t<std::uint8_t> labels_to_numpy(const LabelVolume& vol) {
    const Dims3& d = vol.dims();
    py::array_t<std::uint8_t> arr({d.nz, d.ny, d.nx});
    std::memcpy(arr.mutable_data(), vol.data().data(), vol.data().size());
    return arr;
}

py::array_t<float> image_to_numpy(const Radiograph& img) {
    py::array_t<float> arr({img.height(), img.width()});
    std::memcpy(arr.mutable_data(), img.data().data(), img.data().size() * sizeof(float));
    return arr;
}

py::array_t<std::uint8_t> mask_to_numpy(const LabelMask& mask) {
    py::array_t<std::uint8_t> arr({mask.height(), mask.width()});
    std::memcpy(arr.mutable_data(), mask.data().data(), mask.data().size());
    return arr;
}

LabelMask mask_from_numpy(py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> arr) {
    if (arr.ndim() != 2)
        throw DimensionMismatch("expected a 2D array (y, x)");
    std::vector<std::uint8_t> data(std::size_t(arr.shape(0)) * std::size_t(arr.shape(1)));
    std::memcpy(data.data(), arr.data(), data.size());
    return LabelMask(int(arr.shape(1)), int(arr.shape(0)), std::move(data));
}

Radiograph image_from_numpy(py::array_t<float, py::array::c_style | py::array::forcecast> arr) {
    if (arr.ndim() != 2)
        throw DimensionMismatch("expected a 2D array (y, x)");
    Radiograph img(int(arr.shape(1)), int(arr.shape(0)), ImageStage::resized);
    std::memcpy(img.data().data(), arr.data(), img.data().size() * sizeof(float));
    return img;
}

Axis axis_from_char(const std::string& axis) {
    if (axis == "x") return Axis::x;
    if (axis == "y") return Axis::y;
    if (axis == "z") return Axis::z;
    throw ConfigError("axis must be x, y or z");
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "CT-to-radiograph simulation with pixel-aligned bone masks";

    py::register_exception<Error>(m, "XraysimError");

    py::class_<CtVolume>(m, "CtVolume")
        .def(py::init(&ct_from_numpy), py::arg("data"), py::arg("spacing_mm"))
        .def_property_readonly("shape",
                               [](const CtVolume& v) {
                                   return py::make_tuple(v.dims().nz, v.dims().ny, v.dims().nx);
                               })
        .def_property_readonly("spacing_mm",
                               [](const CtVolume& v) {
                                   return py::make_tuple(v.spacing().x, v.spacing().y,
                                                         v.spacing().z);
                               })
        .def("to_numpy", &ct_to_numpy);

    py::class_<LabelVolume>(m, "LabelVolume")
        .def(py::init(&labels_from_numpy), py::arg("data"), py::arg("spacing_mm"))
        .def_property_readonly("shape",
                               [](const LabelVolume& v) {
                                   return py::make_tuple(v.dims().nz, v.dims().ny, v.dims().nx);
                               })
        .def("to_numpy", &labels_to_numpy);

    py::class_<Radiograph>(m, "Radiograph")
        .def(py::init(&image_from_numpy), py::arg("data"))
        .def_property_readonly("width", &Radiograph::width)
        .def_property_readonly("height", &Radiograph::height)
        .def("to_numpy", &image_to_numpy);

    py::class_<LabelMask>(m, "LabelMask")
        .def(py::init(&mask_from_numpy), py::arg("data"))
        .def_property_readonly("width", &LabelMask::width)
        .def_property_readonly("height", &LabelMask::height)
        .def("to_numpy", &mask_to_numpy);

    py::class_<ProjectionConfig>(m, "ProjectionConfig")
        .def(py::init<>())
        .def_readwrite("attenuation_scale", &ProjectionConfig::attenuation_scale)
        .def_readwrite("adaptive_scale_c", &ProjectionConfig::adaptive_scale_c)
        .def_readwrite("tissue_low_percentile", &ProjectionConfig::tissue_low_percentile)
        .def_readwrite("tissue_target_percentile", &ProjectionConfig::tissue_target_percentile)
        .def_readwrite("artifact_percentile", &ProjectionConfig::artifact_percentile)
        .def_readwrite("invert_for_tissue_reduction", &ProjectionConfig::invert_for_tissue_reduction)
        .def_readwrite("scan_from_far_side", &ProjectionConfig::scan_from_far_side)
        .def_readwrite("output_width", &ProjectionConfig::output_width)
        .def_readwrite("output_height", &ProjectionConfig::output_height)
        .def_readwrite("view_angles", &ProjectionConfig::view_angles);

    py::class_<AugmentParams>(m, "AugmentParams")
        .def(py::init<>())
        .def_readwrite("rotation_deg", &AugmentParams::rotation_deg)
        .def_readwrite("translate_x", &AugmentParams::translate_x)
        .def_readwrite("translate_y", &AugmentParams::translate_y)
        .def_readwrite("zoom", &AugmentParams::zoom)
        .def_readwrite("hflip", &AugmentParams::hflip);

    py::class_<AugmentConfig>(m, "AugmentConfig")
        .def(py::init<>())
        .def_readwrite("copies_per_image", &AugmentConfig::copies_per_image)
        .def_readwrite("max_rotation_deg", &AugmentConfig::max_rotation_deg)
        .def_readwrite("max_translate_frac", &AugmentConfig::max_translate_frac)
        .def_readwrite("max_zoom_frac", &AugmentConfig::max_zoom_frac)
        .def_readwrite("enable_hflip", &AugmentConfig::enable_hflip);

    // volume ops
    m.def("clamp_air", &clamp_air, py::arg("volume"));
    m.def("clamp_artifacts", &clamp_artifacts, py::arg("volume"), py::arg("percentile") = 99.0);
    m.def("resample_isotropic", &resample_isotropic, py::arg("volume"),
          py::arg("target_mm") = 0.5);
    m.def("resample_labels", &resample_labels, py::arg("labels"), py::arg("target_mm"));
    m.def(
        "rotate_volume",
        [](const CtVolume& v, double angle, const std::string& axis) {
            return rotate_volume(v, angle, axis_from_char(axis));
        },
        py::arg("volume"), py::arg("angle_deg"), py::arg("axis") = "y");
    m.def(
        "rotate_labels",
        [](const LabelVolume& v, double angle, const std::string& axis) {
            return rotate_volume(v, angle, axis_from_char(axis));
        },
        py::arg("labels"), py::arg("angle_deg"), py::arg("axis") = "y");
    m.def(
        "make_phantom",
        [](const std::string& spec_json, std::uint64_t seed) {
            return make_phantom(parse_phantom_spec(spec_json), seed);
        },
        py::arg("spec_json"), py::arg("seed") = 0);

    // projection pipeline
    m.def("project", &project, py::arg("volume"), py::arg("config") = ProjectionConfig{});
    m.def("tissue_reduction", &tissue_reduction, py::arg("image"),
          py::arg("config") = ProjectionConfig{});
    m.def("normalize_minmax", &normalize_minmax, py::arg("image"));
    m.def("resize", &resize, py::arg("image"), py::arg("width"), py::arg("height"));
    m.def("project_labels", &project_labels, py::arg("labels"),
          py::arg("from_far_side") = false);
    m.def("resize_mask", &resize_mask, py::arg("mask"), py::arg("width"), py::arg("height"));
    m.def("simulate_view", &simulate_view, py::arg("ct"), py::arg("labels"),
          py::arg("angle_deg"), py::arg("config") = ProjectionConfig{});

    // augmentation
    m.def("sample_params", &sample_params, py::arg("seed"),
          py::arg("config") = AugmentConfig{});
    m.def("apply_augmentation", &apply_augmentation, py::arg("image"), py::arg("mask"),
          py::arg("params"));

    // metrics
    m.def("dice", &dice, py::arg("pred"), py::arg("gt"), py::arg("label"));
    m.def("asd", &asd, py::arg("pred"), py::arg("gt"), py::arg("label"),
          py::arg("spacing_mm") = std::nullopt);
    m.def("evaluate_manifests", &evaluate_manifests, py::arg("pred_manifest"),
          py::arg("gt_manifest"), py::arg("spacing_mm") = std::nullopt);

    py::class_<MetricsReport>(m, "MetricsReport")
        .def_readonly("bins", &MetricsReport::bins)
        .def_readonly("items_per_bin", &MetricsReport::items_per_bin)
        .def_readonly("asd_unit", &MetricsReport::asd_unit)
        .def("to_csv", &MetricsReport::to_csv)
        .def("to_json", &MetricsReport::to_json);

    // io
    m.def("load_ct", &io::load_ct, py::arg("path"));
    m.def("load_labels", &io::load_labels, py::arg("path"));
    m.def("save_ct", py::overload_cast<const CtVolume&, const std::string&>(&io::save_raw_json),
          py::arg("volume"), py::arg("base_path"));
    m.def("save_labels",
          py::overload_cast<const LabelVolume&, const std::string&>(&io::save_raw_json),
          py::arg("labels"), py::arg("base_path"));
    m.def("save_image_png", &io::save_png_gray16, py::arg("image"), py::arg("path"));
    m.def("save_mask_png", &io::save_png_gray8, py::arg("mask"), py::arg("path"));
    m.def(
        "load_image_png",
        [](const std::string& path) { return io::load_png_gray16(path); },
        py::arg("path"));
    m.def("load_mask_png", &io::load_png_gray8, py::arg("path"));

    m.def("label_names", [] {
        return std::vector<std::string>(label_names().begin(), label_names().end());
    });
}
