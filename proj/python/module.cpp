// Python bindings for the core operations: field queries, rendering, change
// detection, alignment, metrics, and the synthetic scene toolkit. Images and
// masks cross the boundary as numpy arrays.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "rfcd/alignment.hpp"
#include "rfcd/change_render.hpp"
#include "rfcd/ground_truth.hpp"
#include "rfcd/manifest.hpp"
#include "rfcd/metrics.hpp"
#include "rfcd/pipeline.hpp"
#include "rfcd/scene_presets.hpp"
#include "rfcd/volume_render.hpp"
#include "rfcd/voxel_field.hpp"

namespace py = pybind11;
using namespace rfcd;

namespace {

Vec3 to_vec3(py::sequence seq) {
    if (py::len(seq) != 3) throw py::value_error("expected a 3-vector");
    return {seq[0].cast<double>(), seq[1].cast<double>(), seq[2].cast<double>()};
}

py::array_t<double> image_to_array(const Image& img) {
    py::array_t<double> out({img.height, img.width, 3});
    auto view = out.mutable_unchecked<3>();
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int ch = 0; ch < 3; ++ch) view(y, x, ch) = img.at(x, y)[ch];
    return out;
}

py::array_t<bool> mask_to_array(const ChangeMap& map) {
    py::array_t<bool> out({map.height, map.width});
    auto view = out.mutable_unchecked<2>();
    for (int y = 0; y < map.height; ++y)
        for (int x = 0; x < map.width; ++x) view(y, x) = map.at(x, y) != 0;
    return out;
}

ChangeMap mask_from_array(py::array_t<bool, py::array::c_style | py::array::forcecast> arr) {
    if (arr.ndim() != 2) throw py::value_error("mask must be 2-D");
    ChangeMap map(static_cast<int>(arr.shape(1)), static_cast<int>(arr.shape(0)));
    auto view = arr.unchecked<2>();
    for (int y = 0; y < map.height; ++y)
        for (int x = 0; x < map.width; ++x) map.at(x, y) = view(y, x) ? 1 : 0;
    return map;
}

std::vector<Vec3> points_from_array(
    py::array_t<double, py::array::c_style | py::array::forcecast> arr) {
    if (arr.ndim() != 2 || arr.shape(1) != 3) throw py::value_error("expected an Nx3 array");
    std::vector<Vec3> pts(static_cast<size_t>(arr.shape(0)));
    auto view = arr.unchecked<2>();
    for (py::ssize_t i = 0; i < arr.shape(0); ++i)
        pts[static_cast<size_t>(i)] = {view(i, 0), view(i, 1), view(i, 2)};
    return pts;
}

}  // namespace

PYBIND11_MODULE(pyrfcd, m) {
    m.doc() = "Radiance-field change detection: fields, rendering, and evaluation";

    py::class_<RadianceSample>(m, "RadianceSample")
        .def_property_readonly("color",
                               [](const RadianceSample& s) {
                                   return py::make_tuple(s.color.x, s.color.y, s.color.z);
                               })
        .def_readonly("density", &RadianceSample::density);

    py::class_<RadianceField, std::shared_ptr<RadianceField>>(m, "RadianceField")
        .def("query", [](const RadianceField& f, py::sequence x, py::sequence d) {
            return f.query(to_vec3(x), normalized(to_vec3(d)));
        });

    py::class_<AnalyticField, RadianceField, std::shared_ptr<AnalyticField>>(m, "AnalyticField")
        .def(py::init([](const std::string& scene_json) {
                 return std::make_shared<AnalyticField>(scene_from_json(scene_json));
             }),
             py::arg("scene_json"));

    py::class_<VoxelGridField, RadianceField, std::shared_ptr<VoxelGridField>>(m,
                                                                               "VoxelGridField")
        .def_static("load", [](const std::string& path) {
            return std::make_shared<VoxelGridField>(VoxelGridField::load(path));
        });

    py::class_<Camera>(m, "Camera")
        .def_static("from_json", &camera_from_json)
        .def("to_json", [](const Camera& c) { return to_json(c); })
        .def_readonly("width", &Camera::width)
        .def_readonly("height", &Camera::height)
        .def_property_readonly("center", [](const Camera& c) {
            return py::make_tuple(c.center().x, c.center().y, c.center().z);
        });

    py::class_<Thresholds>(m, "Thresholds")
        .def(py::init<>())
        .def(py::init([](double eps_c, double eps_sigma) {
                 Thresholds t{eps_c, eps_sigma};
                 t.validate();
                 return t;
             }),
             py::arg("eps_c"), py::arg("eps_sigma"))
        .def_readwrite("eps_c", &Thresholds::eps_c)
        .def_readwrite("eps_sigma", &Thresholds::eps_sigma);

    py::class_<SimilarityTransform>(m, "SimilarityTransform")
        .def_readonly("scale", &SimilarityTransform::scale)
        .def_property_readonly("translation",
                               [](const SimilarityTransform& t) {
                                   return py::make_tuple(t.translation.x, t.translation.y,
                                                         t.translation.z);
                               })
        .def("apply",
             [](const SimilarityTransform& t, py::sequence x) {
                 Vec3 v = t.apply(to_vec3(x));
                 return py::make_tuple(v.x, v.y, v.z);
             })
        .def("to_json", &transform_to_json);

    py::class_<PixelMetrics>(m, "PixelMetrics")
        .def_readonly("precision", &PixelMetrics::precision)
        .def_readonly("recall", &PixelMetrics::recall)
        .def_readonly("f1", &PixelMetrics::f1)
        .def_readonly("iou", &PixelMetrics::iou)
        .def_readonly("tp", &PixelMetrics::tp)
        .def_readonly("fp", &PixelMetrics::fp)
        .def_readonly("fn", &PixelMetrics::fn);

    m.def("scene_preset_names", &scene_preset_names);
    m.def(
        "scene_preset",
        [](const std::string& name) {
            ScenePairPreset preset = scene_preset(name);
            return py::make_tuple(scene_to_json(preset.pre), scene_to_json(preset.post),
                                  trajectory_to_json(preset.trajectory));
        },
        py::arg("name"), "Returns (scene_pre_json, scene_post_json, trajectory_json)");

    m.def(
        "make_trajectory",
        [](const std::string& trajectory_json) {
            return make_trajectory(trajectory_from_json(trajectory_json));
        },
        py::arg("trajectory_json"));

    m.def(
        "composite_weights",
        [](std::vector<double> densities, std::vector<double> deltas) {
            CompositeWeights cw = composite_weights(densities, deltas);
            return py::make_tuple(cw.transmittance, cw.alpha, cw.weight);
        },
        py::arg("densities"), py::arg("deltas"),
        "Returns (transmittance, alpha, weight) per sample");

    m.def(
        "render_image",
        [](std::shared_ptr<RadianceField> field, const Camera& camera, int k) {
            return image_to_array(render_image(*field, camera, k));
        },
        py::arg("field"), py::arg("camera"), py::arg("k") = 128);

    m.def(
        "render_change_map",
        [](std::shared_ptr<RadianceField> field_a, std::shared_ptr<RadianceField> field_b,
           const Camera& camera, const Thresholds& thresholds, int views, int k,
           const std::string& mode, double cone_lateral, double cone_vertical) {
            ChangeRenderConfig cfg;
            cfg.thresholds = thresholds;
            cfg.views = views;
            cfg.samples_per_ray = k;
            cfg.mode = mode == "forward_facing" ? SceneMode::ForwardFacing : SceneMode::Surround;
            cfg.cone = ViewCone{cone_lateral, cone_vertical};
            return mask_to_array(render_change_map(*field_a, *field_b, camera, cfg));
        },
        py::arg("field_a"), py::arg("field_b"), py::arg("camera"),
        py::arg("thresholds") = Thresholds{}, py::arg("views") = 5, py::arg("k") = 128,
        py::arg("mode") = "surround", py::arg("cone_lateral") = 0.3,
        py::arg("cone_vertical") = 0.12);

    m.def(
        "naive_change_map",
        [](std::shared_ptr<RadianceField> field_a, std::shared_ptr<RadianceField> field_b,
           const Camera& camera, double eps_c_img, int k) {
            return mask_to_array(naive_change_map(*field_a, *field_b, camera, eps_c_img, k));
        },
        py::arg("field_a"), py::arg("field_b"), py::arg("camera"), py::arg("eps_c_img") = 60.0,
        py::arg("k") = 128);

    m.def(
        "ground_truth_change_mask",
        [](const std::string& scene_a_json, const std::string& scene_b_json, const Camera& camera,
           int k) {
            return mask_to_array(ground_truth_change_mask(scene_from_json(scene_a_json),
                                                          scene_from_json(scene_b_json), camera,
                                                          k));
        },
        py::arg("scene_a_json"), py::arg("scene_b_json"), py::arg("camera"), py::arg("k") = 128);

    m.def(
        "estimate_similarity",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> a,
           py::array_t<double, py::array::c_style | py::array::forcecast> b) {
            return estimate_similarity(points_from_array(a), points_from_array(b));
        },
        py::arg("points_a"), py::arg("points_b"));

    m.def(
        "pixel_metrics",
        [](py::array_t<bool, py::array::c_style | py::array::forcecast> pred,
           py::array_t<bool, py::array::c_style | py::array::forcecast> gt) {
            return pixel_metrics(mask_from_array(pred), mask_from_array(gt));
        },
        py::arg("pred"), py::arg("gt"));

    m.def(
        "map_score",
        [](py::array_t<bool, py::array::c_style | py::array::forcecast> pred,
           py::array_t<bool, py::array::c_style | py::array::forcecast> gt,
           double iou_threshold, int min_area) {
            return map_score(extract_boxes(mask_from_array(pred), min_area),
                             extract_boxes(mask_from_array(gt), min_area), iou_threshold);
        },
        py::arg("pred"), py::arg("gt"), py::arg("iou_threshold") = 0.5, py::arg("min_area") = 4);

    m.def("read_mask", [](const std::string& path) { return mask_to_array(read_mask(path)); });
    m.def("read_image", [](const std::string& path) { return image_to_array(read_ppm(path)); });
}
