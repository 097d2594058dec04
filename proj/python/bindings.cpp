#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "parallelobox/batch.hpp"
#include "parallelobox/errors.hpp"
#include "parallelobox/meta.hpp"

namespace py = pybind11;
using namespace parallelobox;

namespace {

py::array_t<double> vertices_of(const TriangleMesh& m) {
  py::array_t<double> out({static_cast<py::ssize_t>(m.vertices.size()), py::ssize_t{3}});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    for (int k = 0; k < 3; ++k) v(i, k) = m.vertices[i][k];
  }
  return out;
}

py::array_t<std::int32_t> triangles_of(const TriangleMesh& m) {
  py::array_t<std::int32_t> out({static_cast<py::ssize_t>(m.triangles.size()), py::ssize_t{3}});
  auto t = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.triangles.size(); ++i) {
    for (int k = 0; k < 3; ++k) t(i, k) = m.triangles[i][k];
  }
  return out;
}

TriangleMesh mesh_from_arrays(py::array_t<double, py::array::c_style | py::array::forcecast> vertices,
                              py::array_t<std::int64_t, py::array::c_style | py::array::forcecast> triangles,
                              const std::string& name) {
  if (vertices.ndim() != 2 || vertices.shape(1) != 3) throw py::value_error("vertices must have shape (n, 3)");
  if (triangles.ndim() != 2 || triangles.shape(1) != 3) throw py::value_error("triangles must have shape (m, 3)");
  TriangleMesh m;
  m.name = name;
  auto v = vertices.unchecked<2>();
  for (py::ssize_t i = 0; i < v.shape(0); ++i) m.vertices.emplace_back(v(i, 0), v(i, 1), v(i, 2));
  auto t = triangles.unchecked<2>();
  for (py::ssize_t i = 0; i < t.shape(0); ++i) {
    Triangle tri;
    for (int k = 0; k < 3; ++k) {
      const std::int64_t id = t(i, k);
      if (id < 0 || id >= v.shape(0)) throw py::index_error("triangle references a missing vertex");
      tri[k] = static_cast<std::int32_t>(id);
    }
    m.triangles.push_back(tri);
  }
  return m;
}

}  // namespace

PYBIND11_MODULE(_parallelobox, m) {
  m.doc() = "Axis-aligned decomposition of meshes for parallel 3D printing";

  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<EmptyMesh>(m, "EmptyMesh", error.ptr());
  py::register_exception<NonWatertightInput>(m, "NonWatertightInput", error.ptr());
  py::register_exception<DegenerateBox>(m, "DegenerateBox", error.ptr());
  py::register_exception<InsufficientBoundaryCells>(m, "InsufficientBoundaryCells", error.ptr());
  py::register_exception<NoValidDecomposition>(m, "NoValidDecomposition", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());

  py::class_<TriangleMesh>(m, "TriangleMesh")
      .def(py::init(&mesh_from_arrays), py::arg("vertices"), py::arg("triangles"), py::arg("name") = "")
      .def_property_readonly("vertices", &vertices_of)
      .def_property_readonly("triangles", &triangles_of)
      .def_readwrite("name", &TriangleMesh::name)
      .def("__len__", &TriangleMesh::triangle_count)
      .def("__repr__", [](const TriangleMesh& t) {
        return "<TriangleMesh " + t.name + ": " + std::to_string(t.vertices.size()) + " vertices, " +
               std::to_string(t.triangles.size()) + " triangles>";
      });

  m.def("load_mesh", py::overload_cast<const std::filesystem::path&>(&load_mesh), py::arg("path"),
        "Load and clean an STL or OBJ file.");
  m.def("write_stl", &write_stl_binary, py::arg("mesh"), py::arg("path"));
  m.def(
      "measure",
      [](const TriangleMesh& mesh) {
        const MeshMeasures mm = measure(mesh);
        py::dict d;
        d["volume"] = mm.volume;
        d["surface_area"] = mm.surface_area;
        d["centroid"] = mm.centroid;
        return d;
      },
      py::arg("mesh"));
  m.def(
      "is_watertight", [](const TriangleMesh& mesh) { return validate_watertight(mesh).is_watertight; },
      py::arg("mesh"));
  m.def(
      "clip_to_box",
      [](const TriangleMesh& mesh, const Vec3& lo, const Vec3& hi, bool volumetric) {
        return clip_to_box(mesh, Aabb{lo, hi}, volumetric ? ClipMode::Volumetric : ClipMode::SurfaceOnly).mesh;
      },
      py::arg("mesh"), py::arg("lo"), py::arg("hi"), py::arg("volumetric") = true);
  m.def(
      "find_best_symmetry_plane",
      [](const TriangleMesh& mesh) {
        const SymmetryPlane p = find_best_symmetry_plane(mesh);
        py::dict d;
        d["normal"] = p.normal;
        d["offset"] = p.offset;
        d["error_score"] = p.error_score;
        return d;
      },
      py::arg("mesh"));

  py::class_<ObjectiveParams>(m, "ObjectiveParams")
      .def(py::init<>())
      .def_readwrite("speed_infill", &ObjectiveParams::speed_infill)
      .def_readwrite("speed_shell", &ObjectiveParams::speed_shell)
      .def_readwrite("infill_fraction", &ObjectiveParams::infill_fraction)
      .def_readwrite("overhang_tolerance", &ObjectiveParams::overhang_tolerance)
      .def_readwrite("printer_dims", &ObjectiveParams::printer_dims)
      .def_readwrite("overhang_weight", &ObjectiveParams::overhang_weight)
      .def_readwrite("proximity_floor", &ObjectiveParams::proximity_floor);

  py::class_<TimeCalibration>(m, "TimeCalibration")
      .def(py::init<>())
      .def_readwrite("line_width", &TimeCalibration::line_width)
      .def_readwrite("layer_height", &TimeCalibration::layer_height);

  py::class_<RunPlan>(m, "RunPlan")
      .def(py::init<>())
      .def_readwrite("printers_available", &RunPlan::printers_available)
      .def_readwrite("min_printers", &RunPlan::min_printers)
      .def_readwrite("sample_tries", &RunPlan::sample_tries)
      .def_readwrite("rng_seed", &RunPlan::rng_seed)
      .def_readwrite("objective", &RunPlan::objective)
      .def_readwrite("calibration", &RunPlan::calibration)
      .def_readwrite("skip_symmetry", &RunPlan::skip_symmetry)
      .def_readwrite("symmetry_threshold", &RunPlan::symmetry_threshold)
      .def_property(
          "granularity", [](const RunPlan& p) { return to_string(p.granularity); },
          [](RunPlan& p, const std::string& g) { p.granularity = parse_granularity(g); });

  m.def("print_score", &print_score, py::arg("volume"), py::arg("surface_area"),
        py::arg("params") = ObjectiveParams{});
  m.def("estimate_time", &estimate_time, py::arg("volume"), py::arg("surface_area"),
        py::arg("params") = ObjectiveParams{}, py::arg("calibration") = TimeCalibration{});
  m.def("parallel_time", &parallel_time, py::arg("part_times"));
  m.def("aggregate_time", &aggregate_time, py::arg("part_times"));

  py::class_<Part>(m, "Part")
      .def_readonly("mesh", &Part::mesh)
      .def_readonly("piece", &Part::piece)
      .def_readonly("block", &Part::block)
      .def_readonly("lo", &Part::lo)
      .def_readonly("hi", &Part::hi)
      .def_readonly("from_resolve", &Part::from_resolve)
      .def_readonly("volume", &Part::volume)
      .def_readonly("surface_area", &Part::surface_area)
      .def_readonly("cap_free_area", &Part::cap_free_area)
      .def_readonly("print_score", &Part::print_score)
      .def_readonly("est_time", &Part::est_time);

  py::class_<Decomposition>(m, "Decomposition")
      .def_readonly("algorithm", &Decomposition::algorithm)
      .def_readonly("parts", &Decomposition::parts)
      .def_readonly("parallel_score", &Decomposition::parallel_score)
      .def_readonly("parallel_time", &Decomposition::parallel_time)
      .def_readonly("aggregate_time", &Decomposition::aggregate_time)
      .def_readonly("printers_available", &Decomposition::printers_available)
      .def_readonly("printers_grown", &Decomposition::printers_grown)
      .def_readonly("printers_used", &Decomposition::printers_used)
      .def_readonly("symmetry_cut", &Decomposition::symmetry_cut)
      .def_readonly("valid", &Decomposition::valid)
      .def_readonly("reason", &Decomposition::reason)
      .def_readonly("seed", &Decomposition::seed);

  m.def(
      "run_pipeline_once",
      [](const TriangleMesh& mesh, const RunPlan& plan, int printers, std::uint64_t seed) {
        return run_pipeline_once(mesh, plan, printers, seed);
      },
      py::arg("mesh"), py::arg("plan"), py::arg("printers_for_growth"), py::arg("seed"));
  m.def(
      "run_metaheuristic",
      [](const TriangleMesh& mesh, const RunPlan& plan) {
        MetaResult r = run_metaheuristic(mesh, plan);
        py::list log;
        for (const IterationRecord& rec : r.log) log.append(py::module_::import("json").attr("loads")(to_json(rec).dump()));
        return py::make_tuple(std::move(r.best), log);
      },
      py::arg("mesh"), py::arg("plan"),
      "Best decomposition and the per-iteration log. Raises NoValidDecomposition.");
  m.def("recursive_symmetry_baseline", &recursive_symmetry_baseline, py::arg("mesh"), py::arg("printers"),
        py::arg("params") = ObjectiveParams{}, py::arg("calibration") = TimeCalibration{});

  m.def(
      "parse_config",
      [](const std::filesystem::path& path) {
        const PrinterConfig c = parse_config(path);
        py::dict d;
        d["volume"] = c.volume;
        d["speed_shell"] = c.speed_shell;
        d["speed_infill"] = c.speed_infill;
        d["line_width"] = c.line_width;
        d["layer_height"] = c.layer_height;
        return d;
      },
      py::arg("path"));
}
