#include <sstream>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "touchsim/bench.hpp"
#include "touchsim/dataset.hpp"
#include "touchsim/env.hpp"
#include "touchsim/geometry.hpp"
#include "touchsim/mesh_io.hpp"
#include "touchsim/meshgen.hpp"
#include "touchsim/taxel_codec.hpp"

namespace py = pybind11;
using namespace touchsim;

namespace {

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_python(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

Vec3 to_vec(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }
py::tuple from_vec(const Vec3& v) { return py::make_tuple(v.x, v.y, v.z); }

py::array_t<std::uint8_t> grid_array(const TaxelGrid& g) {
  py::array_t<std::uint8_t> out({kTaxelRows, kTaxelCols});
  std::copy(g.cells.begin(), g.cells.end(), out.mutable_data());
  return out;
}

TaxelGrid array_grid(const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2 || a.shape(0) != static_cast<py::ssize_t>(kTaxelRows) ||
      a.shape(1) != static_cast<py::ssize_t>(kTaxelCols)) {
    throw std::invalid_argument("taxel grid must have shape (40, 40)");
  }
  TaxelGrid g;
  for (std::size_t i = 0; i < kTaxelCount; ++i) {
    if (a.data()[i] > 1) throw std::invalid_argument("taxel values must be 0 or 1");
    g.cells[i] = a.data()[i];
  }
  return g;
}

TriangleMesh mesh_from_arrays(const py::array_t<double, py::array::c_style | py::array::forcecast>& v,
                              const py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>& t) {
  if (v.ndim() != 2 || v.shape(1) != 3 || t.ndim() != 2 || t.shape(1) != 3) {
    throw std::invalid_argument("vertices and triangles must have shape (n, 3)");
  }
  TriangleMesh m;
  for (py::ssize_t i = 0; i < v.shape(0); ++i) m.vertices.push_back({v.at(i, 0), v.at(i, 1), v.at(i, 2)});
  for (py::ssize_t i = 0; i < t.shape(0); ++i) {
    Triangle tri;
    for (int k = 0; k < 3; ++k) {
      const auto idx = t.at(i, k);
      if (idx < 0 || idx > std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument("bad vertex index");
      tri[static_cast<std::size_t>(k)] = static_cast<std::uint32_t>(idx);
    }
    m.triangles.push_back(tri);
  }
  return m;
}

py::dict step_dict(const StepResult& r) {
  py::dict info;
  info["contact_count"] = r.info.contact_count;
  info["rejected_motion"] = r.info.rejected_motion;
  info["episode_id"] = r.info.episode_id;
  if (r.info.correct) info["correct"] = *r.info.correct;
  py::dict d;
  d["observation"] = grid_array(r.observation.taxels);
  d["step"] = r.observation.step_index;
  d["reward"] = r.reward;
  d["done"] = r.done;
  d["info"] = info;
  return d;
}

// Owns its scene so Python callers only deal with meshes.
class PyEnv {
 public:
  PyEnv(const TriangleMesh& mesh, std::optional<std::string> label)
      : scene_(make_scene_object(mesh, "object", std::move(label))) {}

  py::array_t<std::uint8_t> reset(std::uint64_t seed, int max_steps, double start_distance, double start_jitter,
                                  double joint_step, double base_step, double sensor_reach) {
    EnvConfig c;
    c.object = scene_;
    c.seed = seed;
    c.max_steps = max_steps;
    c.start_distance = start_distance;
    c.start_jitter = start_jitter;
    c.joint_step = joint_step;
    c.base_step = base_step;
    c.sensor_reach = sensor_reach;
    return grid_array(env_.reset(c).taxels);
  }
  py::dict step(int action) { return step_dict(env_.step(action)); }
  py::dict classify(const std::string& label) { return step_dict(env_.submit_classification(label)); }
  bool active() const { return env_.active(); }
  py::dict state() const {
    py::dict d;
    d["base"] = from_vec(env_.state().base_position);
    d["joints"] = env_.state().joint_angles;
    return d;
  }

 private:
  std::shared_ptr<const SceneObject> scene_;
  TouchEnv env_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Tactile object-recognition simulator";

  py::register_exception<EnvError>(m, "EnvError", PyExc_RuntimeError);
  py::register_exception<DatasetError>(m, "DatasetError", PyExc_RuntimeError);
  py::register_exception<BenchError>(m, "BenchError", PyExc_ValueError);

  m.attr("ENV_ID") = kEnvId;
  m.attr("ACTION_COUNT") = kActionCount;
  m.attr("DEFAULT_MAX_STEPS") = kDefaultMaxSteps;
  m.attr("TAXEL_ROWS") = kTaxelRows;
  m.attr("TAXEL_COLS") = kTaxelCols;

  m.def("class_names", [] {
    std::vector<std::string> out;
    for (ObjectClass c : all_classes()) out.emplace_back(class_name(c));
    return out;
  });

  py::class_<TriangleMesh>(m, "Mesh")
      .def(py::init(&mesh_from_arrays), py::arg("vertices"), py::arg("triangles"))
      .def_property_readonly("vertices",
                             [](const TriangleMesh& mesh) {
                               py::array_t<double> a({mesh.vertices.size(), std::size_t{3}});
                               auto r = a.mutable_unchecked<2>();
                               for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
                                 for (int k = 0; k < 3; ++k) r(static_cast<py::ssize_t>(i), k) = mesh.vertices[i][k];
                               }
                               return a;
                             })
      .def_property_readonly("triangles",
                             [](const TriangleMesh& mesh) {
                               py::array_t<std::uint32_t> a({mesh.triangles.size(), std::size_t{3}});
                               auto r = a.mutable_unchecked<2>();
                               for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
                                 for (std::size_t k = 0; k < 3; ++k) {
                                   r(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(k)) = mesh.triangles[i][k];
                                 }
                               }
                               return a;
                             })
      .def_property_readonly("triangle_count", &TriangleMesh::triangle_count)
      .def("volume", &mesh_volume)
      .def("validate",
           [](const TriangleMesh& mesh) {
             const ValidationReport r = validate_mesh(mesh);
             py::dict d;
             d["passed"] = r.passed();
             d["failures"] = r.failures();
             d["boundary_edges"] = r.boundary_edges;
             d["signed_volume"] = r.signed_volume;
             return d;
           })
      .def("to_stl",
           [](const TriangleMesh& mesh, bool ascii) {
             std::ostringstream out;
             write_stl(mesh, out, ascii ? StlFormat::kAscii : StlFormat::kBinary);
             return py::bytes(out.str());
           },
           py::arg("ascii") = false)
      .def_static("from_stl",
                  [](const py::bytes& data) {
                    std::istringstream in{std::string(data)};
                    return read_stl(in);
                  })
      .def("save_stl", [](const TriangleMesh& mesh, const std::filesystem::path& p) { save_stl(mesh, p); })
      .def("save_obj", &save_obj)
      .def_static("load_stl", &load_stl)
      .def_static("load_obj", &load_obj);

  m.def("sample_params",
        [](const std::string& cls, std::uint64_t seed) { return sample_params(class_from_name(cls), seed).values; },
        py::arg("class_name"), py::arg("seed"));
  m.def("generate_object",
        [](const std::string& cls, std::uint64_t seed) { return generate_object(sample_params(class_from_name(cls), seed)); },
        py::arg("class_name"), py::arg("seed"));
  m.def("generate_object_with",
        [](const std::string& cls, const std::map<std::string, double>& values) {
          MeshParams p;
          p.object_class = class_from_name(cls);
          p.values = values;
          return generate_object(p);
        },
        py::arg("class_name"), py::arg("params"));

  py::class_<SpatialIndex>(m, "SpatialIndex")
      .def(py::init<TriangleMesh>(), py::arg("mesh"))
      .def("raycast",
           [](const SpatialIndex& idx, std::array<double, 3> origin, std::array<double, 3> direction,
              double max_distance) -> py::object {
             const auto hit = idx.raycast({to_vec(origin), to_vec(direction), max_distance});
             if (!hit) return py::none();
             py::dict d;
             d["distance"] = hit->distance;
             d["triangle"] = hit->triangle;
             d["point"] = from_vec(hit->point);
             d["normal"] = from_vec(hit->normal);
             return d;
           },
           py::arg("origin"), py::arg("direction"), py::arg("max_distance"))
      .def("contains_point", [](const SpatialIndex& idx, std::array<double, 3> p) { return idx.contains_point(to_vec(p)); })
      .def("distance_to_surface",
           [](const SpatialIndex& idx, std::array<double, 3> p, double radius) -> py::object {
             const auto s = idx.distance_to_surface(to_vec(p), radius);
             if (!s) return py::none();
             return py::float_(s->distance);
           },
           py::arg("point"), py::arg("search_radius") = 1.0);

  m.def("encode_taxels", [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& a) {
    return encode_taxels(array_grid(a));
  });
  m.def("decode_taxels", [](const std::string& s) { return grid_array(decode_taxels(s)); });

  const EnvConfig defaults;
  py::class_<PyEnv>(m, "TouchEnv")
      .def(py::init<const TriangleMesh&, std::optional<std::string>>(), py::arg("mesh"),
           py::arg("class_label") = py::none())
      .def("reset", &PyEnv::reset, py::arg("seed") = 0, py::arg("max_steps") = defaults.max_steps,
           py::arg("start_distance") = defaults.start_distance, py::arg("start_jitter") = defaults.start_jitter,
           py::arg("joint_step") = defaults.joint_step, py::arg("base_step") = defaults.base_step,
           py::arg("sensor_reach") = defaults.sensor_reach)
      .def("step", &PyEnv::step, py::arg("action"))
      .def("classify", &PyEnv::classify, py::arg("label"))
      .def_property_readonly("active", &PyEnv::active)
      .def_property_readonly("state", &PyEnv::state);

  m.def("generate_dataset",
        [](const std::vector<std::string>& classes, std::size_t count, std::uint64_t seed,
           const std::filesystem::path& out) {
          std::vector<ObjectClass> cls;
          for (const auto& c : classes) cls.push_back(class_from_name(c));
          Dataset ds = generate_dataset(cls, count, seed);
          return to_python(nlohmann::json(write_dataset(ds, out)));
        },
        py::arg("classes"), py::arg("count"), py::arg("seed"), py::arg("out"));
  m.def("validate_dataset", [](const std::filesystem::path& root) {
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& c : validate_dataset(root)) out[c.id] = c.problems;
    return out;
  });
  m.def("run_benchmark",
        [](const py::object& config, const std::filesystem::path& data, std::optional<std::filesystem::path> out) {
          const BenchmarkConfig c = from_python(config).get<BenchmarkConfig>();
          const Dataset ds = load_dataset(data);
          BenchmarkResult r;
          {
            py::gil_scoped_release release;
            r = run_benchmark(c, ds);
          }
          if (out) write_benchmark(r, *out);
          return to_python(nlohmann::json(r.metrics));
        },
        py::arg("config"), py::arg("data"), py::arg("out") = py::none());
}
