#include "touchsim/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "touchsim/rng.hpp"

namespace touchsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CategoryEntry {
  std::string_view category;
  std::vector<ObjectClass> members;
};

const std::vector<CategoryEntry>& categories() {
  static const std::vector<CategoryEntry> table = {
      {"container", {ObjectClass::kCup, ObjectClass::kBowl, ObjectClass::kVase, ObjectClass::kBottle}},
      {"tableware", {ObjectClass::kPlate, ObjectClass::kSpoon}},
      {"tool", {ObjectClass::kHammer, ObjectClass::kPencil}},
      {"solid", {ObjectClass::kCube, ObjectClass::kPyramid, ObjectClass::kCylinder, ObjectClass::kSphere}},
      {"weapon", {ObjectClass::kMissile}},
  };
  return table;
}

bool relative_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

json read_json_file(const fs::path& path, const std::string& id) {
  std::ifstream in(path);
  if (!in) throw DatasetError(id, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DatasetError(id, "malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_json_file(const json& j, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<fs::path> sidecar_paths(const fs::path& root) {
  std::vector<fs::path> out;
  const fs::path dir = root / kObjectsDirName;
  if (!fs::exists(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Problems with one record's class labelling; empty when consistent.
std::vector<std::string> record_label_problems(const ObjectRecord& r) {
  std::vector<std::string> problems;
  const auto cls = parse_class(r.class_name);
  if (!cls) {
    problems.push_back("class '" + r.class_name + "' is not in the taxonomy");
    return problems;
  }
  if (r.hierarchy_path != hierarchy_path(*cls)) problems.push_back("hierarchy_path does not match taxonomy");
  if (r.params.object_class != *cls) problems.push_back("params class differs from class_name");
  return problems;
}

// Loads both mesh files and compares them with the record.
std::vector<std::string> mesh_file_problems(const fs::path& root, const ObjectRecord& r,
                                            bool validate_geometry) {
  std::vector<std::string> problems;
  auto check = [&](const std::string& rel, const char* kind, auto loader) {
    const fs::path path = root / rel;
    if (rel.empty() || !fs::exists(path)) {
      problems.push_back(std::string("missing ") + kind + " file " + path.string());
      return;
    }
    try {
      const TriangleMesh mesh = loader(path);
      if (mesh.triangle_count() != r.triangle_count) {
        problems.push_back(std::string(kind) + " has " + std::to_string(mesh.triangle_count()) +
                           " triangles, record says " + std::to_string(r.triangle_count));
      } else if (!relative_close(mesh_volume(mesh), r.volume, 1e-6)) {
        problems.push_back(std::string(kind) + " volume differs from record");
      }
      if (validate_geometry) {
        for (const std::string& f : validate_mesh(mesh).failures()) {
          problems.push_back(std::string(kind) + ": " + f);
        }
      }
    } catch (const ParseError& e) {
      problems.push_back(std::string(kind) + " parse error: " + e.what() +
                         (e.byte_offset() >= 0 ? " (byte " + std::to_string(e.byte_offset()) + ")" : ""));
    } catch (const std::exception& e) {
      problems.push_back(std::string(kind) + ": " + e.what());
    }
  };
  check(r.stl_file, "STL", [](const fs::path& p) { return load_stl(p); });
  check(r.obj_file, "OBJ", [](const fs::path& p) { return load_obj(p); });
  return problems;
}

}  // namespace

const TaxonomyNode& taxonomy() {
  static const TaxonomyNode root = [] {
    TaxonomyNode node{"artifact", {}};
    for (const auto& entry : categories()) {
      TaxonomyNode cat{std::string(entry.category), {}};
      for (ObjectClass cls : entry.members) cat.children.push_back({std::string(class_name(cls)), {}});
      node.children.push_back(std::move(cat));
    }
    return node;
  }();
  return root;
}

std::vector<std::string> hierarchy_path(ObjectClass cls) {
  for (const auto& entry : categories()) {
    if (std::find(entry.members.begin(), entry.members.end(), cls) != entry.members.end()) {
      return {"artifact", std::string(entry.category), std::string(class_name(cls))};
    }
  }
  throw std::logic_error("class missing from taxonomy");
}

void to_json(json& j, const MeshParams& p) {
  j = json{{"class", class_name(p.object_class)}, {"seed", p.seed}, {"values", p.values}};
}

void from_json(const json& j, MeshParams& p) {
  p.object_class = class_from_name(j.at("class").get<std::string>());
  p.seed = j.at("seed").get<std::uint64_t>();
  p.values = j.at("values").get<std::map<std::string, double>>();
}

void to_json(json& j, const TaxonomyNode& n) {
  j = json{{"label", n.label}};
  if (!n.children.empty()) j["children"] = n.children;
}

void from_json(const json& j, TaxonomyNode& n) {
  n.label = j.at("label").get<std::string>();
  n.children = j.value("children", std::vector<TaxonomyNode>{});
}

void to_json(json& j, const ObjectRecord& r) {
  j = json{{"id", r.id},
           {"class_name", r.class_name},
           {"hierarchy_path", r.hierarchy_path},
           {"params", r.params},
           {"files", {{"stl", r.stl_file}, {"obj", r.obj_file}}},
           {"triangle_count", r.triangle_count},
           {"volume", r.volume}};
}

void from_json(const json& j, ObjectRecord& r) {
  r.id = j.at("id").get<std::string>();
  r.class_name = j.at("class_name").get<std::string>();
  r.hierarchy_path = j.at("hierarchy_path").get<std::vector<std::string>>();
  r.params = j.at("params").get<MeshParams>();
  r.stl_file = j.at("files").at("stl").get<std::string>();
  r.obj_file = j.at("files").at("obj").get<std::string>();
  r.triangle_count = j.at("triangle_count").get<std::size_t>();
  r.volume = j.at("volume").get<double>();
}

void to_json(json& j, const DatasetManifest& m) {
  j = json{{"format_version", m.format_version}, {"taxonomy", m.taxonomy}, {"objects", m.objects}};
}

void from_json(const json& j, DatasetManifest& m) {
  m.format_version = j.at("format_version").get<std::string>();
  m.taxonomy = j.at("taxonomy").get<TaxonomyNode>();
  m.objects = j.at("objects").get<std::vector<ObjectRecord>>();
}

const DatasetObject* Dataset::find(std::string_view id) const {
  for (const DatasetObject& obj : objects) {
    if (obj.record.id == id) return &obj;
  }
  return nullptr;
}

std::string object_id(ObjectClass cls, std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "_%04zu", index);
  return std::string(class_name(cls)) + buf;
}

std::uint64_t object_seed(std::uint64_t dataset_seed, std::size_t index) {
  return mix_seed(dataset_seed, index);
}

Dataset generate_dataset(std::span<const ObjectClass> classes, std::size_t count, std::uint64_t seed) {
  Dataset ds;
  ds.manifest.taxonomy = taxonomy();
  for (ObjectClass cls : classes) {
    for (std::size_t i = 0; i < count; ++i) {
      ObjectRecord rec;
      rec.id = object_id(cls, i);
      rec.class_name = std::string(class_name(cls));
      rec.hierarchy_path = hierarchy_path(cls);
      rec.params = sample_params(cls, object_seed(seed, i));
      auto mesh = std::make_shared<const TriangleMesh>(generate_object(rec.params));
      rec.triangle_count = mesh->triangle_count();
      rec.volume = mesh_volume(*mesh);
      ds.manifest.objects.push_back(rec);
      ds.objects.push_back({std::move(rec), std::move(mesh)});
    }
  }
  return ds;
}

DatasetManifest write_dataset(Dataset& dataset, const fs::path& root, StlFormat format) {
  const fs::path dir = root / kObjectsDirName;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  for (std::size_t i = 0; i < dataset.objects.size(); ++i) {
    DatasetObject& obj = dataset.objects[i];
    ObjectRecord& rec = obj.record;
    rec.stl_file = std::string(kObjectsDirName) + "/" + rec.id + ".stl";
    rec.obj_file = std::string(kObjectsDirName) + "/" + rec.id + ".obj";
    save_stl(*obj.mesh, root / rec.stl_file, format);
    save_obj(*obj.mesh, root / rec.obj_file);
    write_json_file(json(rec), dir / (rec.id + ".json"));
    dataset.manifest.objects[i] = rec;
  }
  DatasetManifest manifest = build_manifest(root);
  save_manifest(manifest, root / kManifestFileName);
  dataset.manifest = manifest;
  return manifest;
}

DatasetManifest build_manifest(const fs::path& root) {
  DatasetManifest manifest;
  manifest.taxonomy = taxonomy();
  std::set<std::string> seen;
  for (const fs::path& path : sidecar_paths(root)) {
    const std::string stem = path.stem().string();
    ObjectRecord rec;
    try {
      rec = read_json_file(path, stem).get<ObjectRecord>();
    } catch (const DatasetError&) {
      throw;
    } catch (const std::exception& e) {
      throw DatasetError(stem, std::string("bad record: ") + e.what());
    }
    if (!seen.insert(rec.id).second) throw DatasetError(rec.id, "duplicate object id");
    if (auto problems = record_label_problems(rec); !problems.empty()) {
      throw DatasetError(rec.id, problems.front());
    }
    if (auto problems = mesh_file_problems(root, rec, false); !problems.empty()) {
      throw DatasetError(rec.id, problems.front());
    }
    manifest.objects.push_back(std::move(rec));
  }
  return manifest;
}

void save_manifest(const DatasetManifest& manifest, const fs::path& path) {
  write_json_file(json(manifest), path);
}

DatasetManifest load_manifest(const fs::path& path) {
  try {
    return read_json_file(path, "").get<DatasetManifest>();
  } catch (const DatasetError&) {
    throw;
  } catch (const std::exception& e) {
    throw DatasetError("", "bad manifest " + path.string() + ": " + e.what());
  }
}

Dataset load_dataset(const fs::path& root) {
  Dataset ds;
  ds.manifest = load_manifest(root / kManifestFileName);
  std::set<std::string> seen;
  for (const ObjectRecord& rec : ds.manifest.objects) {
    if (!seen.insert(rec.id).second) throw DatasetError(rec.id, "duplicate object id");
    if (auto problems = record_label_problems(rec); !problems.empty()) {
      throw DatasetError(rec.id, problems.front());
    }
    try {
      auto mesh = std::make_shared<const TriangleMesh>(load_obj(root / rec.obj_file));
      if (mesh->triangle_count() != rec.triangle_count) {
        throw DatasetError(rec.id, "OBJ triangle count differs from record");
      }
      ds.objects.push_back({rec, std::move(mesh)});
    } catch (const DatasetError&) {
      throw;
    } catch (const std::exception& e) {
      throw DatasetError(rec.id, e.what());
    }
  }
  return ds;
}

std::vector<ObjectCheck> validate_dataset(const fs::path& root) {
  std::vector<ObjectCheck> checks;
  std::set<std::string> seen;
  for (const fs::path& path : sidecar_paths(root)) {
    ObjectCheck check{path.stem().string(), {}};
    ObjectRecord rec;
    try {
      rec = read_json_file(path, check.id).get<ObjectRecord>();
      check.id = rec.id;
    } catch (const std::exception& e) {
      check.problems.emplace_back(e.what());
      checks.push_back(std::move(check));
      continue;
    }
    if (!seen.insert(rec.id).second) check.problems.emplace_back("duplicate object id");
    for (auto& p : record_label_problems(rec)) check.problems.push_back(std::move(p));
    for (auto& p : mesh_file_problems(root, rec, true)) check.problems.push_back(std::move(p));
    checks.push_back(std::move(check));
  }
  return checks;
}

}  // namespace touchsim
