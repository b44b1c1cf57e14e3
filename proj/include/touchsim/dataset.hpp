#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "touchsim/mesh.hpp"
#include "touchsim/mesh_io.hpp"
#include "touchsim/meshgen.hpp"

namespace touchsim {

inline constexpr const char* kManifestFormatVersion = "1.0";
inline constexpr const char* kManifestFileName = "manifest.json";
inline constexpr const char* kObjectsDirName = "objects";

// Dataset problem tied to one object record (empty id when not).
class DatasetError : public std::runtime_error {
 public:
  DatasetError(std::string object_id, const std::string& what)
      : std::runtime_error(object_id.empty() ? what : object_id + ": " + what),
        object_id_(std::move(object_id)) {}
  const std::string& object_id() const { return object_id_; }

 private:
  std::string object_id_;
};

struct TaxonomyNode {
  std::string label;
  std::vector<TaxonomyNode> children;
};

// Fixed three-level class tree: artifact -> category -> class.
const TaxonomyNode& taxonomy();
std::vector<std::string> hierarchy_path(ObjectClass cls);

struct ObjectRecord {
  std::string id;
  std::string class_name;
  std::vector<std::string> hierarchy_path;
  MeshParams params;
  std::string stl_file;  // relative to the dataset root
  std::string obj_file;
  std::size_t triangle_count = 0;
  double volume = 0.0;
};

struct DatasetManifest {
  std::string format_version = kManifestFormatVersion;
  std::vector<ObjectRecord> objects;
  TaxonomyNode taxonomy;
};

void to_json(nlohmann::json& j, const MeshParams& p);
void from_json(const nlohmann::json& j, MeshParams& p);
void to_json(nlohmann::json& j, const TaxonomyNode& n);
void from_json(const nlohmann::json& j, TaxonomyNode& n);
void to_json(nlohmann::json& j, const ObjectRecord& r);
void from_json(const nlohmann::json& j, ObjectRecord& r);
void to_json(nlohmann::json& j, const DatasetManifest& m);
void from_json(const nlohmann::json& j, DatasetManifest& m);

struct DatasetObject {
  ObjectRecord record;
  std::shared_ptr<const TriangleMesh> mesh;
};

struct Dataset {
  DatasetManifest manifest;
  std::vector<DatasetObject> objects;  // parallel to manifest.objects

  const DatasetObject* find(std::string_view id) const;
};

std::string object_id(ObjectClass cls, std::size_t index);
std::uint64_t object_seed(std::uint64_t dataset_seed, std::size_t index);

// `count` objects per class, generated in memory (no files referenced).
Dataset generate_dataset(std::span<const ObjectClass> classes, std::size_t count,
                         std::uint64_t seed);

// Writes objects/<id>.{stl,obj,json} and manifest.json under root.
DatasetManifest write_dataset(Dataset& dataset, const std::filesystem::path& root,
                              StlFormat format = StlFormat::kBinary);

// Scans root/objects/*.json sidecars, checks ids are unique, classes and
// hierarchy paths match the taxonomy, and both mesh files parse back to the
// recorded triangle count and volume.
DatasetManifest build_manifest(const std::filesystem::path& root);

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest load_manifest(const std::filesystem::path& path);

// Reads manifest.json and the OBJ meshes it references.
Dataset load_dataset(const std::filesystem::path& root);

struct ObjectCheck {
  std::string id;
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

// Per-object validation of every sidecar under root/objects, collecting all
// problems instead of stopping at the first.
std::vector<ObjectCheck> validate_dataset(const std::filesystem::path& root);

}  // namespace touchsim
