#include <filesystem>
#include <fstream>
#include <set>

#include <gtest/gtest.h>

#include "touchsim/dataset.hpp"

using namespace touchsim;
namespace fs = std::filesystem;

namespace {

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() / (std::string("touchsim_ds_") + info->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }
  fs::path root_;
};

std::set<std::string> leaves(const TaxonomyNode& n) {
  if (n.children.empty()) return {n.label};
  std::set<std::string> out;
  for (const auto& c : n.children) out.merge(leaves(c));
  return out;
}

std::size_t depth(const TaxonomyNode& n) {
  std::size_t d = 0;
  for (const auto& c : n.children) d = std::max(d, depth(c));
  return d + 1;
}

}  // namespace

TEST(Taxonomy, ThreeLevelsCoveringAllClasses) {
  const TaxonomyNode& t = taxonomy();
  EXPECT_EQ(t.label, "artifact");
  EXPECT_EQ(depth(t), 3u);
  const auto l = leaves(t);
  EXPECT_EQ(l.size(), kClassCount);
  for (ObjectClass cls : all_classes()) {
    EXPECT_TRUE(l.count(std::string(class_name(cls))));
    const auto path = hierarchy_path(cls);
    ASSERT_EQ(path.size(), 3u);
    EXPECT_EQ(path.front(), "artifact");
    EXPECT_EQ(path.back(), class_name(cls));
  }
  EXPECT_EQ(hierarchy_path(ObjectClass::kCup)[1], "container");
  EXPECT_EQ(hierarchy_path(ObjectClass::kHammer)[1], "tool");
}

TEST(GenerateDataset, IdsAndDeterminism) {
  const ObjectClass classes[] = {ObjectClass::kCube, ObjectClass::kBowl};
  const Dataset a = generate_dataset(classes, 3, 11);
  const Dataset b = generate_dataset(classes, 3, 11);
  ASSERT_EQ(a.objects.size(), 6u);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < a.objects.size(); ++i) {
    ids.insert(a.objects[i].record.id);
    EXPECT_EQ(*a.objects[i].mesh, *b.objects[i].mesh);
    EXPECT_EQ(a.objects[i].record.params, b.objects[i].record.params);
  }
  EXPECT_EQ(ids.size(), 6u);
  EXPECT_NE(a.find("cube_0000"), nullptr);
  EXPECT_EQ(a.find("cube_0099"), nullptr);
  const Dataset c = generate_dataset(classes, 3, 12);
  EXPECT_NE(c.objects[0].record.params, a.objects[0].record.params);
}

TEST_F(TempDir, EmptyDirectoryGivesEmptyManifest) {
  const DatasetManifest m = build_manifest(root_);
  EXPECT_TRUE(m.objects.empty());
  EXPECT_EQ(m.format_version, kManifestFormatVersion);
  EXPECT_EQ(leaves(m.taxonomy).size(), kClassCount);
}

TEST_F(TempDir, AllClassesTwoEachRoundTrip) {
  Dataset ds = generate_dataset(all_classes(), 2, 5);
  const DatasetManifest m = write_dataset(ds, root_);
  ASSERT_EQ(m.objects.size(), 26u);
  std::set<std::string> classes;
  for (const auto& r : m.objects) {
    classes.insert(r.class_name);
    EXPECT_TRUE(fs::exists(root_ / r.stl_file));
    EXPECT_TRUE(fs::exists(root_ / r.obj_file));
    EXPECT_EQ(r.hierarchy_path.back(), r.class_name);
  }
  EXPECT_EQ(classes.size(), kClassCount);

  // Files parse back to identical meshes (OBJ is exact; STL is float32).
  const Dataset back = load_dataset(root_);
  ASSERT_EQ(back.objects.size(), ds.objects.size());
  for (const auto& obj : back.objects) {
    const DatasetObject* orig = ds.find(obj.record.id);
    ASSERT_NE(orig, nullptr);
    EXPECT_EQ(*obj.mesh, *orig->mesh);
    const TriangleMesh stl = load_stl(root_ / obj.record.stl_file);
    ASSERT_EQ(stl.triangle_count(), orig->mesh->triangle_count());
    for (std::uint32_t t = 0; t < stl.triangle_count(); ++t) {
      const auto got = stl.corners(t);
      const auto want = orig->mesh->corners(t);
      for (int c = 0; c < 3; ++c) EXPECT_LT(norm(got[c] - want[c]), 1e-6) << obj.record.id << " " << t;
    }
    EXPECT_NEAR(mesh_volume(stl) / obj.record.volume, 1.0, 1e-6);
  }

  const DatasetManifest reloaded = load_manifest(root_ / kManifestFileName);
  EXPECT_EQ(nlohmann::json(reloaded), nlohmann::json(m));

  for (const auto& c : validate_dataset(root_)) EXPECT_TRUE(c.ok()) << c.id;
}

TEST_F(TempDir, CorruptStlNamesTheRecord) {
  const ObjectClass classes[] = {ObjectClass::kSphere};
  Dataset ds = generate_dataset(classes, 3, 1);
  write_dataset(ds, root_);
  const fs::path victim = root_ / "objects" / "sphere_0001.stl";
  fs::resize_file(victim, fs::file_size(victim) - 30);
  try {
    build_manifest(root_);
    FAIL() << "expected DatasetError";
  } catch (const DatasetError& e) {
    EXPECT_EQ(e.object_id(), "sphere_0001");
    EXPECT_NE(std::string(e.what()).find("sphere_0001"), std::string::npos);
  }
  const auto checks = validate_dataset(root_);
  std::size_t bad = 0;
  for (const auto& c : checks) {
    if (!c.ok()) {
      ++bad;
      EXPECT_EQ(c.id, "sphere_0001");
    }
  }
  EXPECT_EQ(bad, 1u);
}

TEST_F(TempDir, MissingFileIsReported) {
  const ObjectClass classes[] = {ObjectClass::kCube};
  Dataset ds = generate_dataset(classes, 2, 1);
  write_dataset(ds, root_);
  fs::remove(root_ / "objects" / "cube_0000.obj");
  EXPECT_THROW(build_manifest(root_), DatasetError);
  EXPECT_THROW(load_dataset(root_), DatasetError);
}

TEST_F(TempDir, DuplicateIdRejected) {
  const ObjectClass classes[] = {ObjectClass::kCube};
  Dataset ds = generate_dataset(classes, 1, 1);
  write_dataset(ds, root_);
  fs::copy_file(root_ / "objects" / "cube_0000.json", root_ / "objects" / "copy.json");
  try {
    build_manifest(root_);
    FAIL() << "expected DatasetError";
  } catch (const DatasetError& e) {
    EXPECT_EQ(e.object_id(), "cube_0000");
  }
}

TEST_F(TempDir, WrongHierarchyRejected) {
  const ObjectClass classes[] = {ObjectClass::kCube};
  Dataset ds = generate_dataset(classes, 1, 1);
  write_dataset(ds, root_);
  const fs::path sidecar = root_ / "objects" / "cube_0000.json";
  nlohmann::json j = nlohmann::json::parse(std::ifstream(sidecar));
  j["hierarchy_path"] = {"artifact", "container", "cube"};
  std::ofstream(sidecar) << j.dump();
  EXPECT_THROW(build_manifest(root_), DatasetError);
}

TEST(ManifestJson, RecordShape) {
  const ObjectClass classes[] = {ObjectClass::kCup};
  const Dataset ds = generate_dataset(classes, 1, 0);
  const nlohmann::json j = ds.manifest.objects.at(0);
  for (const char* key : {"id", "class_name", "hierarchy_path", "params", "files", "triangle_count", "volume"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j.at("params").at("class"), "cup");
  EXPECT_EQ(j.get<ObjectRecord>().params, ds.manifest.objects[0].params);
}
