#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "touchsim/mesh.hpp"

namespace touchsim {

// Malformed mesh file. Binary formats report a byte offset, text formats a
// 1-based line number; the other field is -1.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::int64_t byte_offset, std::int64_t line)
      : std::runtime_error(what), byte_offset_(byte_offset), line_(line) {}

  std::int64_t byte_offset() const { return byte_offset_; }
  std::int64_t line() const { return line_; }

 private:
  std::int64_t byte_offset_;
  std::int64_t line_;
};

enum class StlFormat { kBinary, kAscii };

inline constexpr std::size_t kStlHeaderBytes = 80;
inline constexpr std::size_t kStlTriangleBytes = 50;

// Binary STL: 80-byte header, uint32 LE triangle count, then per triangle
// 12 float32 LE (normal, three corners) and a zero uint16 attribute.
void write_stl(const TriangleMesh& mesh, std::ostream& out, StlFormat format = StlFormat::kBinary);
// Detects binary vs ASCII. Coincident float32 corners are welded back into
// shared vertices in first-seen order.
TriangleMesh read_stl(std::istream& in);

// `v x y z` and `f a b c` records with 1-based indices. Vertices are written
// with round-trip precision.
void write_obj(const TriangleMesh& mesh, std::ostream& out);
// Accepts `f` records with v/vt/vn forms, negative indices and polygons
// (fan-triangulated); other record types are ignored.
TriangleMesh read_obj(std::istream& in);

// File wrappers; I/O failures throw std::runtime_error naming the path.
void save_stl(const TriangleMesh& mesh, const std::filesystem::path& path,
              StlFormat format = StlFormat::kBinary);
TriangleMesh load_stl(const std::filesystem::path& path);
void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path);
TriangleMesh load_obj(const std::filesystem::path& path);

}  // namespace touchsim
