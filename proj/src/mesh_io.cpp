#include "touchsim/mesh_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <string_view>
#include <vector>

namespace touchsim {

namespace {

static_assert(sizeof(float) == 4);

constexpr char kStlHeader[] = "touchsim binary STL";

std::uint32_t load_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

float load_f32_le(const unsigned char* p) { return std::bit_cast<float>(load_u32_le(p)); }

void store_u32_le(std::uint32_t v, char* out) {
  for (int i = 0; i < 4; ++i) out[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
}

void store_f32_le(float f, char* out) { store_u32_le(std::bit_cast<std::uint32_t>(f), out); }

std::array<float, 3> facet_normal(const std::array<Vec3, 3>& c) {
  const Vec3 n = cross(c[1] - c[0], c[2] - c[0]);
  const double len = norm(n);
  if (len == 0.0) return {0.f, 0.f, 0.f};
  return {static_cast<float>(n.x / len), static_cast<float>(n.y / len),
          static_cast<float>(n.z / len)};
}

// Rebuilds shared vertices from a triangle soup of float32 corners.
class Welder {
 public:
  std::uint32_t add(const std::array<float, 3>& p) {
    auto [it, inserted] = index_.try_emplace(p, static_cast<std::uint32_t>(mesh_.vertices.size()));
    if (inserted) mesh_.vertices.push_back({p[0], p[1], p[2]});
    return it->second;
  }
  void add_triangle(const std::array<std::array<float, 3>, 3>& corners) {
    mesh_.triangles.push_back({add(corners[0]), add(corners[1]), add(corners[2])});
  }
  TriangleMesh take() { return std::move(mesh_); }

 private:
  std::map<std::array<float, 3>, std::uint32_t> index_;
  TriangleMesh mesh_;
};

std::string slurp(std::istream& in) {
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

bool starts_with_solid(std::string_view data) {
  const auto pos = data.find_first_not_of(" \t\r\n");
  return pos != std::string_view::npos && data.substr(pos, 5) == "solid";
}

TriangleMesh parse_binary_stl(std::string_view data) {
  const auto* bytes = reinterpret_cast<const unsigned char*>(data.data());
  if (data.size() < kStlHeaderBytes + 4) {
    throw ParseError("STL: truncated header", static_cast<std::int64_t>(data.size()), -1);
  }
  const std::uint32_t count = load_u32_le(bytes + kStlHeaderBytes);
  Welder welder;
  std::size_t offset = kStlHeaderBytes + 4;
  for (std::uint32_t t = 0; t < count; ++t, offset += kStlTriangleBytes) {
    if (offset + kStlTriangleBytes > data.size()) {
      throw ParseError("STL: file declares " + std::to_string(count) +
                           " triangles but ends inside triangle " + std::to_string(t),
                       static_cast<std::int64_t>(offset), -1);
    }
    std::array<std::array<float, 3>, 3> corners;
    for (int c = 0; c < 3; ++c) {
      for (int k = 0; k < 3; ++k) {
        const float f = load_f32_le(bytes + offset + 12 + 12 * c + 4 * k);
        if (!std::isfinite(f)) {
          throw ParseError("STL: non-finite coordinate",
                           static_cast<std::int64_t>(offset + 12 + 12 * c + 4 * k), -1);
        }
        corners[c][k] = f == 0.0f ? 0.0f : f;  // fold -0 into +0
      }
    }
    welder.add_triangle(corners);
  }
  if (offset != data.size()) {
    throw ParseError("STL: trailing bytes after last triangle", static_cast<std::int64_t>(offset), -1);
  }
  return welder.take();
}

// Splits text into whitespace-separated tokens tagged with their line number.
struct Token {
  std::string_view text;
  std::int64_t line;
};

std::vector<Token> tokenize(std::string_view data) {
  std::vector<Token> tokens;
  std::int64_t line = 1;
  std::size_t i = 0;
  while (i < data.size()) {
    const char c = data[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
    } else {
      const std::size_t start = i;
      while (i < data.size() && data[i] != ' ' && data[i] != '\t' && data[i] != '\r' &&
             data[i] != '\n') {
        ++i;
      }
      tokens.push_back({data.substr(start, i - start), line});
    }
  }
  return tokens;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

TriangleMesh parse_ascii_stl(std::string_view data) {
  const std::vector<Token> tokens = tokenize(data);
  std::size_t pos = 0;
  auto fail = [&](const std::string& what) -> ParseError {
    const std::int64_t line = pos < tokens.size() ? tokens[pos].line
                                                  : (tokens.empty() ? 1 : tokens.back().line);
    return ParseError("STL: " + what + " at line " + std::to_string(line), -1, line);
  };
  auto expect = [&](std::string_view word) {
    if (pos >= tokens.size() || tokens[pos].text != word) {
      throw fail("expected '" + std::string(word) + "'");
    }
    ++pos;
  };
  auto number = [&]() {
    float v;
    if (pos >= tokens.size() || !parse_number(tokens[pos].text, v) || !std::isfinite(v)) {
      throw fail("expected a number");
    }
    ++pos;
    return v == 0.0f ? 0.0f : v;
  };

  expect("solid");
  // Optional solid name runs until the first facet/endsolid keyword.
  while (pos < tokens.size() && tokens[pos].text != "facet" && tokens[pos].text != "endsolid") ++pos;
  Welder welder;
  while (pos < tokens.size() && tokens[pos].text == "facet") {
    ++pos;
    expect("normal");
    for (int k = 0; k < 3; ++k) number();
    expect("outer");
    expect("loop");
    std::array<std::array<float, 3>, 3> corners;
    for (auto& corner : corners) {
      expect("vertex");
      for (auto& coord : corner) coord = number();
    }
    expect("endloop");
    expect("endfacet");
    welder.add_triangle(corners);
  }
  expect("endsolid");
  return welder.take();
}

std::string format_float(float v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

void write_stl(const TriangleMesh& mesh, std::ostream& out, StlFormat format) {
  if (format == StlFormat::kAscii) {
    out << "solid touchsim\n";
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
      const auto c = mesh.corners(t);
      const auto n = facet_normal(c);
      out << "  facet normal " << format_float(n[0]) << ' ' << format_float(n[1]) << ' '
          << format_float(n[2]) << "\n    outer loop\n";
      for (const Vec3& v : c) {
        out << "      vertex " << format_float(static_cast<float>(v.x)) << ' '
            << format_float(static_cast<float>(v.y)) << ' ' << format_float(static_cast<float>(v.z))
            << '\n';
      }
      out << "    endloop\n  endfacet\n";
    }
    out << "endsolid touchsim\n";
    return;
  }

  char header[kStlHeaderBytes] = {};
  std::memcpy(header, kStlHeader, sizeof(kStlHeader) - 1);
  out.write(header, sizeof(header));
  char count[4];
  store_u32_le(static_cast<std::uint32_t>(mesh.triangles.size()), count);
  out.write(count, 4);
  char record[kStlTriangleBytes];
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto c = mesh.corners(t);
    const auto n = facet_normal(c);
    for (int k = 0; k < 3; ++k) store_f32_le(n[k], record + 4 * k);
    for (int v = 0; v < 3; ++v) {
      for (int k = 0; k < 3; ++k) store_f32_le(static_cast<float>(c[v][k]), record + 12 + 12 * v + 4 * k);
    }
    record[48] = record[49] = 0;
    out.write(record, sizeof(record));
  }
}

TriangleMesh read_stl(std::istream& in) {
  const std::string data = slurp(in);
  if (starts_with_solid(data)) {
    // Some binary writers start their header with "solid"; trust the size.
    if (data.size() >= kStlHeaderBytes + 4) {
      const auto count = load_u32_le(reinterpret_cast<const unsigned char*>(data.data()) + kStlHeaderBytes);
      if (data.size() == kStlHeaderBytes + 4 + std::size_t{count} * kStlTriangleBytes) {
        return parse_binary_stl(data);
      }
    }
    return parse_ascii_stl(data);
  }
  return parse_binary_stl(data);
}

void write_obj(const TriangleMesh& mesh, std::ostream& out) {
  out << "# touchsim mesh: " << mesh.vertices.size() << " vertices, " << mesh.triangles.size()
      << " triangles\n";
  for (const Vec3& v : mesh.vertices) {
    out << "v " << format_double(v.x) << ' ' << format_double(v.y) << ' ' << format_double(v.z) << '\n';
  }
  for (const Triangle& t : mesh.triangles) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
}

TriangleMesh read_obj(std::istream& in) {
  TriangleMesh mesh;
  std::string line;
  std::int64_t line_no = 0;
  std::vector<std::uint32_t> face;
  auto fail = [&](const std::string& what) {
    return ParseError("OBJ: " + what + " at line " + std::to_string(line_no), -1, line_no);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::vector<Token> tokens = tokenize(line);
    if (tokens.empty() || tokens[0].text.front() == '#') continue;
    const std::string_view kind = tokens[0].text;
    if (kind == "v") {
      if (tokens.size() < 4 || tokens.size() > 5) throw fail("vertex needs 3 coordinates");
      Vec3 v;
      for (int k = 0; k < 3; ++k) {
        if (!parse_number(tokens[1 + k].text, v[k]) || !std::isfinite(v[k])) {
          throw fail("bad vertex coordinate '" + std::string(tokens[1 + k].text) + "'");
        }
      }
      mesh.vertices.push_back(v);
    } else if (kind == "f") {
      if (tokens.size() < 4) throw fail("face needs at least 3 vertices");
      face.clear();
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        std::string_view ref = tokens[i].text;
        ref = ref.substr(0, ref.find('/'));
        std::int64_t idx;
        if (!parse_number(ref, idx) || idx == 0) {
          throw fail("bad face index '" + std::string(tokens[i].text) + "'");
        }
        const auto count = static_cast<std::int64_t>(mesh.vertices.size());
        const std::int64_t zero_based = idx > 0 ? idx - 1 : count + idx;
        if (zero_based < 0 || zero_based >= count) {
          throw fail("face index " + std::to_string(idx) + " out of range");
        }
        face.push_back(static_cast<std::uint32_t>(zero_based));
      }
      for (std::size_t k = 1; k + 1 < face.size(); ++k) {
        mesh.triangles.push_back({face[0], face[k], face[k + 1]});
      }
    }
  }
  if (in.bad()) throw ParseError("OBJ: read failure", -1, line_no);
  return mesh;
}

void save_stl(const TriangleMesh& mesh, const std::filesystem::path& path, StlFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_stl(mesh, out, format);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

TriangleMesh load_stl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_stl(in);
}

void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_obj(mesh, out);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

TriangleMesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_obj(in);
}

}  // namespace touchsim
