#include "rayflex/mesh_io.hpp"

#include <array>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "rayflex/errors.hpp"

namespace rayflex {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return in;
}

bool parse_float(std::string_view s, float& out) {
  std::string tmp(s);
  char* end = nullptr;
  out = std::strtof(tmp.c_str(), &end);
  return !tmp.empty() && end == tmp.c_str() + tmp.size();
}

bool parse_int(std::string_view s, long& out) {
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Mesh read_obj(std::istream& in, const std::string& source) {
  Mesh mesh;
  std::vector<Vec3> vertices;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;

    std::vector<std::string> fields;
    for (std::string f; ls >> f;) fields.push_back(f);

    if (tag == "v") {
      if (fields.size() < 3 || fields.size() > 4) throw ParseError(source, lineno, "v needs 3 coordinates");
      Vec3 v;
      for (int a = 0; a < 3; ++a) {
        if (!parse_float(fields[a], v[a])) throw ParseError(source, lineno, "bad coordinate '" + fields[a] + "'");
      }
      vertices.push_back(v);
    } else if (tag == "f") {
      if (fields.size() != 3) {
        throw ParseError(source, lineno, "only triangular faces are supported");
      }
      std::array<Vec3, 3> corner;
      for (int k = 0; k < 3; ++k) {
        const std::string_view tok = std::string_view(fields[k]).substr(0, fields[k].find('/'));
        long idx = 0;
        if (!parse_int(tok, idx) || idx == 0) throw ParseError(source, lineno, "bad vertex index '" + fields[k] + "'");
        const long n = static_cast<long>(vertices.size());
        const long zero_based = idx > 0 ? idx - 1 : n + idx;
        if (zero_based < 0 || zero_based >= n) {
          throw ParseError(source, lineno, "vertex index " + std::to_string(idx) + " out of range");
        }
        corner[k] = vertices[static_cast<std::size_t>(zero_based)];
      }
      mesh.triangles.push_back(
          {corner[0], corner[1], corner[2], static_cast<std::uint32_t>(mesh.triangles.size())});
    } else {
      mesh.warnings.push_back(source + ":" + std::to_string(lineno) + ": ignored record '" + tag + "'");
    }
  }
  return mesh;
}

Mesh load_obj(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_obj(in, path.string());
}

void write_ppm(std::ostream& out, const Image& image) {
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.rgb.data()), static_cast<std::streamsize>(image.rgb.size()));
}

void save_ppm(const std::filesystem::path& path, const Image& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path.string(), 0, "cannot open for writing");
  write_ppm(out, image);
}

Image read_ppm(std::istream& in, const std::string& source) {
  std::string magic;
  int w = 0;
  int h = 0;
  int maxval = 0;
  if (!(in >> magic >> w >> h >> maxval) || magic != "P6" || maxval != 255 || w <= 0 || h <= 0) {
    throw ParseError(source, 0, "not an 8-bit P6 image");
  }
  in.get();
  Image img(w, h);
  in.read(reinterpret_cast<char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.rgb.size())) throw ParseError(source, 0, "truncated pixel data");
  return img;
}

std::vector<std::vector<float>> read_vectors_csv(std::istream& in, const std::string& source) {
  std::vector<std::vector<float>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::vector<float> row;
    std::size_t pos = 0;
    while (true) {
      const auto comma = body.find(',', pos);
      const std::string_view cell = trim(body.substr(pos, comma == std::string_view::npos ? body.npos : comma - pos));
      float v = 0;
      if (!parse_float(cell, v)) throw ParseError(source, lineno, "bad number '" + std::string(cell) + "'");
      row.push_back(v);
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(source, lineno,
                       "expected " + std::to_string(rows.front().size()) + " values, got " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::vector<float>> load_vectors_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_vectors_csv(in, path.string());
}

}  // namespace rayflex
