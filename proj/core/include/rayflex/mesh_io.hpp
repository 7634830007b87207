#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rayflex/types.hpp"

namespace rayflex {

struct Mesh {
  std::vector<Triangle> triangles;  // ids are 0..n-1 in file order
  std::vector<std::string> warnings;
};

// OBJ subset: "v x y z" and triangular "f i j k" records (1-based or
// negative indices; "i/t/n" tokens use the vertex index). Other records are
// skipped with a warning. Throws ParseError with the line number.
Mesh read_obj(std::istream& in, const std::string& source = "<obj>");
Mesh load_obj(const std::filesystem::path& path);

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

  Image() = default;
  Image(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0) {}

  std::uint8_t* pixel(int x, int y) { return &rgb[(static_cast<std::size_t>(y) * width + x) * 3]; }
  const std::uint8_t* pixel(int x, int y) const {
    return &rgb[(static_cast<std::size_t>(y) * width + x) * 3];
  }
};

// Binary PPM (P6, maxval 255).
void write_ppm(std::ostream& out, const Image& image);
void save_ppm(const std::filesystem::path& path, const Image& image);
Image read_ppm(std::istream& in, const std::string& source = "<ppm>");

// One vector per non-empty line, comma-separated floats; '#' starts a
// comment line. All rows must have the same dimension.
std::vector<std::vector<float>> read_vectors_csv(std::istream& in, const std::string& source = "<csv>");
std::vector<std::vector<float>> load_vectors_csv(const std::filesystem::path& path);

}  // namespace rayflex
