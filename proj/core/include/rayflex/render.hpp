#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "rayflex/bvh.hpp"
#include "rayflex/datapath.hpp"
#include "rayflex/fu_model.hpp"
#include "rayflex/mesh_io.hpp"
#include "rayflex/types.hpp"

namespace rayflex {

// Pinhole camera looking down -z at the scene's bounding sphere.
struct Camera {
  Vec3 eye;
  float tan_half_fov = 0.5f;
};

Camera frame_scene(std::span<const Triangle> triangles);
Ray camera_ray(const Camera& cam, int x, int y, int width, int height);

inline constexpr std::uint8_t kBackground[3] = {24, 24, 32};

struct RenderOptions {
  int width = 64;
  int height = 64;
  unsigned threads = 1;
  TraversalOptions traversal;
};

struct RenderResult {
  Image image;
  TraversalStats stats;
  FuInventory inventory;
  FuActivity activity;  // summed over the per-thread datapaths
  std::uint64_t hits = 0;
};

// Renders through the simulated datapath. Pixel rows are split into
// contiguous bands, one private Datapath per thread. A trace stream forces a
// single thread.
RenderResult render(std::span<const Triangle> triangles, const DatapathConfig& config,
                    const RenderOptions& options, std::ostream* trace = nullptr);

// Same image from the recursive golden traversal.
Image render_golden(std::span<const Triangle> triangles, const RenderOptions& options);

// Shading of a closest hit on tri: normalized barycentrics as RGB.
void shade(std::uint8_t* rgb, const Ray& ray, const Triangle& tri);

// Random triangle soup in [-1,1]^3, three quarters of it facing the default
// camera. Deterministic for a seed.
std::vector<Triangle> make_demo_scene(std::uint64_t seed, std::size_t count = 128);

// Closed tetrahedron, outward counter-clockwise winding.
std::vector<Triangle> make_tetrahedron();

}  // namespace rayflex
