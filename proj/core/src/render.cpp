#include "rayflex/render.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>
#include <unordered_map>

#include "rayflex/kernels.hpp"

namespace rayflex {

namespace {

constexpr float kRayExtent = 1e30f;

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
}

void fill_background(Image& img) {
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) std::copy_n(kBackground, 3, img.pixel(x, y));
  }
}

std::unordered_map<std::uint32_t, std::size_t> index_by_id(std::span<const Triangle> triangles) {
  std::unordered_map<std::uint32_t, std::size_t> m;
  for (std::size_t i = 0; i < triangles.size(); ++i) m.emplace(triangles[i].id, i);
  return m;
}

}  // namespace

Camera frame_scene(std::span<const Triangle> triangles) {
  Camera cam;
  if (triangles.empty()) {
    cam.eye = {0.0f, 0.0f, 3.0f};
    return cam;
  }
  Aabb b = bounds_of(triangles[0]);
  for (const auto& t : triangles) {
    const Aabb tb = bounds_of(t);
    for (int a = 0; a < 3; ++a) {
      b.lo[a] = std::min(b.lo[a], tb.lo[a]);
      b.hi[a] = std::max(b.hi[a], tb.hi[a]);
    }
  }
  const double cx = 0.5 * (static_cast<double>(b.lo.x) + b.hi.x);
  const double cy = 0.5 * (static_cast<double>(b.lo.y) + b.hi.y);
  const double dx = static_cast<double>(b.hi.x) - b.lo.x;
  const double dy = static_cast<double>(b.hi.y) - b.lo.y;
  const double dz = static_cast<double>(b.hi.z) - b.lo.z;
  const double radius = std::max(0.5 * std::sqrt(dx * dx + dy * dy + dz * dz), 1e-3);
  const double cz = 0.5 * (static_cast<double>(b.lo.z) + b.hi.z);
  cam.tan_half_fov = 0.5f;
  cam.eye = {static_cast<float>(cx), static_cast<float>(cy), static_cast<float>(cz + 2.3 * radius)};
  return cam;
}

Ray camera_ray(const Camera& cam, int x, int y, int width, int height) {
  const double aspect = static_cast<double>(width) / height;
  const double sx = (2.0 * (x + 0.5) / width - 1.0) * cam.tan_half_fov * aspect;
  const double sy = (1.0 - 2.0 * (y + 0.5) / height) * cam.tan_half_fov;
  return precompute_ray_transform(cam.eye, {static_cast<float>(sx), static_cast<float>(sy), -1.0f}, kRayExtent);
}

void shade(std::uint8_t* rgb, const Ray& ray, const Triangle& tri) {
  const Barycentrics b = watertight_barycentrics(ray, tri);
  const double det = b.det;
  rgb[0] = to_byte(b.u / det);
  rgb[1] = to_byte(b.v / det);
  rgb[2] = to_byte(b.w / det);
}

RenderResult render(std::span<const Triangle> triangles, const DatapathConfig& config,
                    const RenderOptions& options, std::ostream* trace) {
  RenderResult result;
  result.image = Image(options.width, options.height);
  result.inventory = make_inventory(config.feature_set, config.fu_sharing);
  fill_background(result.image);
  if (triangles.empty()) return result;

  const Bvh bvh = Bvh::build(triangles);
  const auto ids = index_by_id(triangles);
  const Camera cam = frame_scene(triangles);

  const unsigned threads =
      trace ? 1u : std::clamp<unsigned>(options.threads, 1u, static_cast<unsigned>(options.height));
  struct Band {
    int y0 = 0;
    int y1 = 0;
    TraversalStats stats;
    FuActivity activity;
    std::uint64_t hits = 0;
  };
  std::vector<Band> bands(threads);
  for (unsigned t = 0; t < threads; ++t) {
    bands[t].y0 = static_cast<int>(static_cast<long>(options.height) * t / threads);
    bands[t].y1 = static_cast<int>(static_cast<long>(options.height) * (t + 1) / threads);
  }

  auto work = [&](Band& band) {
    Datapath dp(config);
    if (trace) dp.set_trace(trace);
    std::vector<Ray> rays;
    for (int y = band.y0; y < band.y1; ++y) {
      for (int x = 0; x < options.width; ++x) rays.push_back(camera_ray(cam, x, y, options.width, options.height));
    }
    const auto hits = trace_rays(rays, bvh, dp, options.traversal);
    for (std::size_t i = 0; i < hits.size(); ++i) {
      band.stats += hits[i].stats;
      if (!hits[i].hit.hit) continue;
      ++band.hits;
      const int x = static_cast<int>(i % options.width);
      const int y = band.y0 + static_cast<int>(i / options.width);
      shade(result.image.pixel(x, y), rays[i], triangles[ids.at(hits[i].hit.triangle_id)]);
    }
    band.activity = dp.activity();
  };

  if (threads == 1) {
    work(bands[0]);
  } else {
    std::vector<std::thread> pool;
    for (auto& band : bands) pool.emplace_back(work, std::ref(band));
    for (auto& th : pool) th.join();
  }

  for (const auto& band : bands) {
    result.stats += band.stats;
    result.activity.merge(band.activity);
    result.hits += band.hits;
  }
  return result;
}

Image render_golden(std::span<const Triangle> triangles, const RenderOptions& options) {
  Image img(options.width, options.height);
  fill_background(img);
  if (triangles.empty()) return img;

  const Bvh bvh = Bvh::build(triangles);
  const auto ids = index_by_id(triangles);
  const Camera cam = frame_scene(triangles);
  for (int y = 0; y < options.height; ++y) {
    for (int x = 0; x < options.width; ++x) {
      const Ray ray = camera_ray(cam, x, y, options.width, options.height);
      const TraceResult r = trace_ray_golden(ray, bvh, options.traversal);
      if (r.hit.hit) shade(img.pixel(x, y), ray, triangles[ids.at(r.hit.triangle_id)]);
    }
  }
  return img;
}

std::vector<Triangle> make_demo_scene(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  auto unit = [&rng] { return static_cast<float>(static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0); };

  std::vector<Triangle> tris;
  tris.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Vec3 c{unit(), unit(), unit()};
    const float size = 0.15f + 0.2f * (unit() + 1.0f);
    Triangle t;
    t.v0 = {c.x + size * unit(), c.y + size * unit(), c.z + 0.3f * size * unit()};
    t.v1 = {c.x + size * unit(), c.y + size * unit(), c.z + 0.3f * size * unit()};
    t.v2 = {c.x + size * unit(), c.y + size * unit(), c.z + 0.3f * size * unit()};
    t.id = static_cast<std::uint32_t>(i);
    // Front faces for a camera on +z have a normal with negative z.
    const double ex = static_cast<double>(t.v1.x) - t.v0.x;
    const double ey = static_cast<double>(t.v1.y) - t.v0.y;
    const double fx = static_cast<double>(t.v2.x) - t.v0.x;
    const double fy = static_cast<double>(t.v2.y) - t.v0.y;
    const bool front = ex * fy - ey * fx < 0.0;
    if (front != (i % 4 != 3)) std::swap(t.v1, t.v2);
    tris.push_back(t);
  }
  return tris;
}

std::vector<Triangle> make_tetrahedron() {
  const Vec3 a{0.0f, 1.0f, 0.0f};
  const Vec3 b{-1.0f, -0.6f, 0.6f};
  const Vec3 c{1.0f, -0.6f, 0.6f};
  const Vec3 d{0.0f, -0.6f, -1.0f};
  return {{a, b, c, 0}, {a, c, d, 1}, {a, d, b, 2}, {b, d, c, 3}};
}

}  // namespace rayflex
