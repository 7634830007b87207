#include "rayflex/kernels.hpp"

#include <cmath>
#include <limits>

#include "rayflex/errors.hpp"
#include "rayflex/fp.hpp"

namespace rayflex {

Ray precompute_ray_transform(const Vec3& origin, const Vec3& dir, float extent) {
  if (dir.x == 0.0f && dir.y == 0.0f && dir.z == 0.0f) {
    throw DomainError("precompute_ray_transform: zero direction vector");
  }

  Ray ray;
  ray.origin = origin;
  ray.dir = dir;
  ray.extent = extent;
  for (int axis = 0; axis < 3; ++axis) {
    ray.inv_dir[axis] = 1.0f / dir[axis];
  }

  int kz = 2;
  if (std::fabs(dir.y) > std::fabs(dir[kz])) kz = 1;
  if (std::fabs(dir.x) > std::fabs(dir[kz])) kz = 0;
  int kx = (kz + 1) % 3;
  int ky = (kx + 1) % 3;
  if (dir[kz] < 0.0f) std::swap(kx, ky);

  ray.kx = kx;
  ray.ky = ky;
  ray.kz = kz;
  ray.shear = {dir[kx] / dir[kz], dir[ky] / dir[kz], 1.0f / dir[kz]};
  return ray;
}

SlabResult slab_box_test(const Ray& ray, const Aabb& box, float t_beg, float t_end) {
  Vec3 near;
  Vec3 far;
  for (int axis = 0; axis < 3; ++axis) {
    const float lo = fp::sub(box.lo[axis], ray.origin[axis]);
    const float hi = fp::sub(box.hi[axis], ray.origin[axis]);
    const float t_lo = fp::mul(lo, ray.inv_dir[axis]);
    const float t_hi = fp::mul(hi, ray.inv_dir[axis]);
    near[axis] = fp::min(t_lo, t_hi);
    far[axis] = fp::max(t_lo, t_hi);
  }
  SlabResult r;
  r.tmin = fp::max(fp::max(near.x, near.y), fp::max(near.z, t_beg));
  r.tmax = fp::min(fp::min(far.x, far.y), fp::min(far.z, t_end));
  r.hit = fp::le(r.tmin, r.tmax);
  return r;
}

BoxResult quad_box_test(const Ray& ray, std::span<const Aabb, kBoxesPerJob> boxes,
                        std::span<const NodeRef, kBoxesPerJob> ptrs) {
  std::array<SlabResult, kBoxesPerJob> slabs;
  std::array<float, kBoxesPerJob> keys;
  for (std::size_t i = 0; i < kBoxesPerJob; ++i) {
    slabs[i] = slab_box_test(ray, boxes[i], 0.0f, ray.extent);
    keys[i] = slabs[i].hit ? slabs[i].tmin : std::numeric_limits<float>::infinity();
  }

  BoxResult out;
  out.order = sort4(keys);
  for (std::size_t i = 0; i < kBoxesPerJob; ++i) {
    const auto src = out.order[i];
    out.hit[i] = slabs[src].hit;
    out.tmin[i] = slabs[src].tmin;
    out.child_ptr_sorted[i] = ptrs[src];
  }
  return out;
}

namespace {

struct Sheared {
  float ax, ay, bx, by, cx, cy;  // 2D coordinates after shear
  float az, bz, cz;              // scaled z coordinates
};

// Front faces are counter-clockwise seen from the ray origin, so the
// barycentric formulas take B from v2 and C from v1. The mutant uses the
// opposite assignment and therefore accepts back faces.
Sheared shear_triangle(const Ray& ray, const Triangle& tri, Culling culling) {
  const Vec3& vb = culling == Culling::Backface ? tri.v2 : tri.v1;
  const Vec3& vc = culling == Culling::Backface ? tri.v1 : tri.v2;

  const Vec3 a{fp::sub(tri.v0.x, ray.origin.x), fp::sub(tri.v0.y, ray.origin.y),
               fp::sub(tri.v0.z, ray.origin.z)};
  const Vec3 b{fp::sub(vb.x, ray.origin.x), fp::sub(vb.y, ray.origin.y),
               fp::sub(vb.z, ray.origin.z)};
  const Vec3 c{fp::sub(vc.x, ray.origin.x), fp::sub(vc.y, ray.origin.y),
               fp::sub(vc.z, ray.origin.z)};

  const float sx = ray.shear.x;
  const float sy = ray.shear.y;
  const float sz = ray.shear.z;
  const int kx = ray.kx;
  const int ky = ray.ky;
  const int kz = ray.kz;

  Sheared s;
  s.ax = fp::sub(a[kx], fp::mul(sx, a[kz]));
  s.ay = fp::sub(a[ky], fp::mul(sy, a[kz]));
  s.bx = fp::sub(b[kx], fp::mul(sx, b[kz]));
  s.by = fp::sub(b[ky], fp::mul(sy, b[kz]));
  s.cx = fp::sub(c[kx], fp::mul(sx, c[kz]));
  s.cy = fp::sub(c[ky], fp::mul(sy, c[kz]));
  s.az = fp::mul(sz, a[kz]);
  s.bz = fp::mul(sz, b[kz]);
  s.cz = fp::mul(sz, c[kz]);
  return s;
}

Barycentrics barycentrics(const Sheared& s) {
  Barycentrics r;
  r.u = fp::sub(fp::mul(s.cx, s.by), fp::mul(s.cy, s.bx));
  r.v = fp::sub(fp::mul(s.ax, s.cy), fp::mul(s.ay, s.cx));
  r.w = fp::sub(fp::mul(s.bx, s.ay), fp::mul(s.by, s.ax));
  r.det = fp::add(fp::add(r.u, r.v), r.w);
  return r;
}

}  // namespace

TriangleResult watertight_triangle_test(const Ray& ray, const Triangle& tri, Culling culling) {
  const Sheared s = shear_triangle(ray, tri, culling);
  const Barycentrics bc = barycentrics(s);

  const float t = fp::add(fp::add(fp::mul(bc.u, s.az), fp::mul(bc.v, s.bz)), fp::mul(bc.w, s.cz));
  const float t_limit = fp::mul(ray.extent, bc.det);

  TriangleResult r;
  r.hit = fp::ge(bc.u, 0.0f) && fp::ge(bc.v, 0.0f) && fp::ge(bc.w, 0.0f) && fp::gt(bc.det, 0.0f) &&
          fp::ge(t, 0.0f) && fp::le(t, t_limit);
  r.t_num = t;
  r.t_denom = bc.det;
  r.triangle_id = tri.id;
  return r;
}

Barycentrics watertight_barycentrics(const Ray& ray, const Triangle& tri) {
  return barycentrics(shear_triangle(ray, tri, Culling::Backface));
}

float euclidean_partial(std::span<const float, kVectorLanes> a,
                        std::span<const float, kVectorLanes> b, std::uint16_t mask) {
  std::array<float, 16> level;
  for (std::size_t i = 0; i < 16; ++i) {
    const float d = (mask >> i) & 1u ? fp::sub(a[i], b[i]) : 0.0f;
    level[i] = fp::mul(d, d);
  }
  for (std::size_t width = 8; width >= 1; width /= 2) {
    for (std::size_t i = 0; i < width; ++i) {
      level[i] = fp::add(level[2 * i], level[2 * i + 1]);
    }
  }
  return level[0];
}

CosinePartial cosine_partial(std::span<const float, kCosineLanes> a,
                             std::span<const float, kCosineLanes> b, std::uint8_t mask) {
  std::array<float, 8> dot;
  std::array<float, 8> norm;
  for (std::size_t i = 0; i < 8; ++i) {
    const bool on = (mask >> i) & 1u;
    const float ai = on ? a[i] : 0.0f;
    const float bi = on ? b[i] : 0.0f;
    dot[i] = fp::mul(ai, bi);
    norm[i] = fp::mul(bi, bi);
  }
  for (std::size_t width = 4; width >= 1; width /= 2) {
    for (std::size_t i = 0; i < width; ++i) {
      dot[i] = fp::add(dot[2 * i], dot[2 * i + 1]);
      norm[i] = fp::add(norm[2 * i], norm[2 * i + 1]);
    }
  }
  return {dot[0], norm[0]};
}

std::array<std::uint8_t, 4> sort4(const std::array<float, 4>& keys) {
  static constexpr std::array<std::array<int, 2>, 5> kNetwork{{{0, 1}, {2, 3}, {0, 2}, {1, 3}, {1, 2}}};
  std::array<float, 4> k = keys;
  std::array<std::uint8_t, 4> idx{0, 1, 2, 3};
  for (const auto& [l, r] : kNetwork) {
    const bool exchange = fp::gt(k[l], k[r]) || (k[l] == k[r] && idx[l] > idx[r]);
    if (exchange) {
      std::swap(k[l], k[r]);
      std::swap(idx[l], idx[r]);
    }
  }
  return idx;
}

}  // namespace rayflex
