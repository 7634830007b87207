#pragma once

// Golden single-call kernels. Every add/sub/mul is an individually rounded
// binary32 operation and every min/max/compare is one comparator, in the
// same order the datapath stages evaluate them, so pipeline results can be
// checked bit for bit against these functions.

#include <array>
#include <cstdint>
#include <span>

#include "rayflex/types.hpp"

namespace rayflex {

struct SlabResult {
  bool hit = false;
  float tmin = 0.0f;
  float tmax = 0.0f;
};

struct CosinePartial {
  float dot = 0.0f;
  float norm = 0.0f;
};

struct Barycentrics {
  float u = 0.0f;
  float v = 0.0f;
  float w = 0.0f;
  float det = 0.0f;
};

// Selects the winding rule of the triangle test. FlippedMutant accepts back
// faces instead of front faces; it exists only for mutation testing of the
// validation suite.
enum class Culling : std::uint8_t { Backface, FlippedMutant };

// Host-side ray setup: inverse direction, winding-preserving axis renaming
// (kz = dominant axis, ties prefer z then y) and shear constants.
// Throws DomainError for a zero direction.
Ray precompute_ray_transform(const Vec3& origin, const Vec3& dir, float extent);

// Slab test over the interval [t_beg, t_end] using the multiply form with
// ray.inv_dir. Coplanar rays (0 * Inf) produce NaN and therefore miss.
SlabResult slab_box_test(const Ray& ray, const Aabb& box, float t_beg, float t_end);

// Four slab tests with t_beg = +0, t_end = ray.extent, followed by a sort of
// the children by entry distance (misses keyed as +Inf).
BoxResult quad_box_test(const Ray& ray, std::span<const Aabb, kBoxesPerJob> boxes,
                        std::span<const NodeRef, kBoxesPerJob> ptrs);

// Watertight ray/triangle test with backface culling. Front faces satisfy
// dir . ((v1 - v0) x (v2 - v0)) > 0. Returns t as a (t_num, t_denom) pair.
TriangleResult watertight_triangle_test(const Ray& ray, const Triangle& tri,
                                        Culling culling = Culling::Backface);

// The sheared 2D barycentrics of the triangle test, for host-side shading.
Barycentrics watertight_barycentrics(const Ray& ray, const Triangle& tri);

// Sum of squared lane differences over the lanes enabled in mask, reduced
// through a balanced 16-8-4-2-1 adder tree. Disabled lanes contribute +0.
float euclidean_partial(std::span<const float, kVectorLanes> a,
                        std::span<const float, kVectorLanes> b, std::uint16_t mask);

// (sum a_i*b_i, sum b_i*b_i) over the enabled lanes, two balanced 8-4-2-1 trees.
CosinePartial cosine_partial(std::span<const float, kCosineLanes> a,
                             std::span<const float, kCosineLanes> b, std::uint8_t mask);

// Five-comparator sorting network on (0,1),(2,3),(0,2),(1,3),(1,2). A
// comparator exchanges when its left key is greater, or equal with a larger
// original index, so the result is the stable ascending order.
std::array<std::uint8_t, 4> sort4(const std::array<float, 4>& keys);

}  // namespace rayflex
