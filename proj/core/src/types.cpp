#include "rayflex/types.hpp"

#include <limits>

#include "rayflex/errors.hpp"
#include "rayflex/fp.hpp"

namespace rayflex {

bool same_bits(const Vec3& a, const Vec3& b) {
  return fp::same_bits(a.x, b.x) && fp::same_bits(a.y, b.y) && fp::same_bits(a.z, b.z);
}

Aabb Aabb::checked(const Vec3& lo, const Vec3& hi) {
  for (int axis = 0; axis < 3; ++axis) {
    if (!(lo[axis] <= hi[axis])) {
      throw DomainError("Aabb: lo must not exceed hi on any axis");
    }
  }
  return Aabb{lo, hi};
}

Aabb Aabb::empty_slot() {
  const float nan = std::numeric_limits<float>::quiet_NaN();
  return Aabb{{nan, nan, nan}, {nan, nan, nan}};
}

std::string_view to_string(Opcode op) {
  switch (op) {
    case Opcode::Bubble: return "bubble";
    case Opcode::QuadBox: return "quadbox";
    case Opcode::Triangle: return "triangle";
    case Opcode::Euclidean: return "euclidean";
    case Opcode::Cosine: return "cosine";
  }
  return "?";
}

bool same_bits(const BoxResult& a, const BoxResult& b) {
  for (std::size_t i = 0; i < kBoxesPerJob; ++i) {
    if (a.hit[i] != b.hit[i] || a.order[i] != b.order[i] || !fp::same_bits(a.tmin[i], b.tmin[i]) ||
        a.child_ptr_sorted[i] != b.child_ptr_sorted[i]) {
      return false;
    }
  }
  return true;
}

bool same_bits(const TriangleResult& a, const TriangleResult& b) {
  return a.hit == b.hit && fp::same_bits(a.t_num, b.t_num) && fp::same_bits(a.t_denom, b.t_denom) &&
         a.triangle_id == b.triangle_id;
}

bool same_bits(const DistanceResult& a, const DistanceResult& b) {
  return fp::same_bits(a.euclidean_accumulator, b.euclidean_accumulator) &&
         a.euclidean_reset == b.euclidean_reset &&
         fp::same_bits(a.angular_dot_product, b.angular_dot_product) &&
         fp::same_bits(a.angular_norm, b.angular_norm) && a.angular_reset == b.angular_reset;
}

bool same_result(const JobOutput& a, const JobOutput& b) {
  if (a.opcode != b.opcode) return false;
  switch (a.opcode) {
    case Opcode::QuadBox: return same_bits(a.box, b.box);
    case Opcode::Triangle: return same_bits(a.tri, b.tri);
    case Opcode::Euclidean:
      return fp::same_bits(a.dist.euclidean_accumulator, b.dist.euclidean_accumulator) &&
             a.dist.euclidean_reset == b.dist.euclidean_reset;
    case Opcode::Cosine:
      return fp::same_bits(a.dist.angular_dot_product, b.dist.angular_dot_product) &&
             fp::same_bits(a.dist.angular_norm, b.dist.angular_norm) &&
             a.dist.angular_reset == b.dist.angular_reset;
    case Opcode::Bubble: return true;
  }
  return false;
}

bool same_bits(const JobOutput& a, const JobOutput& b) {
  return a.opcode == b.opcode && same_bits(a.box, b.box) && same_bits(a.tri, b.tri) &&
         same_bits(a.dist, b.dist);
}

namespace {

bool same_bits(const Ray& a, const Ray& b) {
  return rayflex::same_bits(a.origin, b.origin) && rayflex::same_bits(a.dir, b.dir) &&
         rayflex::same_bits(a.inv_dir, b.inv_dir) && fp::same_bits(a.extent, b.extent) &&
         a.kx == b.kx && a.ky == b.ky && a.kz == b.kz && rayflex::same_bits(a.shear, b.shear);
}

}  // namespace

bool same_bits(const JobInput& a, const JobInput& b) {
  if (a.opcode != b.opcode || !same_bits(a.ray, b.ray)) return false;
  for (std::size_t i = 0; i < kBoxesPerJob; ++i) {
    if (!same_bits(a.boxes[i].lo, b.boxes[i].lo) || !same_bits(a.boxes[i].hi, b.boxes[i].hi) ||
        a.child_ptr[i] != b.child_ptr[i]) {
      return false;
    }
  }
  if (!same_bits(a.triangle.v0, b.triangle.v0) || !same_bits(a.triangle.v1, b.triangle.v1) ||
      !same_bits(a.triangle.v2, b.triangle.v2) || a.triangle.id != b.triangle.id) {
    return false;
  }
  for (std::size_t i = 0; i < kVectorLanes; ++i) {
    if (!fp::same_bits(a.euclidean_a[i], b.euclidean_a[i]) ||
        !fp::same_bits(a.euclidean_b[i], b.euclidean_b[i])) {
      return false;
    }
  }
  return a.euclidean_mask == b.euclidean_mask && a.reset_accumulator == b.reset_accumulator;
}

std::string_view trace_label(const JobInput& job) { return to_string(job.opcode); }

std::string_view trace_label(const JobOutput& out) { return to_string(out.opcode); }

}  // namespace rayflex
