#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace rayflex {

inline constexpr std::size_t kBoxesPerJob = 4;
inline constexpr std::size_t kVectorLanes = 16;
inline constexpr std::size_t kCosineLanes = 8;

struct Vec3 {
  float x = 0.0f;
  float y = 0.0f;
  float z = 0.0f;

  float& operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }
  float operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
};

// Bitwise equality; NaNs with the same payload compare equal.
bool same_bits(const Vec3& a, const Vec3& b);

// A ray as presented at the datapath input. inv_dir, k and shear are
// host-side precomputations (see precompute_ray_transform); t_beg is fixed
// to +0.0 and therefore not carried.
struct Ray {
  Vec3 origin;
  Vec3 dir;
  Vec3 inv_dir;
  float extent = 0.0f;
  int kx = 0;
  int ky = 1;
  int kz = 2;
  Vec3 shear;  // (dir[kx]/dir[kz], dir[ky]/dir[kz], 1/dir[kz])
};

struct Aabb {
  Vec3 lo;
  Vec3 hi;

  // Throws DomainError unless lo <= hi on every axis.
  static Aabb checked(const Vec3& lo, const Vec3& hi);

  // Filler for unused child slots of a quad test. All-NaN corners never hit.
  static Aabb empty_slot();
};

struct Triangle {
  Vec3 v0;
  Vec3 v1;
  Vec3 v2;
  std::uint32_t id = 0;
};

// Opaque child node reference; passed through the datapath untouched.
struct NodeRef {
  std::uint32_t value = 0;

  friend bool operator==(NodeRef, NodeRef) = default;
};

enum class Opcode : std::uint8_t { Bubble, QuadBox, Triangle, Euclidean, Cosine };

std::string_view to_string(Opcode op);

inline bool is_extended(Opcode op) { return op == Opcode::Euclidean || op == Opcode::Cosine; }

struct JobInput {
  Opcode opcode = Opcode::Bubble;
  Ray ray;
  std::array<Aabb, kBoxesPerJob> boxes{};
  std::array<NodeRef, kBoxesPerJob> child_ptr{};
  Triangle triangle;
  std::array<float, kVectorLanes> euclidean_a{};
  std::array<float, kVectorLanes> euclidean_b{};
  std::uint16_t euclidean_mask = 0;
  bool reset_accumulator = false;
};

// All arrays are in sorted order: slot i describes input box order[i].
struct BoxResult {
  std::array<bool, kBoxesPerJob> hit{};
  std::array<std::uint8_t, kBoxesPerJob> order{0, 1, 2, 3};
  std::array<float, kBoxesPerJob> tmin{};
  std::array<NodeRef, kBoxesPerJob> child_ptr_sorted{};
};

// Hit distance is t_num / t_denom; the datapath never divides.
struct TriangleResult {
  bool hit = false;
  float t_num = 0.0f;
  float t_denom = 0.0f;
  std::uint32_t triangle_id = 0;
};

struct DistanceResult {
  float euclidean_accumulator = 0.0f;
  bool euclidean_reset = false;
  float angular_dot_product = 0.0f;
  float angular_norm = 0.0f;
  bool angular_reset = false;
};

struct JobOutput {
  Opcode opcode = Opcode::Bubble;
  BoxResult box;
  TriangleResult tri;
  DistanceResult dist;
};

// Bitwise comparisons used by the oracle and stream-equality checks.
bool same_bits(const BoxResult& a, const BoxResult& b);
bool same_bits(const TriangleResult& a, const TriangleResult& b);
bool same_bits(const DistanceResult& a, const DistanceResult& b);
// Compares only the sub-result selected by the opcode.
bool same_result(const JobOutput& a, const JobOutput& b);
// Compares every field.
bool same_bits(const JobOutput& a, const JobOutput& b);

bool same_bits(const JobInput& a, const JobInput& b);

std::string_view trace_label(const JobInput& job);
std::string_view trace_label(const JobOutput& out);

}  // namespace rayflex
