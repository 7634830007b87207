#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "rayflex/types.hpp"

namespace rayflex {

// Groups of SharedRecord fields, each produced by exactly one stage.
enum class Field : std::uint8_t {
  Input,
  BoxTranslated,
  BoxSlabT,
  BoxInterval,
  BoxSorted,
  TriTranslated,
  TriShearProducts,
  TriSheared,
  TriProducts,
  TriBarycentrics,
  TriDetPartial,
  TriDet,
  TriT,
  TriResult,
  EucDiff,
  EucSquares,
  EucTree8,
  EucTree4,
  EucTree2,
  EucSum,
  CosProducts,
  CosTree4,
  CosTree2,
  CosSum,
  Distance,
  kCount
};

inline constexpr std::size_t kFieldCount = static_cast<std::size_t>(Field::kCount);

std::string_view to_string(Field f);

class WriteOnceViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Per-job record of which stage wrote each field group (0 = not yet).
class WriteLog {
 public:
  void produce(Field f, int stage);
  // Throws WriteOnceViolation when f is missing or was written by stage or later.
  void require(Field f, int stage) const;
  int writer(Field f) const { return writer_[static_cast<std::size_t>(f)]; }

 private:
  std::array<std::uint8_t, kFieldCount> writer_{};
};

// The one record type carried between every pair of interior stages. It
// holds the job as received plus every intermediate of every operation; a
// stage copies its input record and overwrites only the fields it produces.
struct SharedRecord {
  JobInput in;

  struct BoxLane {
    Vec3 lo_rel;  // box.lo - origin
    Vec3 hi_rel;
    Vec3 t_lo;  // lo_rel * inv_dir
    Vec3 t_hi;
    Vec3 t_near;  // per-axis min / max of t_lo, t_hi
    Vec3 t_far;
    float tmin = 0.0f;
    float tmax = 0.0f;
    bool hit = false;
    float key = 0.0f;  // tmin for hits, +Inf for misses
  };
  std::array<BoxLane, kBoxesPerJob> box{};
  BoxResult box_out;

  // Vertex B/C are already in barycentric-formula order (see kernels).
  struct TriangleLanes {
    Vec3 a, b, c;
    float sx_az = 0, sy_az = 0, sx_bz = 0, sy_bz = 0, sx_cz = 0, sy_cz = 0;
    float ax = 0, ay = 0, bx = 0, by = 0, cx = 0, cy = 0;
    float cx_by = 0, cy_bx = 0, ax_cy = 0, ay_cx = 0, bx_ay = 0, by_ax = 0;
    float az = 0, bz = 0, cz = 0;
    float u = 0, v = 0, w = 0;
    float u_plus_v = 0, u_az = 0, v_bz = 0, w_cz = 0;
    float det = 0, t_partial = 0;
    float t = 0, t_limit = 0;
  };
  TriangleLanes tri;
  TriangleResult tri_out;

  struct EuclideanLanes {
    std::array<float, kVectorLanes> diff{};
    std::array<float, kVectorLanes> square{};
    std::array<float, 8> sum8{};
    std::array<float, 4> sum4{};
    std::array<float, 2> sum2{};
    float partial = 0.0f;
  };
  EuclideanLanes euc;

  struct CosineLanes {
    std::array<float, kCosineLanes> dot{};
    std::array<float, kCosineLanes> norm{};
    std::array<float, 4> dot4{}, norm4{};
    std::array<float, 2> dot2{}, norm2{};
    float dot_partial = 0.0f;
    float norm_partial = 0.0f;
  };
  CosineLanes cos;

  DistanceResult dist_out;

  WriteLog writes;
};

// Stage-1 conversion from the IO bundle to the wide record.
SharedRecord pack_input(const JobInput& job);
JobInput unpack_input(const SharedRecord& rec);
// Stage-11 conversion to the output bundle.
JobOutput pack_output(const SharedRecord& rec);

std::string_view trace_label(const SharedRecord& rec);

}  // namespace rayflex
