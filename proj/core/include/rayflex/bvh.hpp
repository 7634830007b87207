#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rayflex/datapath.hpp"
#include "rayflex/types.hpp"

namespace rayflex {

inline constexpr std::uint32_t kNullNode = 0xFFFFFFFFu;

// 4-wide BVH node. Internal nodes list up to four children with their
// bounds; unused slots hold Aabb::empty_slot() and kNullNode. A leaf holds
// exactly one triangle.
struct BvhNode {
  bool leaf = false;
  std::uint8_t child_count = 0;
  std::array<Aabb, kBoxesPerJob> child_box{};
  std::array<NodeRef, kBoxesPerJob> child{};
  std::uint32_t triangle = 0;  // index into Bvh::triangles() for leaves
};

class Bvh {
 public:
  // Median split on the longest centroid axis, then collapsed to 4-wide.
  // Throws DomainError for an empty triangle list.
  static Bvh build(std::span<const Triangle> triangles);

  const std::vector<BvhNode>& nodes() const { return nodes_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  NodeRef root() const { return NodeRef{0}; }
  const BvhNode& node(NodeRef ref) const { return nodes_[ref.value]; }

 private:
  std::vector<BvhNode> nodes_;
  std::vector<Triangle> triangles_;
};

Aabb bounds_of(const Triangle& tri);

// True when a (hit) is strictly closer than b, comparing t = num/denom by
// cross-multiplication in double; equal distances go to the lower id.
bool closer(const TriangleResult& a, const TriangleResult& b);

struct TraversalOptions {
  // Visit children in the datapath's sorted order (false: input order).
  bool sorted = true;
  // Skip children whose entry distance is beyond the current best hit.
  bool prune = true;
};

struct TraversalStats {
  std::uint64_t box_tests = 0;
  std::uint64_t triangle_tests = 0;

  TraversalStats& operator+=(const TraversalStats& o) {
    box_tests += o.box_tests;
    triangle_tests += o.triangle_tests;
    return *this;
  }
};

struct TraceResult {
  TriangleResult hit;  // hit.hit == false when nothing was hit
  TraversalStats stats;
};

// Per-ray traversal state machine: hands out one datapath job at a time and
// consumes its result.
class RayTraversal {
 public:
  RayTraversal(const Bvh& bvh, const Ray& ray, TraversalOptions options = {});

  // Next job to issue, or nullopt when the traversal is finished.
  std::optional<JobInput> next_job();
  void deliver(const JobOutput& out);

  bool finished() const { return stack_.empty(); }
  const TraceResult& result() const { return result_; }

 private:
  struct Entry {
    NodeRef node;
    float tmin;
  };

  bool pruned(const Entry& e) const;

  const Bvh* bvh_;
  Ray ray_;
  TraversalOptions options_;
  std::vector<Entry> stack_;
  TraceResult result_;
};

// Traces one ray through the simulated datapath.
TraceResult trace_ray(const Ray& ray, const Bvh& bvh, Datapath& datapath, TraversalOptions options = {});

// Traces many rays, interleaving their jobs in the datapath so it stays busy.
// Each ray's result equals its trace_ray() result.
std::vector<TraceResult> trace_rays(std::span<const Ray> rays, const Bvh& bvh, Datapath& datapath,
                                    TraversalOptions options = {});

// Recursive traversal calling the golden kernels directly.
TraceResult trace_ray_golden(const Ray& ray, const Bvh& bvh, TraversalOptions options = {});

// Closest hit over every triangle, no BVH.
TriangleResult closest_hit_exhaustive(const Ray& ray, std::span<const Triangle> triangles);

}  // namespace rayflex
