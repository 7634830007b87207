#include "rayflex/bvh.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <memory>
#include <numeric>

#include "rayflex/errors.hpp"
#include "rayflex/kernels.hpp"

namespace rayflex {

Aabb bounds_of(const Triangle& tri) {
  Aabb b{tri.v0, tri.v0};
  for (const Vec3* v : {&tri.v1, &tri.v2}) {
    for (int a = 0; a < 3; ++a) {
      b.lo[a] = std::min(b.lo[a], (*v)[a]);
      b.hi[a] = std::max(b.hi[a], (*v)[a]);
    }
  }
  return b;
}

namespace {

Aabb merge(const Aabb& a, const Aabb& b) {
  Aabb r;
  for (int i = 0; i < 3; ++i) {
    r.lo[i] = std::min(a.lo[i], b.lo[i]);
    r.hi[i] = std::max(a.hi[i], b.hi[i]);
  }
  return r;
}

struct BinaryNode {
  Aabb bounds;
  std::uint32_t triangle = 0;  // leaves only
  std::unique_ptr<BinaryNode> left;
  std::unique_ptr<BinaryNode> right;

  bool leaf() const { return !left; }
};

std::unique_ptr<BinaryNode> build_binary(std::span<std::uint32_t> ids, std::span<const Aabb> bounds,
                                         std::span<const Vec3> centroids) {
  auto node = std::make_unique<BinaryNode>();
  node->bounds = bounds[ids[0]];
  for (auto id : ids) node->bounds = merge(node->bounds, bounds[id]);
  if (ids.size() == 1) {
    node->triangle = ids[0];
    return node;
  }

  Vec3 lo = centroids[ids[0]];
  Vec3 hi = lo;
  for (auto id : ids) {
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], centroids[id][a]);
      hi[a] = std::max(hi[a], centroids[id][a]);
    }
  }
  int axis = 0;
  for (int a = 1; a < 3; ++a) {
    if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
  }
  std::stable_sort(ids.begin(), ids.end(), [&](std::uint32_t x, std::uint32_t y) {
    return centroids[x][axis] < centroids[y][axis];
  });
  const std::size_t mid = ids.size() / 2;
  node->left = build_binary(ids.first(mid), bounds, centroids);
  node->right = build_binary(ids.subspan(mid), bounds, centroids);
  return node;
}

// Children of a 4-wide node: each binary child, or its two children when it
// is internal.
std::vector<const BinaryNode*> collapse(const BinaryNode& n) {
  std::vector<const BinaryNode*> out;
  for (const BinaryNode* child : {n.left.get(), n.right.get()}) {
    if (child->leaf()) {
      out.push_back(child);
    } else {
      out.push_back(child->left.get());
      out.push_back(child->right.get());
    }
  }
  return out;
}

}  // namespace

Bvh Bvh::build(std::span<const Triangle> triangles) {
  if (triangles.empty()) throw DomainError("Bvh::build: no triangles");

  Bvh bvh;
  bvh.triangles_.assign(triangles.begin(), triangles.end());

  std::vector<Aabb> bounds;
  std::vector<Vec3> centroids;
  for (const auto& t : triangles) {
    bounds.push_back(bounds_of(t));
    centroids.push_back({(t.v0.x + t.v1.x + t.v2.x) / 3.0f, (t.v0.y + t.v1.y + t.v2.y) / 3.0f,
                         (t.v0.z + t.v1.z + t.v2.z) / 3.0f});
  }
  std::vector<std::uint32_t> ids(triangles.size());
  std::iota(ids.begin(), ids.end(), 0u);
  const auto root = build_binary(ids, bounds, centroids);

  // Breadth-first emission keeps node numbering independent of recursion depth.
  bvh.nodes_.emplace_back();
  std::deque<std::pair<const BinaryNode*, std::uint32_t>> work;
  if (root->leaf()) {
    BvhNode& top = bvh.nodes_[0];
    top.child_count = 1;
    top.child_box.fill(Aabb::empty_slot());
    top.child.fill(NodeRef{kNullNode});
    top.child_box[0] = root->bounds;
    top.child[0] = NodeRef{1};
    BvhNode leaf;
    leaf.leaf = true;
    leaf.triangle = root->triangle;
    bvh.nodes_.push_back(leaf);
    return bvh;
  }

  work.emplace_back(root.get(), 0);
  while (!work.empty()) {
    const auto [bin, index] = work.front();
    work.pop_front();
    const auto children = collapse(*bin);

    BvhNode node;
    node.child_box.fill(Aabb::empty_slot());
    node.child.fill(NodeRef{kNullNode});
    node.child_count = static_cast<std::uint8_t>(children.size());
    for (std::size_t i = 0; i < children.size(); ++i) {
      const auto child_index = static_cast<std::uint32_t>(bvh.nodes_.size());
      node.child_box[i] = children[i]->bounds;
      node.child[i] = NodeRef{child_index};
      BvhNode placeholder;
      if (children[i]->leaf()) {
        placeholder.leaf = true;
        placeholder.triangle = children[i]->triangle;
      } else {
        work.emplace_back(children[i], child_index);
      }
      bvh.nodes_.push_back(placeholder);
    }
    bvh.nodes_[index] = node;
  }
  return bvh;
}

bool closer(const TriangleResult& a, const TriangleResult& b) {
  if (!a.hit) return false;
  if (!b.hit) return true;
  // Both denominators are positive for hits; float products are exact in double.
  const double lhs = static_cast<double>(a.t_num) * b.t_denom;
  const double rhs = static_cast<double>(b.t_num) * a.t_denom;
  if (lhs != rhs) return lhs < rhs;
  return a.triangle_id < b.triangle_id;
}

namespace {

// Relative slack on the best-hit distance before a child box is skipped; box
// entry distances and triangle distances round differently.
constexpr double kPruneSlack = 1.0 / 1024.0;

bool beyond_best(float box_tmin, const TriangleResult& best) {
  if (!best.hit) return false;
  const double t = static_cast<double>(best.t_num) / best.t_denom;
  return box_tmin > t * (1.0 + kPruneSlack);
}

JobInput box_job(const Ray& ray, const BvhNode& node) {
  JobInput job;
  job.opcode = Opcode::QuadBox;
  job.ray = ray;
  job.boxes = node.child_box;
  job.child_ptr = node.child;
  return job;
}

JobInput triangle_job(const Ray& ray, const Triangle& tri) {
  JobInput job;
  job.opcode = Opcode::Triangle;
  job.ray = ray;
  job.triangle = tri;
  return job;
}

// Child visiting order for a box result, nearest first.
std::vector<std::pair<NodeRef, float>> visit_order(const BoxResult& box, bool sorted) {
  std::vector<std::pair<NodeRef, float>> out;
  if (sorted) {
    for (std::size_t i = 0; i < kBoxesPerJob; ++i) {
      if (box.hit[i]) out.emplace_back(box.child_ptr_sorted[i], box.tmin[i]);
    }
  } else {
    // Undo the sort: visit hits in input slot order.
    std::array<int, kBoxesPerJob> slot_of{};
    for (std::size_t i = 0; i < kBoxesPerJob; ++i) slot_of[box.order[i]] = static_cast<int>(i);
    for (std::size_t s = 0; s < kBoxesPerJob; ++s) {
      const int i = slot_of[s];
      if (box.hit[i]) out.emplace_back(box.child_ptr_sorted[i], box.tmin[i]);
    }
  }
  return out;
}

}  // namespace

RayTraversal::RayTraversal(const Bvh& bvh, const Ray& ray, TraversalOptions options)
    : bvh_(&bvh), ray_(ray), options_(options) {
  stack_.push_back({bvh.root(), 0.0f});
}

bool RayTraversal::pruned(const Entry& e) const {
  return options_.prune && beyond_best(e.tmin, result_.hit);
}

std::optional<JobInput> RayTraversal::next_job() {
  while (!stack_.empty()) {
    const Entry& top = stack_.back();
    if (pruned(top)) {
      stack_.pop_back();
      continue;
    }
    const BvhNode& node = bvh_->node(top.node);
    if (node.leaf) return triangle_job(ray_, bvh_->triangles()[node.triangle]);
    return box_job(ray_, node);
  }
  return std::nullopt;
}

void RayTraversal::deliver(const JobOutput& out) {
  stack_.pop_back();
  if (out.opcode == Opcode::Triangle) {
    ++result_.stats.triangle_tests;
    if (closer(out.tri, result_.hit)) result_.hit = out.tri;
    return;
  }
  ++result_.stats.box_tests;
  const auto order = visit_order(out.box, options_.sorted);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    stack_.push_back({it->first, it->second});
  }
}

TraceResult trace_ray(const Ray& ray, const Bvh& bvh, Datapath& datapath, TraversalOptions options) {
  return trace_rays(std::span<const Ray>(&ray, 1), bvh, datapath, options).front();
}

std::vector<TraceResult> trace_rays(std::span<const Ray> rays, const Bvh& bvh, Datapath& datapath,
                                    TraversalOptions options) {
  std::vector<RayTraversal> walks;
  walks.reserve(rays.size());
  std::deque<std::size_t> ready;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    walks.emplace_back(bvh, rays[i], options);
    ready.push_back(i);
  }

  std::deque<std::size_t> issued;  // ray index per in-flight job, in order
  while (!ready.empty() || !issued.empty()) {
    while (datapath.queued() == 0 && !ready.empty()) {
      const std::size_t r = ready.front();
      ready.pop_front();
      if (auto job = walks[r].next_job()) {
        datapath.submit(*job);
        issued.push_back(r);
      }
    }
    if (auto done = datapath.step(true)) {
      const std::size_t r = issued.front();
      issued.pop_front();
      walks[r].deliver(done->output);
      if (!walks[r].finished()) ready.push_back(r);
    }
  }

  std::vector<TraceResult> results;
  results.reserve(walks.size());
  for (const auto& w : walks) results.push_back(w.result());
  return results;
}

TraceResult trace_ray_golden(const Ray& ray, const Bvh& bvh, TraversalOptions options) {
  TraceResult result;
  std::function<void(NodeRef)> visit = [&](NodeRef ref) {
    const BvhNode& node = bvh.node(ref);
    if (node.leaf) {
      ++result.stats.triangle_tests;
      const TriangleResult r = watertight_triangle_test(ray, bvh.triangles()[node.triangle]);
      if (closer(r, result.hit)) result.hit = r;
      return;
    }
    ++result.stats.box_tests;
    const BoxResult box = quad_box_test(ray, node.child_box, node.child);
    for (const auto& [child, tmin] : visit_order(box, options.sorted)) {
      if (options.prune && beyond_best(tmin, result.hit)) continue;
      visit(child);
    }
  };
  visit(bvh.root());
  return result;
}

TriangleResult closest_hit_exhaustive(const Ray& ray, std::span<const Triangle> triangles) {
  TriangleResult best;
  for (const auto& tri : triangles) {
    const TriangleResult r = watertight_triangle_test(ray, tri);
    if (closer(r, best)) best = r;
  }
  return best;
}

}  // namespace rayflex
