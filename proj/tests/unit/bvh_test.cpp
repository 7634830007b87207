#include <doctest.h>

#include <functional>
#include <set>

#include "rayflex/bvh.hpp"
#include "rayflex/errors.hpp"
#include "rayflex/fp.hpp"
#include "rayflex/kernels.hpp"
#include "rayflex/render.hpp"
#include "support/job_gen.hpp"

using namespace rayflex;

namespace {

bool contains(const Aabb& outer, const Aabb& inner) {
  for (int a = 0; a < 3; ++a) {
    if (!(outer.lo[a] <= inner.lo[a] && inner.hi[a] <= outer.hi[a])) return false;
  }
  return true;
}

Triangle facing_z(float x, float y, float z, std::uint32_t id) {
  return {{x - 1, y - 1, z}, {x + 1, y - 1, z}, {x, y + 1, z}, id};
}

// Bunny-sized stand-in: a bumpy closed-ish surface of about 1000 triangles.
std::vector<Triangle> blob(int rings, int segments) {
  std::vector<Triangle> tris;
  auto at = [&](int i, int j) {
    const double th = M_PI * i / rings;
    const double ph = 2 * M_PI * j / segments;
    const double r = 1.0 + 0.15 * std::sin(3 * th) * std::cos(5 * ph);
    return Vec3{float(r * std::sin(th) * std::cos(ph)), float(r * std::cos(th)), float(r * std::sin(th) * std::sin(ph))};
  };
  for (int i = 0; i < rings; ++i) {
    for (int j = 0; j < segments; ++j) {
      const auto id = static_cast<std::uint32_t>(tris.size());
      tris.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1), id});
      tris.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1), id + 1});
    }
  }
  return tris;
}

void check_structure(const Bvh& bvh) {
  std::multiset<std::uint32_t> seen;
  std::set<std::uint32_t> visited;
  std::function<void(NodeRef, const Aabb*)> walk = [&](NodeRef ref, const Aabb* bound) {
    REQUIRE(visited.insert(ref.value).second);
    const BvhNode& n = bvh.node(ref);
    if (n.leaf) {
      const Triangle& t = bvh.triangles()[n.triangle];
      seen.insert(t.id);
      if (bound) REQUIRE(contains(*bound, bounds_of(t)));
      return;
    }
    REQUIRE(n.child_count >= 1);
    REQUIRE(n.child_count <= 4);
    for (std::size_t i = 0; i < n.child_count; ++i) {
      if (bound) REQUIRE(contains(*bound, n.child_box[i]));
      walk(n.child[i], &n.child_box[i]);
    }
    for (std::size_t i = n.child_count; i < 4; ++i) REQUIRE(fp::is_nan(n.child_box[i].lo.x));
  };
  walk(bvh.root(), nullptr);
  REQUIRE(visited.size() == bvh.nodes().size());
  REQUIRE(seen.size() == bvh.triangles().size());
  for (const auto& t : bvh.triangles()) REQUIRE(seen.count(t.id) == 1);
}

}  // namespace

TEST_CASE("build rejects an empty mesh") { CHECK_THROWS_AS(Bvh::build({}), DomainError); }

TEST_CASE("one triangle: a leaf wrapped by one internal node") {
  const std::vector<Triangle> one{facing_z(0, 0, 5, 0)};
  const Bvh bvh = Bvh::build(one);
  REQUIRE(bvh.nodes().size() == 2);
  const BvhNode& root = bvh.node(bvh.root());
  CHECK_FALSE(root.leaf);
  CHECK(root.child_count == 1);
  CHECK(bvh.node(root.child[0]).leaf);
  check_structure(bvh);
}

TEST_CASE("four disjoint triangles: one node with four leaves") {
  const std::vector<Triangle> four{facing_z(0, 0, 5, 0), facing_z(10, 0, 5, 1), facing_z(20, 0, 5, 2),
                                   facing_z(30, 0, 5, 3)};
  const Bvh bvh = Bvh::build(four);
  REQUIRE(bvh.nodes().size() == 5);
  const BvhNode& root = bvh.node(bvh.root());
  CHECK(root.child_count == 4);
  for (int i = 0; i < 4; ++i) CHECK(bvh.node(root.child[i]).leaf);
  check_structure(bvh);
}

TEST_CASE("structure of larger trees") {
  for (std::size_t n : {2u, 3u, 5u, 7u, 17u, 100u}) check_structure(Bvh::build(make_demo_scene(n, n)));
  const auto mesh = blob(20, 25);
  CHECK(mesh.size() == 1000);
  check_structure(Bvh::build(mesh));
}

TEST_CASE("build is deterministic") {
  const auto mesh = make_demo_scene(4, 300);
  const Bvh a = Bvh::build(mesh);
  const Bvh b = Bvh::build(mesh);
  REQUIRE(a.nodes().size() == b.nodes().size());
  for (std::size_t i = 0; i < a.nodes().size(); ++i) {
    CHECK(a.nodes()[i].leaf == b.nodes()[i].leaf);
    CHECK(a.nodes()[i].triangle == b.nodes()[i].triangle);
    CHECK(a.nodes()[i].child == b.nodes()[i].child);
  }
}

TEST_CASE("closer compares by cross multiplication with id tiebreak") {
  const TriangleResult a{true, 1.0f, 2.0f, 5};
  const TriangleResult b{true, 2.0f, 4.0f, 3};
  const TriangleResult c{true, 3.0f, 4.0f, 1};
  CHECK(closer(b, a));
  CHECK_FALSE(closer(a, b));
  CHECK(closer(a, c));
  CHECK(closer(a, TriangleResult{}));
  CHECK_FALSE(closer(TriangleResult{}, a));
}

TEST_CASE("trace_ray examples") {
  const std::vector<Triangle> scene{facing_z(0, 0, 5, 10), facing_z(10, 0, 8, 11), facing_z(0, 0, 9, 12)};
  const Bvh bvh = Bvh::build(scene);
  Datapath dp;
  SUBCASE("front triangle behind one box") {
    const Ray r = precompute_ray_transform({0, 0, 0}, {0, 0, 1}, 100);
    const TraceResult got = trace_ray(r, bvh, dp);
    CHECK(got.hit.hit);
    CHECK(got.hit.triangle_id == 10);
    const TraceResult golden = trace_ray_golden(r, bvh);
    CHECK(same_bits(got.hit, golden.hit));
    CHECK(got.stats.box_tests == golden.stats.box_tests);
  }
  SUBCASE("miss") {
    const Ray r = precompute_ray_transform({50, 50, 0}, {0, 0, 1}, 100);
    CHECK_FALSE(trace_ray(r, bvh, dp).hit.hit);
  }
}

TEST_CASE("traversal equals exhaustive testing and the golden traversal") {
  const auto mesh = blob(20, 25);
  const Bvh bvh = Bvh::build(mesh);
  testing::JobGen gen(31);
  std::vector<Ray> rays;
  for (int i = 0; i < 400; ++i) {
    const Vec3 o = gen.point(3.0f);
    const Vec3 target = gen.point(0.8f);
    rays.push_back(precompute_ray_transform(o, {target.x - o.x, target.y - o.y, target.z - o.z}, 100.0f));
  }
  Datapath dp;
  const auto got = trace_rays(rays, bvh, dp);
  int hits = 0;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    const TriangleResult ex = closest_hit_exhaustive(rays[i], mesh);
    REQUIRE(same_bits(got[i].hit, ex));
    REQUIRE(same_bits(got[i].hit, trace_ray_golden(rays[i], bvh).hit));
    hits += ex.hit;
  }
  CHECK(hits > 100);
}

TEST_CASE("batched tracing equals one ray at a time") {
  const auto mesh = make_demo_scene(8, 200);
  const Bvh bvh = Bvh::build(mesh);
  testing::JobGen gen(37);
  std::vector<Ray> rays;
  for (int i = 0; i < 100; ++i) {
    const Vec3 o{gen.uniform(-1, 1), gen.uniform(-1, 1), 3.0f};
    rays.push_back(precompute_ray_transform(o, {gen.uniform(-0.3f, 0.3f), gen.uniform(-0.3f, 0.3f), -1}, 100));
  }
  Datapath batch;
  const auto all = trace_rays(rays, bvh, batch);
  for (std::size_t i = 0; i < rays.size(); ++i) {
    Datapath single;
    const TraceResult one = trace_ray(rays[i], bvh, single);
    REQUIRE(same_bits(one.hit, all[i].hit));
    REQUIRE(one.stats.triangle_tests == all[i].stats.triangle_tests);
  }
}

TEST_CASE("sorted traversal never tests more triangles than unsorted") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto mesh = make_demo_scene(seed, 300);
    const Bvh bvh = Bvh::build(mesh);
    const Camera cam = frame_scene(mesh);
    std::uint64_t sorted = 0;
    std::uint64_t unsorted = 0;
    for (int y = 0; y < 32; ++y) {
      for (int x = 0; x < 32; ++x) {
        const Ray r = camera_ray(cam, x, y, 32, 32);
        const TraceResult s = trace_ray_golden(r, bvh, {true, true});
        const TraceResult u = trace_ray_golden(r, bvh, {false, true});
        REQUIRE(same_bits(s.hit, u.hit));
        sorted += s.stats.triangle_tests;
        unsorted += u.stats.triangle_tests;
      }
    }
    CHECK(sorted <= unsorted);
  }
}
