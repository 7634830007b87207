#include "rayflex/validation.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "rayflex/kernels.hpp"

namespace rayflex {

namespace {

constexpr float kExtent = 1e30f;

Aabb unit_box() { return Aabb::checked({2, -1, -1}, {4, 1, 1}); }

Aabb slab_x(float lo, float hi) { return Aabb::checked({lo, -1, -1}, {hi, 1, 1}); }

ValidationCase box_case(int n, std::string name, Vec3 origin, Vec3 dir, std::array<Aabb, kBoxesPerJob> boxes) {
  ValidationCase c;
  c.number = n;
  c.name = std::move(name);
  c.job.opcode = Opcode::QuadBox;
  c.job.ray = precompute_ray_transform(origin, dir, kExtent);
  c.job.boxes = boxes;
  for (std::uint32_t i = 0; i < kBoxesPerJob; ++i) c.job.child_ptr[i] = NodeRef{100 + i};
  return c;
}

ValidationCase single_box(int n, std::string name, Vec3 origin, Vec3 dir) {
  return box_case(n, std::move(name), origin, dir,
                  {unit_box(), Aabb::empty_slot(), Aabb::empty_slot(), Aabb::empty_slot()});
}

ValidationCase tri_case(int n, std::string name, Vec3 origin, Vec3 dir, Triangle tri) {
  ValidationCase c;
  c.number = n;
  c.name = std::move(name);
  c.job.opcode = Opcode::Triangle;
  c.job.ray = precompute_ray_transform(origin, dir, kExtent);
  tri.id = static_cast<std::uint32_t>(n);
  c.job.triangle = tri;
  return c;
}

// Front-facing for rays travelling along +z.
Triangle front_z(float z) { return {{-1, -1, z}, {1, -1, z}, {0, 1, z}, 0}; }
Triangle back_z(float z) { return {{-1, -1, z}, {0, 1, z}, {1, -1, z}, 0}; }

std::vector<ValidationCase> box_cases() {
  std::vector<ValidationCase> v;

  auto c = single_box(1, "ray origin inside the box", {3, 0, 0}, {1, 0, 0});
  c.box_hit = {true, false, false, false};
  c.hit_order = {0};
  c.hit_tmin = {0.0f};
  v.push_back(c);

  c = single_box(2, "outside, pointing away: miss", {6, 0, 0}, {1, 0, 0});
  v.push_back(c);

  c = single_box(3, "on a surface, pointing away: miss", {4, 0, 1}, {1, 0, 0});
  v.push_back(c);

  c = single_box(4, "on a corner, pointing away: miss", {4, 1, 1}, {1, 1, 0});
  v.push_back(c);

  c = single_box(5, "on a corner, along an edge: coplanar NaN miss", {2, -1, -1}, {1, 0, 0});
  v.push_back(c);

  c = single_box(6, "outside, pointing at the box", {0, 0, 0}, {1, 0, 0});
  c.box_hit = {true, false, false, false};
  c.hit_order = {0};
  c.hit_tmin = {2.0f};
  v.push_back(c);

  c = box_case(7, "two boxes in a row, sorted near first", {0, 0, 0}, {1, 0, 0},
               {slab_x(6, 8), slab_x(2, 4), Aabb::empty_slot(), Aabb::empty_slot()});
  c.box_hit = {true, true, false, false};
  c.hit_order = {1, 0};
  c.hit_tmin = {2.0f, 6.0f};
  v.push_back(c);

  c = box_case(8, "three boxes in a row and one off the path", {0, 0, 0}, {1, 0, 0},
               {slab_x(10, 12), slab_x(2, 4), Aabb::checked({2, 5, -1}, {4, 6, 1}), slab_x(6, 8)});
  c.box_hit = {true, true, false, true};
  c.hit_order = {1, 3, 0};
  c.hit_tmin = {2.0f, 6.0f, 10.0f};
  v.push_back(c);

  c = single_box(9, "outside, grazing along an edge: coplanar NaN miss", {0, 1, 1}, {1, 0, 0});
  v.push_back(c);

  return v;
}

std::vector<ValidationCase> triangle_cases() {
  std::vector<ValidationCase> v;

  auto c = tri_case(1, "back face culled", {0, 0, 0}, {0, 0, 1}, back_z(5));
  v.push_back(c);

  c = tri_case(2, "front face hit", {0, 0, 0}, {0, 0, 1}, front_z(5));
  c.tri_hit = true;
  c.tri_t = 5.0;
  v.push_back(c);

  c = tri_case(3, "hit exactly on an edge", {0, -1, 0}, {0, 0, 1}, front_z(5));
  c.tri_hit = true;
  c.tri_t = 5.0;
  v.push_back(c);

  c = tri_case(4, "hit exactly on a vertex", {-1, -1, 0}, {0, 0, 1}, front_z(5));
  c.tri_hit = true;
  c.tri_t = 5.0;
  v.push_back(c);

  c = tri_case(5, "oblique ray passing beside the triangle", {0, 0, 0}, {1, 0, 1}, front_z(5));
  v.push_back(c);

  // Front-facing for a ray along -z, but behind the origin.
  c = tri_case(6, "ray parallel to the normal, triangle behind", {0, 0, 0}, {0, 0, -1}, back_z(5));
  v.push_back(c);

  c = tri_case(7, "far-away large triangle", {0, 0, 0}, {0, 0, 1},
               {{-1e5f, -1e5f, 1e6f}, {1e5f, -1e5f, 1e6f}, {0, 1e5f, 1e6f}, 0});
  c.tri_hit = true;
  c.tri_t = 1e6;
  v.push_back(c);

  c = tri_case(8, "oblique ray through the interior", {0, 0, 0}, {0.05f, -0.1f, 1}, front_z(5));
  c.tri_hit = true;
  c.tri_t = 5.0;
  v.push_back(c);

  c = tri_case(9, "coplanar ray along an edge: miss", {-3, -1, 5}, {1, 0, 0}, front_z(5));
  v.push_back(c);

  c = tri_case(10, "dominant axis x", {0, 0, 0}, {1, 0, 0}, {{5, -1, -1}, {5, 1, -1}, {5, 0, 1}, 0});
  c.tri_hit = true;
  c.tri_t = 5.0;
  v.push_back(c);

  c = tri_case(11, "coplanar ray starting inside the triangle: miss", {0, 0, 5}, {1, 0, 0}, front_z(5));
  v.push_back(c);

  return v;
}

}  // namespace

std::vector<ValidationCase> functional_cases() {
  auto v = box_cases();
  for (auto& c : triangle_cases()) v.push_back(std::move(c));
  return v;
}

bool meets_expectation(const ValidationCase& c, const JobOutput& out, std::string* why) {
  std::ostringstream msg;
  bool ok = true;
  if (out.opcode != c.job.opcode) {
    msg << "opcode " << to_string(out.opcode) << "; ";
    ok = false;
  } else if (c.job.opcode == Opcode::QuadBox) {
    for (std::size_t i = 0; i < kBoxesPerJob; ++i) {
      const std::size_t slot = out.box.order[i];
      if (out.box.hit[i] != c.box_hit[slot]) {
        msg << "box " << slot << " hit=" << out.box.hit[i] << "; ";
        ok = false;
      }
    }
    for (std::size_t i = 0; i < c.hit_order.size(); ++i) {
      if (out.box.order[i] != c.hit_order[i]) {
        msg << "order[" << i << "]=" << int(out.box.order[i]) << "; ";
        ok = false;
      }
      if (i < c.hit_tmin.size() && out.box.tmin[i] != c.hit_tmin[i]) {
        msg << "tmin[" << i << "]=" << out.box.tmin[i] << "; ";
        ok = false;
      }
      if (!(out.box.child_ptr_sorted[i] == c.job.child_ptr[c.hit_order[i]])) {
        msg << "child_ptr[" << i << "]; ";
        ok = false;
      }
    }
  } else {
    if (out.tri.hit != c.tri_hit) {
      msg << "hit=" << out.tri.hit << "; ";
      ok = false;
    } else if (c.tri_hit) {
      if (out.tri.triangle_id != c.job.triangle.id) {
        msg << "id=" << out.tri.triangle_id << "; ";
        ok = false;
      }
      if (c.tri_t) {
        const double t = static_cast<double>(out.tri.t_num) / out.tri.t_denom;
        if (!(std::fabs(t - *c.tri_t) <= 1e-6 * *c.tri_t)) {
          msg << "t=" << t << "; ";
          ok = false;
        }
      }
    }
  }
  if (why) *why = msg.str();
  return ok;
}

std::vector<CaseOutcome> run_validation(const std::vector<ValidationCase>& cases, const DatapathConfig& config,
                                        std::ostream* trace) {
  ReferenceModel golden(config.culling);
  Datapath dp(config);
  dp.set_trace(trace);
  std::vector<JobOutput> expected;
  for (const auto& c : cases) {
    expected.push_back(golden.run(c.job));
    dp.submit(c.job);
  }
  const auto done = dp.drain();

  std::vector<CaseOutcome> outcomes;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    CaseOutcome o;
    o.test = &cases[i];
    std::string why;
    o.golden_ok = meets_expectation(cases[i], expected[i], &why);
    if (!o.golden_ok) o.detail += "golden: " + why;
    if (i < done.size()) {
      std::string pwhy;
      o.pipeline_ok = meets_expectation(cases[i], done[i].output, &pwhy);
      if (!o.pipeline_ok) o.detail += "pipeline: " + pwhy;
      o.bit_identical = same_result(expected[i], done[i].output);
      if (!o.bit_identical) o.detail += "pipeline differs from golden; ";
    } else {
      o.detail += "pipeline produced no output; ";
    }
    outcomes.push_back(o);
  }
  return outcomes;
}

bool print_validation(std::ostream& os, const std::vector<CaseOutcome>& outcomes) {
  int passed = 0;
  for (const auto& o : outcomes) {
    const char* kind = o.test->job.opcode == Opcode::QuadBox ? "box" : "triangle";
    os << (o.pass() ? "PASS" : "FAIL") << "  " << kind << " case " << o.test->number << ": " << o.test->name;
    if (!o.pass()) os << "  [" << o.detail << "]";
    os << '\n';
    passed += o.pass();
  }
  os << passed << '/' << outcomes.size() << " cases passed\n";
  return passed == static_cast<int>(outcomes.size());
}

}  // namespace rayflex
