// Acceptance checks: one line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <deque>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rayflex/bvh.hpp"
#include "rayflex/datapath.hpp"
#include "rayflex/fp.hpp"
#include "rayflex/knn.hpp"
#include "rayflex/render.hpp"
#include "rayflex/validation.hpp"
#include "support/job_gen.hpp"

using namespace rayflex;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int n, const char* title, const Verdict& v) {
  std::cout << "criterion " << n << ": " << (v.pass ? "PASS" : "FAIL") << "  " << title << "  [" << v.detail << "]"
            << std::endl;
  failures += !v.pass;
}

DatapathConfig config(FeatureSet f, FuSharing s) {
  DatapathConfig c;
  c.feature_set = f;
  c.fu_sharing = s;
  return c;
}

const std::pair<FeatureSet, FuSharing> kQuadrants[] = {
    {FeatureSet::Baseline, FuSharing::Unified},
    {FeatureSet::Baseline, FuSharing::Disjoint},
    {FeatureSet::Extended, FuSharing::Unified},
    {FeatureSet::Extended, FuSharing::Disjoint},
};

std::string quadrant_name(FeatureSet f, FuSharing s) {
  return std::string(to_string(f)) + "+" + std::string(to_string(s));
}

// Pushes jobs back to back (the port is refilled every cycle) and collects
// completions, with the sink ready as sink_ready(cycle) says.
template <class Sink>
std::vector<CompletedJob> stream(Datapath& dp, const std::vector<JobInput>& jobs, Sink sink_ready) {
  std::vector<CompletedJob> done;
  done.reserve(jobs.size());
  std::size_t next = 0;
  while (done.size() < jobs.size()) {
    while (next < jobs.size() && dp.queued() < 2) dp.submit(jobs[next++]);
    if (auto c = dp.step(sink_ready(dp.cycle()))) done.push_back(std::move(*c));
  }
  return done;
}

std::vector<CompletedJob> stream(Datapath& dp, const std::vector<JobInput>& jobs) {
  return stream(dp, jobs, [](std::uint64_t) { return true; });
}

Verdict criterion1() {
  const auto t0 = Clock::now();
  const auto cases = functional_cases();
  DatapathConfig c;
  c.check_write_once = true;
  const auto outcomes = run_validation(cases, c);
  const double secs = seconds_since(t0);
  int box = 0;
  int tri = 0;
  Verdict v;
  std::string failed;
  for (const auto& o : outcomes) {
    if (o.pass()) {
      (o.test->job.opcode == Opcode::QuadBox ? box : tri) += 1;
    } else {
      failed += " " + o.test->name;
    }
  }
  v.pass = box == 9 && tri == 11 && outcomes.size() == 20 && secs < 1.0;
  std::ostringstream os;
  os << box << "/9 box, " << tri << "/11 triangle through golden and pipeline, " << secs * 1e3 << " ms (limit 1000)";
  if (!failed.empty()) os << "; failed:" << failed;
  v.detail = os.str();
  return v;
}

Verdict criterion2() {
  Verdict v;
  std::uint64_t checked = 0;
  for (auto [f, s] : kQuadrants) {
    testing::JobGen gen(200 + static_cast<int>(f) * 2 + static_cast<int>(s));
    std::vector<JobInput> jobs;
    for (int i = 0; i < 10000; ++i) jobs.push_back(gen.any_job(f == FeatureSet::Extended));
    Datapath dp(config(f, s));
    const auto done = stream(dp, jobs);
    for (std::size_t i = 0; i < done.size(); ++i) {
      const bool latency_ok = done[i].output_fire_cycle - done[i].input_fire_cycle == 11;
      const bool rate_ok = i == 0 || done[i].output_fire_cycle == done[i - 1].output_fire_cycle + 1;
      const bool order_ok = done[i].seq == i;
      if (!(latency_ok && rate_ok && order_ok)) {
        v.pass = false;
        v.detail = quadrant_name(f, s) + ": job " + std::to_string(i) + " latency " +
                   std::to_string(done[i].output_fire_cycle - done[i].input_fire_cycle);
        return v;
      }
      ++checked;
    }
    const std::uint64_t span = done.back().output_fire_cycle - done.front().output_fire_cycle + 1;
    if (span != done.size()) v.pass = false;
  }
  v.detail = std::to_string(checked) + " jobs over 4 configs: latency 11 every job, one output per cycle";
  return v;
}

Verdict criterion3() {
  Verdict v;
  testing::JobGen gen(300);
  std::vector<JobInput> jobs;
  for (int i = 0; i < 10000; ++i) jobs.push_back(gen.any_job(true));
  const auto cfg = config(FeatureSet::Extended, FuSharing::Unified);
  Datapath ref_dp(cfg);
  const auto reference = stream(ref_dp, jobs);

  int schedules = 0;
  std::uint64_t stalled_cycles = 0;
  for (int k = 0; k < 100; ++k) {
    const double p = 0.1 * (1 + k % 9);
    testing::JobGen stall(1000 + k);
    Datapath dp(cfg);
    const auto got = stream(dp, jobs, [&](std::uint64_t) {
      const bool stalled = stall.chance(p);
      stalled_cycles += stalled;
      return !stalled;
    });
    bool same = got.size() == reference.size();
    for (std::size_t i = 0; same && i < got.size(); ++i) same = same_bits(got[i].output, reference[i].output);
    if (!same) {
      v.pass = false;
      v.detail = "schedule " + std::to_string(k) + " (p=" + std::to_string(p) + ") diverged";
      return v;
    }
    ++schedules;
  }
  v.detail = std::to_string(schedules) + " Bernoulli stall schedules (p=0.1..0.9) x 10^4 jobs, " +
             std::to_string(stalled_cycles) + " stalled cycles, all streams bit-identical";
  return v;
}

Verdict criterion4() {
  const auto t0 = Clock::now();
  constexpr int kPerOp = 100000;
  Verdict v;

  // One stream per feature set; ray jobs are the same objects in both.
  testing::JobGen gen(400);
  std::vector<JobInput> ext_jobs;
  std::vector<std::size_t> ray_index;  // positions of ray jobs in ext_jobs
  std::vector<int> remaining{kPerOp, kPerOp, kPerOp, kPerOp};
  const Opcode ops[] = {Opcode::QuadBox, Opcode::Triangle, Opcode::Euclidean, Opcode::Cosine};
  std::size_t left = 4 * kPerOp;
  while (left) {
    int pick = gen.below(4);
    while (remaining[pick] == 0) pick = (pick + 1) % 4;
    --remaining[pick];
    --left;
    if (!is_extended(ops[pick])) ray_index.push_back(ext_jobs.size());
    ext_jobs.push_back(gen.job(ops[pick]));
  }
  std::vector<JobInput> base_jobs;
  for (auto i : ray_index) base_jobs.push_back(ext_jobs[i]);

  std::vector<std::vector<CompletedJob>> results;
  std::uint64_t compared = 0;
  for (auto [f, s] : kQuadrants) {
    const auto& jobs = f == FeatureSet::Extended ? ext_jobs : base_jobs;
    Datapath dp(config(f, s));
    auto done = stream(dp, jobs);
    ReferenceModel golden;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (!same_bits(done[i].output, golden.run(jobs[i]))) {
        v.pass = false;
        v.detail = quadrant_name(f, s) + ": job " + std::to_string(i) + " (" +
                   std::string(to_string(jobs[i].opcode)) + ") differs from golden";
        return v;
      }
      ++compared;
    }
    results.push_back(std::move(done));
  }

  // Quadrants against each other on shared opcodes.
  bool cross = true;
  for (std::size_t q = 1; q < 4; ++q) {
    const bool q_ext = kQuadrants[q].first == FeatureSet::Extended;
    for (std::size_t r = 0; r < ray_index.size(); ++r) {
      const auto& a = results[0][r].output;
      const auto& b = results[q][q_ext ? ray_index[r] : r].output;
      cross = cross && same_bits(a, b);
    }
  }
  for (std::size_t i = 0; i < ext_jobs.size(); ++i) cross = cross && same_bits(results[2][i].output, results[3][i].output);

  const double secs = seconds_since(t0);
  v.pass = cross && secs < 120.0;
  std::ostringstream os;
  os << compared << " job results vs golden (10^5 per opcode per config), cross-config "
     << (cross ? "identical" : "DIFFERENT") << ", " << secs << " s (limit 120)";
  v.detail = os.str();
  return v;
}

Verdict criterion5() {
  Verdict v;
  const int total = make_inventory(FeatureSet::Baseline, FuSharing::Unified).total_ops();
  v.pass = total == 125;
  v.detail = "baseline+unified inventory " + std::to_string(total) + " ops/cycle (published 125): " +
             (v.pass ? "MATCH" : "DISCREPANCY");
  return v;
}

// Multipliers active in stage 3 on every cycle a pure stream occupies it.
std::pair<int, int> stage3_multipliers(Opcode op) {
  DatapathConfig c = config(FeatureSet::Extended, FuSharing::Unified);
  c.keep_activity_log = true;
  Datapath dp(c);
  testing::JobGen gen(600);
  std::vector<JobInput> jobs;
  for (int i = 0; i < 1000; ++i) jobs.push_back(gen.job(op));
  stream(dp, jobs);
  int lo = 1 << 30;
  int hi = 0;
  int busy = 0;
  for (const auto& cycle : dp.activity().cycle_log()) {
    const int m = cycle[2].multipliers;
    if (m == 0) continue;
    ++busy;
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  return busy == 1000 ? std::pair{lo, hi} : std::pair{-1, -1};
}

Verdict criterion6() {
  Verdict v;
  const auto euc = stage3_multipliers(Opcode::Euclidean);
  const auto cos = stage3_multipliers(Opcode::Cosine);
  const auto& cos_usage = op_usage(Opcode::Cosine)[2];
  v.pass = euc == std::pair{16, 16} && cos == std::pair{16, 16} && cos_usage.multipliers == 16;
  std::ostringstream os;
  os << "stage-3 multipliers per busy cycle: euclidean " << euc.first << ".." << euc.second << " (16 squares), cosine "
     << cos.first << ".." << cos.second << " (8 b*b squares + 8 a*b products)";
  v.detail = os.str();
  return v;
}

struct Query {
  Opcode op;
  std::vector<JobInput> beats;
  DistanceResult isolated;
};

Verdict criterion7() {
  Verdict v;
  testing::JobGen gen(700);
  const auto cfg = config(FeatureSet::Extended, FuSharing::Unified);
  std::vector<Query> queries;
  for (int i = 0; i < 1000; ++i) {
    const Opcode op = i % 2 ? Opcode::Cosine : Opcode::Euclidean;
    const std::size_t d = 1 + static_cast<std::size_t>(gen.below(256));
    const auto a = gen.vec(d);
    const auto b = gen.vec(d);
    queries.push_back({op, op == Opcode::Euclidean ? euclidean_beats(a, b) : cosine_beats(a, b), {}});
  }

  // (a) isolated: each query alone in a fresh datapath.
  bool golden_ok = true;
  for (auto& q : queries) {
    Datapath dp(cfg);
    const auto done = stream(dp, q.beats);
    q.isolated = done.back().output.dist;
  }
  // Golden cross-check of the isolated values.
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto& q = queries[i];
    ReferenceModel ref;
    DistanceResult last;
    for (const auto& beat : q.beats) last = ref.run(beat).dist;
    golden_ok = golden_ok && same_bits(last, q.isolated);
  }

  // (b) one Euclidean and one Cosine query in flight at a time, their beats
  // randomly interleaved with each other and with ray jobs.
  std::vector<JobInput> mixed;
  std::vector<int> owner;  // query index per job, -1 for ray jobs
  std::deque<std::size_t> euc_q;
  std::deque<std::size_t> cos_q;
  for (std::size_t i = 0; i < queries.size(); ++i) (queries[i].op == Opcode::Euclidean ? euc_q : cos_q).push_back(i);
  std::size_t euc_pos = 0;
  std::size_t cos_pos = 0;
  while (!euc_q.empty() || !cos_q.empty()) {
    const int pick = gen.below(3);
    if (pick == 0 && !euc_q.empty()) {
      const auto qi = euc_q.front();
      mixed.push_back(queries[qi].beats[euc_pos]);
      owner.push_back(static_cast<int>(qi));
      if (++euc_pos == queries[qi].beats.size()) {
        euc_q.pop_front();
        euc_pos = 0;
      }
    } else if (pick == 1 && !cos_q.empty()) {
      const auto qi = cos_q.front();
      mixed.push_back(queries[qi].beats[cos_pos]);
      owner.push_back(static_cast<int>(qi));
      if (++cos_pos == queries[qi].beats.size()) {
        cos_q.pop_front();
        cos_pos = 0;
      }
    } else {
      JobInput ray = gen.chance(0.5) ? gen.box_job() : gen.triangle_job();
      ray.reset_accumulator = gen.chance(0.3);
      mixed.push_back(ray);
      owner.push_back(-1);
    }
  }
  Datapath dp(cfg);
  testing::JobGen stall(701);
  const auto done = stream(dp, mixed, [&](std::uint64_t) { return !stall.chance(0.3); });
  int matched = 0;
  for (std::size_t i = 0; i < done.size(); ++i) {
    if (owner[i] < 0 || !mixed[i].reset_accumulator) continue;
    const Query& q = queries[static_cast<std::size_t>(owner[i])];
    const auto& d = done[i].output.dist;
    const bool same = q.op == Opcode::Euclidean
                          ? fp::same_bits(d.euclidean_accumulator, q.isolated.euclidean_accumulator)
                          : fp::same_bits(d.angular_dot_product, q.isolated.angular_dot_product) &&
                                fp::same_bits(d.angular_norm, q.isolated.angular_norm);
    matched += same;
  }
  v.pass = matched == 1000 && golden_ok;
  std::ostringstream os;
  os << matched << "/1000 queries (d<=256, " << mixed.size() << " interleaved jobs with stalls) identical to isolated"
     << " runs; isolated runs " << (golden_ok ? "match" : "DIFFER from") << " golden beat accumulation";
  v.detail = os.str();
  return v;
}

Verdict criterion8() {
  Verdict v;
  const auto scene = make_demo_scene(1, 128);
  RenderOptions opts;
  const RenderResult r = render(scene, config(FeatureSet::Baseline, FuSharing::Unified), opts);
  const Image golden = render_golden(scene, opts);
  const bool image_ok = r.image.rgb == golden.rgb;

  const Bvh bvh = Bvh::build(scene);
  testing::JobGen gen(800);
  std::vector<Ray> rays;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 o = gen.point(3.0f);
    const Vec3 t = gen.point(1.0f);
    Vec3 d{t.x - o.x, t.y - o.y, t.z - o.z};
    if (d.x == 0 && d.y == 0 && d.z == 0) d.z = 1;
    rays.push_back(precompute_ray_transform(o, d, 1e30f));
  }
  Datapath dp;
  const auto traced = trace_rays(rays, bvh, dp);
  int agree = 0;
  int hits = 0;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    const TriangleResult ex = closest_hit_exhaustive(rays[i], scene);
    agree += same_bits(traced[i].hit, ex);
    hits += ex.hit;
  }
  v.pass = image_ok && agree == 1000;
  std::ostringstream os;
  os << "64x64 render of " << scene.size() << " triangles " << (image_ok ? "bit-identical" : "DIFFERENT")
     << " to golden (" << r.hits << " hit pixels); " << agree << "/1000 random rays equal exhaustive testing (" << hits
     << " hits)";
  v.detail = os.str();
  return v;
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  const Verdict c5 = criterion5();
  const Verdict c6 = criterion6();

  report(1, "functional validation suite", criterion1());
  report(2, "latency 11 and throughput 1/cycle", criterion2());
  report(3, "elasticity under backpressure", criterion3());
  report(4, "oracle equivalence in every config", criterion4());
  report(5, "FU inventory total", c5);
  report(6, "stage-3 multiplier activity", c6);
  report(7, "multi-beat queries isolated vs interleaved", criterion7());
  report(8, "end-to-end render and traversal self-consistency", criterion8());

  bool directions = true;
  for (auto f : {FeatureSet::Baseline, FeatureSet::Extended}) {
    const auto u = make_inventory(f, FuSharing::Unified);
    const auto d = make_inventory(f, FuSharing::Disjoint);
    for (std::size_t st = 0; st < u.stages.size(); ++st) directions = directions && fits_within(u.stages[st], d.stages[st]);
  }
  for (auto s : {FuSharing::Unified, FuSharing::Disjoint}) {
    directions = directions &&
                 make_inventory(FeatureSet::Extended, s).total_ops() > make_inventory(FeatureSet::Baseline, s).total_ops();
  }
  std::cout << "criterion 9: NOT REPRODUCIBLE  synthesized area, power and frequency sweep  [substituted by proxies: "
            << "inventory " << (c5.pass ? "ok" : "FAILED") << ", stage-3 activity " << (c6.pass ? "ok" : "FAILED")
            << ", direction checks (extended > baseline, disjoint >= unified per stage) "
            << (directions ? "ok" : "FAILED") << "]" << std::endl;
  failures += !directions;

  std::cout << "total " << seconds_since(t0) << " s, " << failures << " failing" << std::endl;
  return failures == 0 ? 0 : 1;
}
