#include <doctest.h>

#include <sstream>

#include "rayflex/datapath.hpp"
#include "rayflex/fu_model.hpp"
#include "support/job_gen.hpp"

using namespace rayflex;

namespace {

FuActivity run_stream(DatapathConfig cfg, Opcode op, int jobs) {
  cfg.keep_activity_log = true;
  Datapath dp(cfg);
  testing::JobGen gen(1);
  for (int i = 0; i < jobs; ++i) dp.submit(gen.job(op));
  dp.drain();
  return dp.activity();
}

DatapathConfig cfg(FeatureSet f, FuSharing s) {
  DatapathConfig c;
  c.feature_set = f;
  c.fu_sharing = s;
  return c;
}

}  // namespace

TEST_CASE("inventory totals") {
  CHECK(make_inventory(FeatureSet::Baseline, FuSharing::Unified).total_ops() == 125);
  CHECK(make_inventory(FeatureSet::Baseline, FuSharing::Disjoint).total_ops() == 140);
  CHECK(make_inventory(FeatureSet::Extended, FuSharing::Unified).total_ops() == 133);
  CHECK(make_inventory(FeatureSet::Extended, FuSharing::Disjoint).total_ops() == 220);
}

TEST_CASE("stage-1 and stage-11 converters are not counted") {
  const auto inv = make_inventory(FeatureSet::Extended, FuSharing::Disjoint);
  CHECK(inv.stages[0].ops() == 0);
  CHECK(inv.stages[10].ops() == 0);
}

TEST_CASE("textual stage constraints hold in the table") {
  const auto& box = op_usage(Opcode::QuadBox);
  CHECK(box[1].adders == 24);
  CHECK(box[2].multipliers == 24);
  CHECK(box[3].quadsort == 1);
  for (int st = 5; st <= 9; ++st) CHECK(box[st - 1].ops() == 0);
  CHECK(op_usage(Opcode::Euclidean)[2].multipliers == 16);
  CHECK(op_usage(Opcode::Cosine)[2].multipliers == 16);
  int tri_total = 0;
  for (const auto& c : op_usage(Opcode::Triangle)) tri_total += c.ops();
  CHECK(tri_total == 47);
}

TEST_CASE("disjoint is at least unified at every stage, extended above baseline") {
  for (auto f : {FeatureSet::Baseline, FeatureSet::Extended}) {
    const auto u = make_inventory(f, FuSharing::Unified);
    const auto d = make_inventory(f, FuSharing::Disjoint);
    for (std::size_t st = 0; st < u.stages.size(); ++st) CHECK(fits_within(u.stages[st], d.stages[st]));
  }
  const auto b = make_inventory(FeatureSet::Baseline, FuSharing::Unified);
  const auto e = make_inventory(FeatureSet::Extended, FuSharing::Unified);
  CHECK(e.total_ops() > b.total_ops());
  for (std::size_t st = 0; st < b.stages.size(); ++st) CHECK(fits_within(b.stages[st], e.stages[st]));
}

TEST_CASE("idle pipeline has no activity") {
  Datapath dp;
  for (int i = 0; i < 50; ++i) dp.step(true);
  for (const auto& c : dp.activity().totals()) CHECK(c.ops() == 0);
  CHECK(dp.report().utilization == 0.0);
}

TEST_CASE("stage-3 multiplier activity per stream") {
  const auto ext = cfg(FeatureSet::Extended, FuSharing::Unified);
  struct Want {
    Opcode op;
    int mults;
  };
  for (Want w : {Want{Opcode::QuadBox, 24}, Want{Opcode::Euclidean, 16}, Want{Opcode::Cosine, 16}}) {
    const FuActivity act = run_stream(ext, w.op, 200);
    int busy = 0;
    for (const auto& cycle : act.cycle_log()) {
      const int m = cycle[2].multipliers;
      CHECK((m == 0 || m == w.mults));
      busy += m == w.mults;
    }
    CHECK(busy == 200);
  }
}

TEST_CASE("activity never exceeds inventory") {
  for (auto f : {FeatureSet::Baseline, FeatureSet::Extended}) {
    for (auto s : {FuSharing::Unified, FuSharing::Disjoint}) {
      DatapathConfig c = cfg(f, s);
      c.keep_activity_log = true;
      Datapath dp(c);
      testing::JobGen gen(2);
      for (int i = 0; i < 500; ++i) dp.submit(gen.any_job(f == FeatureSet::Extended));
      dp.drain();
      for (const auto& cycle : dp.activity().cycle_log()) {
        for (std::size_t st = 0; st < cycle.size(); ++st) REQUIRE(fits_within(cycle[st], dp.inventory().stages[st]));
      }
    }
  }
}

TEST_CASE("per-op activity does not depend on sharing") {
  const FuActivity u = run_stream(cfg(FeatureSet::Extended, FuSharing::Unified), Opcode::Triangle, 300);
  const FuActivity d = run_stream(cfg(FeatureSet::Extended, FuSharing::Disjoint), Opcode::Triangle, 300);
  CHECK(u.totals_for(Opcode::Triangle) == d.totals_for(Opcode::Triangle));
}

TEST_CASE("report output") {
  Datapath dp;
  testing::JobGen gen(3);
  for (int i = 0; i < 100; ++i) dp.submit(gen.box_job());
  dp.drain();
  const FuReport r = dp.report();
  CHECK(r.cycles == dp.cycle());
  CHECK(r.utilization > 0.0);
  CHECK(r.utilization <= 100.0);
  std::ostringstream os;
  print_report(os, r);
  CHECK(os.str().find("total ops/cycle: 125") != std::string::npos);
  std::ostringstream csv;
  write_report_csv(csv, r);
  CHECK(csv.str().rfind("stage,adders", 0) == 0);
}
