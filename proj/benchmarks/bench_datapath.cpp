#include <benchmark/benchmark.h>

#include <vector>

#include "rayflex/bvh.hpp"
#include "rayflex/datapath.hpp"
#include "rayflex/kernels.hpp"
#include "rayflex/knn.hpp"
#include "rayflex/render.hpp"
#include "support/job_gen.hpp"

using namespace rayflex;

namespace {

std::vector<JobInput> jobs_of(Opcode op, int n) {
  testing::JobGen gen(11);
  std::vector<JobInput> v;
  for (int i = 0; i < n; ++i) v.push_back(gen.job(op));
  return v;
}

void BM_QuadBoxKernel(benchmark::State& state) {
  const auto jobs = jobs_of(Opcode::QuadBox, 1024);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& j = jobs[i++ % jobs.size()];
    benchmark::DoNotOptimize(quad_box_test(j.ray, j.boxes, j.child_ptr));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_QuadBoxKernel);

void BM_TriangleKernel(benchmark::State& state) {
  const auto jobs = jobs_of(Opcode::Triangle, 1024);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& j = jobs[i++ % jobs.size()];
    benchmark::DoNotOptimize(watertight_triangle_test(j.ray, j.triangle));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_TriangleKernel);

void BM_EuclideanKernel(benchmark::State& state) {
  const auto jobs = jobs_of(Opcode::Euclidean, 1024);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& j = jobs[i++ % jobs.size()];
    benchmark::DoNotOptimize(euclidean_partial(j.euclidean_a, j.euclidean_b, j.euclidean_mask));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EuclideanKernel);

// Simulated cycles per second for a back-to-back stream of one opcode.
void BM_DatapathStream(benchmark::State& state) {
  const auto op = static_cast<Opcode>(state.range(0));
  const auto jobs = jobs_of(op, 4096);
  DatapathConfig cfg;
  cfg.feature_set = FeatureSet::Extended;
  for (auto _ : state) {
    Datapath dp(cfg);
    for (const auto& j : jobs) dp.submit(j);
    benchmark::DoNotOptimize(dp.drain());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(jobs.size()));
  state.SetLabel(std::string(to_string(op)));
}
BENCHMARK(BM_DatapathStream)
    ->Arg(static_cast<int>(Opcode::QuadBox))
    ->Arg(static_cast<int>(Opcode::Triangle))
    ->Arg(static_cast<int>(Opcode::Euclidean))
    ->Arg(static_cast<int>(Opcode::Cosine))
    ->Unit(benchmark::kMillisecond);

void BM_Render(benchmark::State& state) {
  const auto scene = make_demo_scene(1, 128);
  RenderOptions opts;
  opts.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(render(scene, DatapathConfig{}, opts));
  state.SetItemsProcessed(state.iterations() * opts.width * opts.height);
}
BENCHMARK(BM_Render)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_Knn(benchmark::State& state) {
  testing::JobGen gen(12);
  std::vector<std::vector<float>> data;
  for (int i = 0; i < 256; ++i) data.push_back(gen.vec(static_cast<std::size_t>(state.range(0))));
  const auto query = gen.vec(static_cast<std::size_t>(state.range(0)));
  DatapathConfig cfg;
  cfg.feature_set = FeatureSet::Extended;
  for (auto _ : state) {
    Datapath dp(cfg);
    benchmark::DoNotOptimize(knn_query(query, data, 8, dp));
  }
}
BENCHMARK(BM_Knn)->Arg(16)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
