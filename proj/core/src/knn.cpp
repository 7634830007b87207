#include "rayflex/knn.hpp"

#include <algorithm>
#include <numeric>

#include "rayflex/errors.hpp"
#include "rayflex/fp.hpp"
#include "rayflex/kernels.hpp"

namespace rayflex {

namespace {

std::vector<JobInput> make_beats(Opcode op, std::span<const float> a, std::span<const float> b, std::size_t lanes) {
  if (a.size() != b.size()) throw DomainError("vector dimensions differ");
  if (a.empty()) throw DomainError("vector dimension must be at least 1");
  std::vector<JobInput> beats;
  for (std::size_t base = 0; base < a.size(); base += lanes) {
    JobInput job;
    job.opcode = op;
    const std::size_t n = std::min(lanes, a.size() - base);
    for (std::size_t i = 0; i < n; ++i) {
      job.euclidean_a[i] = a[base + i];
      job.euclidean_b[i] = b[base + i];
    }
    job.euclidean_mask = static_cast<std::uint16_t>((1u << n) - 1u);
    job.reset_accumulator = base + lanes >= a.size();
    beats.push_back(job);
  }
  return beats;
}

}  // namespace

std::vector<JobInput> euclidean_beats(std::span<const float> a, std::span<const float> b) {
  return make_beats(Opcode::Euclidean, a, b, kVectorLanes);
}

std::vector<JobInput> cosine_beats(std::span<const float> a, std::span<const float> b) {
  return make_beats(Opcode::Cosine, a, b, kCosineLanes);
}

float reference_squared_distance(std::span<const float> a, std::span<const float> b) {
  float acc = 0.0f;
  for (const auto& job : euclidean_beats(a, b)) {
    acc = fp::add(acc, euclidean_partial(job.euclidean_a, job.euclidean_b, job.euclidean_mask));
  }
  return acc;
}

CosinePartial reference_cosine(std::span<const float> a, std::span<const float> b) {
  CosinePartial acc;
  for (const auto& job : cosine_beats(a, b)) {
    const CosinePartial p = cosine_partial(std::span<const float, kCosineLanes>(job.euclidean_a.data(), kCosineLanes),
                                           std::span<const float, kCosineLanes>(job.euclidean_b.data(), kCosineLanes),
                                           static_cast<std::uint8_t>(job.euclidean_mask));
    acc.dot = fp::add(acc.dot, p.dot);
    acc.norm = fp::add(acc.norm, p.norm);
  }
  return acc;
}

KnnResult knn_query(std::span<const float> query, const std::vector<std::vector<float>>& dataset,
                    std::size_t k, Datapath& datapath) {
  if (datapath.config().feature_set != FeatureSet::Extended) {
    throw ConfigurationError("knn_query needs an Extended datapath");
  }
  if (query.empty()) throw DomainError("query dimension must be at least 1");
  for (const auto& row : dataset) {
    if (row.size() != query.size()) throw DomainError("dataset row dimension differs from query");
  }

  KnnResult result;
  std::vector<float> dist;
  dist.reserve(dataset.size());
  std::size_t next_row = 0;
  std::vector<JobInput> pending;
  std::size_t pending_pos = 0;
  while (dist.size() < dataset.size()) {
    if (pending_pos == pending.size() && next_row < dataset.size()) {
      pending = euclidean_beats(query, dataset[next_row++]);
      pending_pos = 0;
    }
    if (datapath.queued() == 0 && pending_pos < pending.size()) {
      datapath.submit(pending[pending_pos++]);
      ++result.jobs;
    }
    if (auto done = datapath.step(true); done && done->output.dist.euclidean_reset) {
      dist.push_back(done->output.dist.euclidean_accumulator);
    }
  }

  std::vector<std::uint32_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) { return dist[x] < dist[y]; });

  std::vector<double> exact(dataset.size());
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    double s = 0;
    for (std::size_t i = 0; i < query.size(); ++i) {
      const double d = static_cast<double>(query[i]) - dataset[r][i];
      s += d * d;
    }
    exact[r] = s;
  }
  std::vector<std::uint32_t> exact_order(order.size());
  std::iota(exact_order.begin(), exact_order.end(), 0u);
  std::stable_sort(exact_order.begin(), exact_order.end(),
                   [&](std::uint32_t x, std::uint32_t y) { return exact[x] < exact[y]; });

  k = std::min(k, dataset.size());
  for (std::size_t r = 0; r < k; ++r) {
    result.neighbors.push_back({order[r], dist[order[r]]});
    if (order[r] != exact_order[r]) result.flagged_ranks.push_back(r);
  }
  return result;
}

}  // namespace rayflex
