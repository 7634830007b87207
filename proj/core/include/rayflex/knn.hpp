#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rayflex/datapath.hpp"
#include "rayflex/types.hpp"

namespace rayflex {

struct Neighbor {
  std::uint32_t id = 0;
  float squared_distance = 0.0f;
};

struct KnnResult {
  std::vector<Neighbor> neighbors;  // ascending distance, ties by lower id
  // Ranks (0-based) where a double-precision brute-force ranking picks a
  // different id; binary32 rounding can reorder near-ties.
  std::vector<std::size_t> flagged_ranks;
  std::uint64_t jobs = 0;
};

// Number of 16-lane beats for a d-dimensional vector.
inline std::size_t beat_count(std::size_t d) { return (d + kVectorLanes - 1) / kVectorLanes; }

// Beat jobs for one squared-distance query: full beats, a masked final
// partial beat and reset on the last beat.
std::vector<JobInput> euclidean_beats(std::span<const float> a, std::span<const float> b);

// Same for the angular path: 8 lanes per beat.
std::vector<JobInput> cosine_beats(std::span<const float> a, std::span<const float> b);

// Golden beat-order accumulation: per-beat partials added to +0 in order.
float reference_squared_distance(std::span<const float> a, std::span<const float> b);
CosinePartial reference_cosine(std::span<const float> a, std::span<const float> b);

// k nearest dataset rows to query by squared Euclidean distance, computed on
// the datapath. Throws ConfigurationError on a Baseline datapath and
// DomainError for d = 0 or rows of another dimension.
KnnResult knn_query(std::span<const float> query, const std::vector<std::vector<float>>& dataset,
                    std::size_t k, Datapath& datapath);

}  // namespace rayflex
