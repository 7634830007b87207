#pragma once

#include <bit>
#include <cstdint>

namespace rayflex::fp {

// Binary32 functional-unit primitives. Each call is one rounded operation
// (round-to-nearest-even). They are out-of-line so every caller, kernel or
// pipeline stage, sees the same operand order and therefore the same NaN
// payload propagation.

float add(float a, float b);
float sub(float a, float b);
float mul(float a, float b);

// One comparator each. A NaN operand always wins, so an undefined slab
// interval poisons the whole reduction.
float max(float a, float b);
float min(float a, float b);

// Comparator flags as produced by the hardware compare unit: every relation
// is false when either operand is NaN.
inline bool lt(float a, float b) { return a < b; }
inline bool le(float a, float b) { return a <= b; }
inline bool gt(float a, float b) { return a > b; }
inline bool ge(float a, float b) { return a >= b; }

inline std::uint32_t bits(float v) { return std::bit_cast<std::uint32_t>(v); }
inline float from_bits(std::uint32_t b) { return std::bit_cast<float>(b); }

inline bool is_nan(float v) { return v != v; }

inline bool same_bits(float a, float b) { return bits(a) == bits(b); }

}  // namespace rayflex::fp
