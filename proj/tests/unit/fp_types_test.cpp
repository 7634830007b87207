#include <doctest.h>

#include <cmath>
#include <limits>

#include "rayflex/errors.hpp"
#include "rayflex/fp.hpp"
#include "rayflex/shared_record.hpp"
#include "support/job_gen.hpp"

using namespace rayflex;

namespace {
const float kInf = std::numeric_limits<float>::infinity();
const float kNaN = std::numeric_limits<float>::quiet_NaN();
}  // namespace

TEST_CASE("fp operations round each step to binary32") {
  // 1 + 2^-24 is a tie and rounds to even.
  CHECK(fp::add(1.0f, 0x1.0p-24f) == 1.0f);
  CHECK(fp::add(1.0f, 0x1.8p-24f) == 0x1.000002p0f);
  // (a*b)+c differs from a fused multiply-add.
  const float a = 0x1.000002p0f;
  const float p = fp::mul(a, a);
  CHECK(fp::add(fp::mul(a, a), -p) == 0.0f);
  CHECK(std::fma(a, a, -p) != 0.0f);
}

TEST_CASE("fp min and max propagate NaN") {
  CHECK(fp::is_nan(fp::max(kNaN, 1.0f)));
  CHECK(fp::is_nan(fp::max(1.0f, kNaN)));
  CHECK(fp::is_nan(fp::min(kNaN, 1.0f)));
  CHECK(fp::is_nan(fp::min(1.0f, kNaN)));
  CHECK(fp::max(-kInf, 3.0f) == 3.0f);
  CHECK(fp::min(kInf, 3.0f) == 3.0f);
  CHECK_FALSE(fp::le(kNaN, kNaN));
  CHECK_FALSE(fp::ge(kNaN, 0.0f));
}

TEST_CASE("same_bits distinguishes signed zero and NaN payloads") {
  CHECK_FALSE(fp::same_bits(0.0f, -0.0f));
  CHECK(fp::same_bits(fp::from_bits(0x7fc00001u), fp::from_bits(0x7fc00001u)));
  CHECK_FALSE(fp::same_bits(fp::from_bits(0x7fc00001u), fp::from_bits(0x7fc00002u)));
}

TEST_CASE("Aabb::checked rejects inverted boxes") {
  CHECK_NOTHROW(Aabb::checked({0, 0, 0}, {0, 1, 2}));
  CHECK_THROWS_AS(Aabb::checked({1, 0, 0}, {0, 1, 1}), DomainError);
  const Aabb e = Aabb::empty_slot();
  CHECK(fp::is_nan(e.lo.x));
  CHECK(fp::is_nan(e.hi.z));
}

TEST_CASE("pack and unpack preserve every payload bit") {
  testing::JobGen gen(11);
  for (int i = 0; i < 2000; ++i) {
    JobInput job = gen.any_job(true);
    job.euclidean_a[3] = fp::from_bits(0x7fa12345u);  // signalling-NaN payload
    job.triangle.v1.y = fp::from_bits(0xffc0beefu);
    const JobInput back = unpack_input(pack_input(job));
    REQUIRE(same_bits(job, back));
  }
}

TEST_CASE("opcode names") {
  CHECK(to_string(Opcode::QuadBox) == "quadbox");
  CHECK(is_extended(Opcode::Cosine));
  CHECK_FALSE(is_extended(Opcode::Triangle));
}
