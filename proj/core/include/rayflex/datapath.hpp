#pragma once

// The 11-stage intersection datapath.
//
//   stage  quad box                 triangle                       euclidean / cosine
//   1      JobInput -> SharedRecord (format conversion)
//   2      corners - origin         vertices - origin              a - b (euclidean)
//   3      * inv_dir                Sx*V[kz], Sy*V[kz]             squares / a*b, b*b
//   4      near/far, tmin/tmax,     sheared 2D coordinates         tree level 1
//          hit, QuadSort
//   5      -                        barycentric products, Sz*V[kz] tree level 2
//   6      -                        U, V, W                        tree level 3 (cosine done)
//   7      -                        U+V; U*Az, V*Bz, W*Cz          tree level 4 (euclidean done)
//   8      -                        det; U*Az + V*Bz               -
//   9      -                        T; extent*det                  -
//   10     -                        culling and range compares     accumulate
//   11     SharedRecord -> JobOutput (format conversion)
//
// Stages marked "-" copy their input record to the output unchanged.

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "rayflex/elastic_pipeline.hpp"
#include "rayflex/fu_model.hpp"
#include "rayflex/kernels.hpp"
#include "rayflex/shared_record.hpp"
#include "rayflex/types.hpp"

namespace rayflex {

struct DatapathConfig {
  FeatureSet feature_set = FeatureSet::Baseline;
  FuSharing fu_sharing = FuSharing::Unified;
  // Mutation-testing hook; Backface is the only correct setting.
  Culling culling = Culling::Backface;
  // Check the SharedRecord write-once / read-after-write discipline per job.
  bool check_write_once = false;
  // Keep per-cycle FU activity (FuActivity::cycle_log).
  bool keep_activity_log = false;
};

// Accumulator registers of the distance operations. Each is cleared only by
// a job of its own opcode that carries reset_accumulator.
struct AccumulatorState {
  float euclidean_acc = 0.0f;
  float angular_dot_acc = 0.0f;
  float angular_norm_acc = 0.0f;
};

// Applies one distance beat to the accumulators: the emitted value includes
// this beat's partial and the register clears after emitting when reset is
// set. Ray operations leave the registers untouched and report zeros.
DistanceResult accumulate(AccumulatorState& acc, Opcode op, float euclidean_partial,
                          const CosinePartial& cosine, bool reset);

struct CompletedJob {
  JobOutput output;
  std::uint64_t seq = 0;                // submission order, from 0
  std::uint64_t input_fire_cycle = 0;   // cycle the job entered stage 1
  std::uint64_t output_fire_cycle = 0;  // cycle it left stage 11
};

class Datapath {
 public:
  static constexpr int kStages = kPipelineStages;

  explicit Datapath(const DatapathConfig& config = {});
  Datapath(const Datapath&) = delete;
  Datapath& operator=(const Datapath&) = delete;
  ~Datapath();

  const DatapathConfig& config() const { return config_; }

  // Queues a job for the input port. Throws ConfigurationError for an
  // extended opcode on a Baseline datapath and DomainError for Bubble.
  // Returns the job's sequence number.
  std::uint64_t submit(const JobInput& job);

  // Advances one cycle. Returns the job whose output fired this cycle.
  std::optional<CompletedJob> step(bool sink_ready = true);

  // Steps with an always-ready sink until nothing is queued or in flight.
  std::vector<CompletedJob> drain();

  bool idle() const;
  std::size_t queued() const;
  std::size_t in_flight() const;
  std::uint64_t cycle() const;

  const FuInventory& inventory() const { return inventory_; }
  const FuActivity& activity() const { return activity_; }
  FuReport report() const { return fu_report(inventory_, activity_); }
  const AccumulatorState& accumulators() const { return acc_; }

  // CSV trace of every stage handshake; nullptr disables.
  void set_trace(std::ostream* os);

 private:
  using Pipe = elastic::Pipeline<JobInput, JobOutput>;

  Pipe build();
  SharedRecord run_stage(int stage, const SharedRecord& in);

  DatapathConfig config_;
  FuInventory inventory_;
  FuActivity activity_;
  AccumulatorState acc_;
  std::unique_ptr<Pipe> pipe_;

  elastic::Handshake<JobInput> port_;
  std::deque<JobInput> queue_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t port_seq_ = 0;
  struct InFlight {
    std::uint64_t seq;
    std::uint64_t input_fire_cycle;
  };
  std::deque<InFlight> in_flight_;
};

// Whole-job golden reference: runs the golden kernels directly, with its own
// accumulator registers. Same job sequence in, same outputs as Datapath.
class ReferenceModel {
 public:
  explicit ReferenceModel(Culling culling = Culling::Backface) : culling_(culling) {}

  JobOutput run(const JobInput& job);
  const AccumulatorState& accumulators() const { return acc_; }

 private:
  Culling culling_;
  AccumulatorState acc_;
};

}  // namespace rayflex
