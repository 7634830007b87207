#pragma once

// Functional-unit inventory and activity accounting: the software proxy for
// synthesized area and power. One adder, multiplier or comparator counts as
// one operation per cycle and a QuadSort unit as five comparators. The format
// converters in stages 1 and 11 are not counted.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "rayflex/types.hpp"

namespace rayflex {

inline constexpr int kPipelineStages = 11;
inline constexpr int kQuadSortComparators = 5;

enum class FeatureSet : std::uint8_t { Baseline, Extended };
enum class FuSharing : std::uint8_t { Unified, Disjoint };

std::string_view to_string(FeatureSet f);
std::string_view to_string(FuSharing s);

struct FuCounts {
  int adders = 0;
  int multipliers = 0;
  int comparators = 0;
  int quadsort = 0;

  int ops() const { return adders + multipliers + comparators + kQuadSortComparators * quadsort; }

  FuCounts& operator+=(const FuCounts& o);
  friend bool operator==(const FuCounts&, const FuCounts&) = default;
};

FuCounts elementwise_max(const FuCounts& a, const FuCounts& b);
bool fits_within(const FuCounts& used, const FuCounts& available);

using StageFuTable = std::array<FuCounts, kPipelineStages>;  // [0] is stage 1

// Units an operation occupies in each stage while its datum is there. This is
// the stage map of the datapath expressed as FU counts.
const StageFuTable& op_usage(Opcode op);

// Operations a feature set must support.
std::vector<Opcode> supported_ops(FeatureSet f);

struct FuInventory {
  FeatureSet feature_set = FeatureSet::Baseline;
  FuSharing sharing = FuSharing::Unified;
  StageFuTable stages{};

  int total_ops() const;
};

// Unified: per stage and FU kind, the maximum over supported operations.
// Disjoint: the sum, since every operation owns private units.
FuInventory make_inventory(FeatureSet f, FuSharing s);

// Activity counters, filled in as stage logic fires.
class FuActivity {
 public:
  explicit FuActivity(bool keep_cycle_log = false) : keep_log_(keep_cycle_log) {}

  void begin_cycle();
  void record(int stage, Opcode op);
  void end_cycle();
  // Adds another run's counters (cycles included); the cycle log is not merged.
  void merge(const FuActivity& other);

  std::uint64_t cycles() const { return cycles_; }
  const StageFuTable& totals() const { return totals_; }
  const StageFuTable& totals_for(Opcode op) const;
  std::uint64_t stage_fires(Opcode op, int stage) const;
  // Empty unless constructed with keep_cycle_log.
  const std::vector<StageFuTable>& cycle_log() const { return log_; }

 private:
  static std::size_t slot(Opcode op) { return static_cast<std::size_t>(op); }

  bool keep_log_;
  std::uint64_t cycles_ = 0;
  StageFuTable current_{};
  StageFuTable totals_{};
  std::array<StageFuTable, 5> per_op_{};
  std::array<std::array<std::uint64_t, kPipelineStages>, 5> fires_{};
  std::vector<StageFuTable> log_;
};

struct FuReport {
  FuInventory inventory;
  std::uint64_t cycles = 0;

  struct OpLine {
    Opcode op = Opcode::Bubble;
    std::uint64_t jobs = 0;              // stage-1 fires
    double avg_active_ops_per_cycle = 0;  // over all cycles of the run
  };
  std::vector<OpLine> ops;

  std::array<double, kPipelineStages> stage_utilization{};  // percent, 0 for empty stages
  double utilization = 0;                                   // percent of total inventory
};

FuReport fu_report(const FuInventory& inventory, const FuActivity& activity);

// Human-readable tables.
void print_inventory(std::ostream& os, const FuInventory& inv);
void print_report(std::ostream& os, const FuReport& report);
// CSV: stage,adders,multipliers,comparators,quadsort,ops,utilization_pct
void write_report_csv(std::ostream& os, const FuReport& report);

}  // namespace rayflex
