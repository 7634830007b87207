#include "rayflex/fu_model.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

namespace rayflex {

std::string_view to_string(FeatureSet f) { return f == FeatureSet::Baseline ? "baseline" : "extended"; }

std::string_view to_string(FuSharing s) { return s == FuSharing::Unified ? "unified" : "disjoint"; }

FuCounts& FuCounts::operator+=(const FuCounts& o) {
  adders += o.adders;
  multipliers += o.multipliers;
  comparators += o.comparators;
  quadsort += o.quadsort;
  return *this;
}

FuCounts elementwise_max(const FuCounts& a, const FuCounts& b) {
  return {std::max(a.adders, b.adders), std::max(a.multipliers, b.multipliers),
          std::max(a.comparators, b.comparators), std::max(a.quadsort, b.quadsort)};
}

bool fits_within(const FuCounts& used, const FuCounts& available) {
  return used.adders <= available.adders && used.multipliers <= available.multipliers &&
         used.comparators <= available.comparators && used.quadsort <= available.quadsort;
}

namespace {

constexpr FuCounts add(int n) { return {n, 0, 0, 0}; }
constexpr FuCounts mul(int n) { return {0, n, 0, 0}; }
constexpr FuCounts cmp(int n) { return {0, 0, n, 0}; }
constexpr FuCounts none() { return {}; }

constexpr StageFuTable kBoxUsage{{
    none(),   // 1  unpack
    add(24),  // 2  corners - origin, 4 boxes x 6
    mul(24),  // 3  * inv_dir
    {0, 0, 40, 1},  // 4  per-axis order (12), tmin/tmax trees (24), tmin<=tmax (4), QuadSort
    none(), none(), none(), none(), none(), none(),  // 5-10 pass through
    none(),   // 11 pack
}};

constexpr StageFuTable kTriangleUsage{{
    none(),
    add(9),            // 2  vertices - origin
    mul(6),            // 3  Sx*V[kz], Sy*V[kz]
    add(6),            // 4  V[kx] - Sx*V[kz], V[ky] - Sy*V[kz]
    mul(9),            // 5  six barycentric products, Sz*V[kz]
    add(3),            // 6  U, V, W
    {1, 3, 0, 0},      // 7  U+V; U*Az, V*Bz, W*Cz
    add(2),            // 8  det = (U+V)+W; U*Az + V*Bz
    {1, 1, 0, 0},      // 9  T; extent*det
    cmp(6),            // 10 U,V,W >= 0, det > 0, T >= 0, T <= extent*det
    none(),
}};

constexpr StageFuTable kEuclideanUsage{{
    none(),
    add(16),  // 2  a - b
    mul(16),  // 3  squares
    add(8),   // 4  tree 16 -> 8
    add(4),   // 5  8 -> 4
    add(2),   // 6  4 -> 2
    add(1),   // 7  2 -> 1
    none(), none(),
    add(1),   // 10 accumulator
    none(),
}};

constexpr StageFuTable kCosineUsage{{
    none(),
    none(),
    mul(16),  // 3  8 a*b, 8 b*b
    add(8),   // 4  two trees 8 -> 4
    add(4),   // 5  4 -> 2
    add(2),   // 6  2 -> 1
    none(), none(), none(),
    add(2),   // 10 dot and norm accumulators
    none(),
}};

constexpr StageFuTable kNoUsage{};

}  // namespace

const StageFuTable& op_usage(Opcode op) {
  switch (op) {
    case Opcode::QuadBox: return kBoxUsage;
    case Opcode::Triangle: return kTriangleUsage;
    case Opcode::Euclidean: return kEuclideanUsage;
    case Opcode::Cosine: return kCosineUsage;
    case Opcode::Bubble: break;
  }
  return kNoUsage;
}

std::vector<Opcode> supported_ops(FeatureSet f) {
  if (f == FeatureSet::Baseline) return {Opcode::QuadBox, Opcode::Triangle};
  return {Opcode::QuadBox, Opcode::Triangle, Opcode::Euclidean, Opcode::Cosine};
}

int FuInventory::total_ops() const {
  int total = 0;
  for (std::size_t s = 1; s + 1 < stages.size(); ++s) total += stages[s].ops();
  return total;
}

FuInventory make_inventory(FeatureSet f, FuSharing s) {
  FuInventory inv;
  inv.feature_set = f;
  inv.sharing = s;
  for (Opcode op : supported_ops(f)) {
    const auto& usage = op_usage(op);
    for (std::size_t st = 0; st < inv.stages.size(); ++st) {
      if (s == FuSharing::Unified) {
        inv.stages[st] = elementwise_max(inv.stages[st], usage[st]);
      } else {
        inv.stages[st] += usage[st];
      }
    }
  }
  return inv;
}

void FuActivity::begin_cycle() { current_ = {}; }

void FuActivity::record(int stage, Opcode op) {
  const auto idx = static_cast<std::size_t>(stage - 1);
  const FuCounts& used = op_usage(op)[idx];
  current_[idx] += used;
  totals_[idx] += used;
  per_op_[slot(op)][idx] += used;
  ++fires_[slot(op)][idx];
}

void FuActivity::end_cycle() {
  ++cycles_;
  if (keep_log_) log_.push_back(current_);
}

void FuActivity::merge(const FuActivity& other) {
  cycles_ += other.cycles_;
  for (std::size_t st = 0; st < totals_.size(); ++st) totals_[st] += other.totals_[st];
  for (std::size_t op = 0; op < per_op_.size(); ++op) {
    for (std::size_t st = 0; st < totals_.size(); ++st) {
      per_op_[op][st] += other.per_op_[op][st];
      fires_[op][st] += other.fires_[op][st];
    }
  }
}

const StageFuTable& FuActivity::totals_for(Opcode op) const { return per_op_[slot(op)]; }

std::uint64_t FuActivity::stage_fires(Opcode op, int stage) const {
  return fires_[slot(op)][static_cast<std::size_t>(stage - 1)];
}

FuReport fu_report(const FuInventory& inventory, const FuActivity& activity) {
  FuReport r;
  r.inventory = inventory;
  r.cycles = activity.cycles();
  const double cycles = r.cycles ? static_cast<double>(r.cycles) : 1.0;

  for (Opcode op : {Opcode::QuadBox, Opcode::Triangle, Opcode::Euclidean, Opcode::Cosine}) {
    FuReport::OpLine line;
    line.op = op;
    line.jobs = activity.stage_fires(op, 1);
    double ops = 0;
    for (const auto& c : activity.totals_for(op)) ops += c.ops();
    line.avg_active_ops_per_cycle = ops / cycles;
    r.ops.push_back(line);
  }

  double active_total = 0;
  for (std::size_t st = 0; st < r.stage_utilization.size(); ++st) {
    const double active = activity.totals()[st].ops();
    const double available = inventory.stages[st].ops();
    r.stage_utilization[st] = available > 0 ? 100.0 * active / (available * cycles) : 0.0;
    active_total += active;
  }
  const double total = inventory.total_ops();
  r.utilization = total > 0 ? 100.0 * active_total / (total * cycles) : 0.0;
  return r;
}

void print_inventory(std::ostream& os, const FuInventory& inv) {
  os << "FU inventory (" << to_string(inv.feature_set) << ", " << to_string(inv.sharing) << ")\n";
  os << "stage  adders  mults  cmps  quadsort  ops/cycle\n";
  for (std::size_t st = 0; st < inv.stages.size(); ++st) {
    const auto& c = inv.stages[st];
    os << std::setw(5) << st + 1 << std::setw(8) << c.adders << std::setw(7) << c.multipliers
       << std::setw(6) << c.comparators << std::setw(10) << c.quadsort << std::setw(11) << c.ops();
    if (st == 0 || st + 1 == inv.stages.size()) os << "  (format converter, not counted)";
    os << '\n';
  }
  os << "total ops/cycle: " << inv.total_ops() << '\n';
}

void print_report(std::ostream& os, const FuReport& report) {
  print_inventory(os, report.inventory);
  os << "cycles: " << report.cycles << '\n';
  os << std::fixed << std::setprecision(2);
  for (const auto& line : report.ops) {
    if (line.jobs == 0) continue;
    os << "  " << std::left << std::setw(10) << to_string(line.op) << std::right << " jobs "
       << std::setw(8) << line.jobs << "  avg active ops/cycle " << line.avg_active_ops_per_cycle
       << '\n';
  }
  os << "stage utilization %:";
  for (std::size_t st = 1; st + 1 < report.stage_utilization.size(); ++st) {
    os << ' ' << st + 1 << ':' << report.stage_utilization[st];
  }
  os << "\noverall utilization %: " << report.utilization << '\n';
  os.unsetf(std::ios::floatfield);
}

void write_report_csv(std::ostream& os, const FuReport& report) {
  os << "stage,adders,multipliers,comparators,quadsort,ops,utilization_pct\n";
  for (std::size_t st = 0; st < report.inventory.stages.size(); ++st) {
    const auto& c = report.inventory.stages[st];
    os << st + 1 << ',' << c.adders << ',' << c.multipliers << ',' << c.comparators << ','
       << c.quadsort << ',' << c.ops() << ',' << report.stage_utilization[st] << '\n';
  }
}

}  // namespace rayflex
