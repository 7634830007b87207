#include "rayflex/datapath.hpp"

#include <limits>

#include "rayflex/errors.hpp"
#include "rayflex/fp.hpp"

namespace rayflex {

DistanceResult accumulate(AccumulatorState& acc, Opcode op, float euclidean_partial,
                          const CosinePartial& cosine, bool reset) {
  DistanceResult out;
  out.euclidean_reset = reset;
  out.angular_reset = reset;
  if (op == Opcode::Euclidean) {
    out.euclidean_accumulator = fp::add(acc.euclidean_acc, euclidean_partial);
    acc.euclidean_acc = reset ? 0.0f : out.euclidean_accumulator;
  } else if (op == Opcode::Cosine) {
    out.angular_dot_product = fp::add(acc.angular_dot_acc, cosine.dot);
    out.angular_norm = fp::add(acc.angular_norm_acc, cosine.norm);
    acc.angular_dot_acc = reset ? 0.0f : out.angular_dot_product;
    acc.angular_norm_acc = reset ? 0.0f : out.angular_norm;
  }
  return out;
}

namespace {

// Field bookkeeping for one stage evaluation.
class StageScope {
 public:
  StageScope(SharedRecord& rec, int stage, bool check) : rec_(rec), stage_(stage), check_(check) {}

  void reads(Field f) const {
    if (check_) rec_.writes.require(f, stage_);
  }
  void writes(Field f) {
    if (check_) rec_.writes.produce(f, stage_);
  }

 private:
  SharedRecord& rec_;
  int stage_;
  bool check_;
};

void box_stage(int stage, SharedRecord& r, StageScope& scope) {
  const Ray& ray = r.in.ray;
  switch (stage) {
    case 2:
      scope.reads(Field::Input);
      for (std::size_t i = 0; i < kBoxesPerJob; ++i) {
        auto& lane = r.box[i];
        for (int a = 0; a < 3; ++a) {
          lane.lo_rel[a] = fp::sub(r.in.boxes[i].lo[a], ray.origin[a]);
          lane.hi_rel[a] = fp::sub(r.in.boxes[i].hi[a], ray.origin[a]);
        }
      }
      scope.writes(Field::BoxTranslated);
      break;
    case 3:
      scope.reads(Field::BoxTranslated);
      for (auto& lane : r.box) {
        for (int a = 0; a < 3; ++a) {
          lane.t_lo[a] = fp::mul(lane.lo_rel[a], ray.inv_dir[a]);
          lane.t_hi[a] = fp::mul(lane.hi_rel[a], ray.inv_dir[a]);
        }
      }
      scope.writes(Field::BoxSlabT);
      break;
    case 4: {
      scope.reads(Field::BoxSlabT);
      std::array<float, kBoxesPerJob> keys;
      for (std::size_t i = 0; i < kBoxesPerJob; ++i) {
        auto& lane = r.box[i];
        for (int a = 0; a < 3; ++a) {
          lane.t_near[a] = fp::min(lane.t_lo[a], lane.t_hi[a]);
          lane.t_far[a] = fp::max(lane.t_lo[a], lane.t_hi[a]);
        }
        lane.tmin = fp::max(fp::max(lane.t_near.x, lane.t_near.y), fp::max(lane.t_near.z, 0.0f));
        lane.tmax = fp::min(fp::min(lane.t_far.x, lane.t_far.y), fp::min(lane.t_far.z, ray.extent));
        lane.hit = fp::le(lane.tmin, lane.tmax);
        lane.key = lane.hit ? lane.tmin : std::numeric_limits<float>::infinity();
        keys[i] = lane.key;
      }
      scope.writes(Field::BoxInterval);

      r.box_out.order = sort4(keys);
      for (std::size_t i = 0; i < kBoxesPerJob; ++i) {
        const auto src = r.box_out.order[i];
        r.box_out.hit[i] = r.box[src].hit;
        r.box_out.tmin[i] = r.box[src].tmin;
        r.box_out.child_ptr_sorted[i] = r.in.child_ptr[src];
      }
      scope.writes(Field::BoxSorted);
      break;
    }
    default:
      break;
  }
}

void triangle_stage(int stage, SharedRecord& r, StageScope& scope, Culling culling) {
  const Ray& ray = r.in.ray;
  auto& t = r.tri;
  switch (stage) {
    case 2: {
      scope.reads(Field::Input);
      const Triangle& tri = r.in.triangle;
      const Vec3& vb = culling == Culling::Backface ? tri.v2 : tri.v1;
      const Vec3& vc = culling == Culling::Backface ? tri.v1 : tri.v2;
      for (int a = 0; a < 3; ++a) {
        t.a[a] = fp::sub(tri.v0[a], ray.origin[a]);
        t.b[a] = fp::sub(vb[a], ray.origin[a]);
        t.c[a] = fp::sub(vc[a], ray.origin[a]);
      }
      scope.writes(Field::TriTranslated);
      break;
    }
    case 3:
      scope.reads(Field::TriTranslated);
      t.sx_az = fp::mul(ray.shear.x, t.a[ray.kz]);
      t.sy_az = fp::mul(ray.shear.y, t.a[ray.kz]);
      t.sx_bz = fp::mul(ray.shear.x, t.b[ray.kz]);
      t.sy_bz = fp::mul(ray.shear.y, t.b[ray.kz]);
      t.sx_cz = fp::mul(ray.shear.x, t.c[ray.kz]);
      t.sy_cz = fp::mul(ray.shear.y, t.c[ray.kz]);
      scope.writes(Field::TriShearProducts);
      break;
    case 4:
      scope.reads(Field::TriShearProducts);
      t.ax = fp::sub(t.a[ray.kx], t.sx_az);
      t.ay = fp::sub(t.a[ray.ky], t.sy_az);
      t.bx = fp::sub(t.b[ray.kx], t.sx_bz);
      t.by = fp::sub(t.b[ray.ky], t.sy_bz);
      t.cx = fp::sub(t.c[ray.kx], t.sx_cz);
      t.cy = fp::sub(t.c[ray.ky], t.sy_cz);
      scope.writes(Field::TriSheared);
      break;
    case 5:
      scope.reads(Field::TriSheared);
      t.cx_by = fp::mul(t.cx, t.by);
      t.cy_bx = fp::mul(t.cy, t.bx);
      t.ax_cy = fp::mul(t.ax, t.cy);
      t.ay_cx = fp::mul(t.ay, t.cx);
      t.bx_ay = fp::mul(t.bx, t.ay);
      t.by_ax = fp::mul(t.by, t.ax);
      t.az = fp::mul(ray.shear.z, t.a[ray.kz]);
      t.bz = fp::mul(ray.shear.z, t.b[ray.kz]);
      t.cz = fp::mul(ray.shear.z, t.c[ray.kz]);
      scope.writes(Field::TriProducts);
      break;
    case 6:
      scope.reads(Field::TriProducts);
      t.u = fp::sub(t.cx_by, t.cy_bx);
      t.v = fp::sub(t.ax_cy, t.ay_cx);
      t.w = fp::sub(t.bx_ay, t.by_ax);
      scope.writes(Field::TriBarycentrics);
      break;
    case 7:
      scope.reads(Field::TriBarycentrics);
      t.u_plus_v = fp::add(t.u, t.v);
      t.u_az = fp::mul(t.u, t.az);
      t.v_bz = fp::mul(t.v, t.bz);
      t.w_cz = fp::mul(t.w, t.cz);
      scope.writes(Field::TriDetPartial);
      break;
    case 8:
      scope.reads(Field::TriDetPartial);
      t.det = fp::add(t.u_plus_v, t.w);
      t.t_partial = fp::add(t.u_az, t.v_bz);
      scope.writes(Field::TriDet);
      break;
    case 9:
      scope.reads(Field::TriDet);
      t.t = fp::add(t.t_partial, t.w_cz);
      t.t_limit = fp::mul(ray.extent, t.det);
      scope.writes(Field::TriT);
      break;
    case 10:
      scope.reads(Field::TriT);
      r.tri_out.hit = fp::ge(t.u, 0.0f) && fp::ge(t.v, 0.0f) && fp::ge(t.w, 0.0f) &&
                      fp::gt(t.det, 0.0f) && fp::ge(t.t, 0.0f) && fp::le(t.t, t.t_limit);
      r.tri_out.t_num = t.t;
      r.tri_out.t_denom = t.det;
      r.tri_out.triangle_id = r.in.triangle.id;
      scope.writes(Field::TriResult);
      break;
    default:
      break;
  }
}

void euclidean_stage(int stage, SharedRecord& r, StageScope& scope) {
  auto& e = r.euc;
  switch (stage) {
    case 2:
      scope.reads(Field::Input);
      for (std::size_t i = 0; i < kVectorLanes; ++i) {
        e.diff[i] = (r.in.euclidean_mask >> i) & 1u ? fp::sub(r.in.euclidean_a[i], r.in.euclidean_b[i])
                                                    : 0.0f;
      }
      scope.writes(Field::EucDiff);
      break;
    case 3:
      scope.reads(Field::EucDiff);
      for (std::size_t i = 0; i < kVectorLanes; ++i) e.square[i] = fp::mul(e.diff[i], e.diff[i]);
      scope.writes(Field::EucSquares);
      break;
    case 4:
      scope.reads(Field::EucSquares);
      for (std::size_t i = 0; i < 8; ++i) e.sum8[i] = fp::add(e.square[2 * i], e.square[2 * i + 1]);
      scope.writes(Field::EucTree8);
      break;
    case 5:
      scope.reads(Field::EucTree8);
      for (std::size_t i = 0; i < 4; ++i) e.sum4[i] = fp::add(e.sum8[2 * i], e.sum8[2 * i + 1]);
      scope.writes(Field::EucTree4);
      break;
    case 6:
      scope.reads(Field::EucTree4);
      for (std::size_t i = 0; i < 2; ++i) e.sum2[i] = fp::add(e.sum4[2 * i], e.sum4[2 * i + 1]);
      scope.writes(Field::EucTree2);
      break;
    case 7:
      scope.reads(Field::EucTree2);
      e.partial = fp::add(e.sum2[0], e.sum2[1]);
      scope.writes(Field::EucSum);
      break;
    default:
      break;
  }
}

void cosine_stage(int stage, SharedRecord& r, StageScope& scope) {
  auto& c = r.cos;
  switch (stage) {
    case 3:
      scope.reads(Field::Input);
      for (std::size_t i = 0; i < kCosineLanes; ++i) {
        const bool on = (r.in.euclidean_mask >> i) & 1u;
        const float a = on ? r.in.euclidean_a[i] : 0.0f;
        const float b = on ? r.in.euclidean_b[i] : 0.0f;
        c.dot[i] = fp::mul(a, b);
        c.norm[i] = fp::mul(b, b);
      }
      scope.writes(Field::CosProducts);
      break;
    case 4:
      scope.reads(Field::CosProducts);
      for (std::size_t i = 0; i < 4; ++i) {
        c.dot4[i] = fp::add(c.dot[2 * i], c.dot[2 * i + 1]);
        c.norm4[i] = fp::add(c.norm[2 * i], c.norm[2 * i + 1]);
      }
      scope.writes(Field::CosTree4);
      break;
    case 5:
      scope.reads(Field::CosTree4);
      for (std::size_t i = 0; i < 2; ++i) {
        c.dot2[i] = fp::add(c.dot4[2 * i], c.dot4[2 * i + 1]);
        c.norm2[i] = fp::add(c.norm4[2 * i], c.norm4[2 * i + 1]);
      }
      scope.writes(Field::CosTree2);
      break;
    case 6:
      scope.reads(Field::CosTree2);
      c.dot_partial = fp::add(c.dot2[0], c.dot2[1]);
      c.norm_partial = fp::add(c.norm2[0], c.norm2[1]);
      scope.writes(Field::CosSum);
      break;
    default:
      break;
  }
}

}  // namespace

Datapath::Datapath(const DatapathConfig& config)
    : config_(config),
      inventory_(make_inventory(config.feature_set, config.fu_sharing)),
      activity_(config.keep_activity_log),
      pipe_(std::make_unique<Pipe>(build())) {}

Datapath::~Datapath() = default;

Datapath::Pipe Datapath::build() {
  auto head = elastic::PipelineBuilder<JobInput>{}.then<SharedRecord>([this](const JobInput& job) {
    activity_.record(1, job.opcode);
    SharedRecord rec = pack_input(job);
    if (config_.check_write_once) rec.writes.produce(Field::Input, 1);
    return rec;
  });
  for (int stage = 2; stage <= kStages - 1; ++stage) {
    head = std::move(head).then<SharedRecord>(
        [this, stage](const SharedRecord& in) { return run_stage(stage, in); });
  }
  return std::move(head)
      .then<JobOutput>([this](const SharedRecord& rec) {
        activity_.record(kStages, rec.in.opcode);
        return pack_output(rec);
      })
      .build();
}

SharedRecord Datapath::run_stage(int stage, const SharedRecord& in) {
  const Opcode op = in.in.opcode;
  activity_.record(stage, op);

  SharedRecord out = in;
  StageScope scope(out, stage, config_.check_write_once);
  switch (op) {
    case Opcode::QuadBox:
      box_stage(stage, out, scope);
      break;
    case Opcode::Triangle:
      triangle_stage(stage, out, scope, config_.culling);
      break;
    case Opcode::Euclidean:
      euclidean_stage(stage, out, scope);
      break;
    case Opcode::Cosine:
      cosine_stage(stage, out, scope);
      break;
    case Opcode::Bubble:
      break;
  }

  if (stage == 10 && op != Opcode::Bubble) {
    // Accumulator registers live in this stage and update only on input fire.
    if (op == Opcode::Euclidean) scope.reads(Field::EucSum);
    if (op == Opcode::Cosine) scope.reads(Field::CosSum);
    out.dist_out = accumulate(acc_, op, out.euc.partial, {out.cos.dot_partial, out.cos.norm_partial},
                              out.in.reset_accumulator);
    scope.writes(Field::Distance);
  }
  return out;
}

std::uint64_t Datapath::submit(const JobInput& job) {
  if (job.opcode == Opcode::Bubble) {
    throw DomainError("submit: Bubble is not a valid job opcode");
  }
  if (is_extended(job.opcode) && config_.feature_set == FeatureSet::Baseline) {
    throw ConfigurationError("submit: " + std::string(to_string(job.opcode)) +
                             " requires the extended feature set");
  }
  queue_.push_back(job);
  return next_seq_++;
}

std::optional<CompletedJob> Datapath::step(bool sink_ready) {
  if (!port_.valid && !queue_.empty()) {
    port_.data = std::move(queue_.front());
    port_.valid = true;
    queue_.pop_front();
    port_seq_ = next_seq_ - queue_.size() - 1;
  }

  const std::uint64_t now = pipe_->cycle();
  activity_.begin_cycle();
  auto r = pipe_->step(port_, sink_ready);
  activity_.end_cycle();

  if (r.in_fire) {
    in_flight_.push_back({port_seq_, now});
    port_.valid = false;
  }
  if (!r.out_fire) return std::nullopt;

  CompletedJob done;
  done.output = std::move(r.out.data);
  done.seq = in_flight_.front().seq;
  done.input_fire_cycle = in_flight_.front().input_fire_cycle;
  done.output_fire_cycle = now;
  in_flight_.pop_front();
  return done;
}

std::vector<CompletedJob> Datapath::drain() {
  std::vector<CompletedJob> out;
  while (!idle()) {
    if (auto done = step(true)) out.push_back(std::move(*done));
  }
  return out;
}

bool Datapath::idle() const { return queue_.empty() && !port_.valid && in_flight_.empty(); }

std::size_t Datapath::queued() const { return queue_.size() + (port_.valid ? 1 : 0); }

std::size_t Datapath::in_flight() const { return in_flight_.size(); }

std::uint64_t Datapath::cycle() const { return pipe_->cycle(); }

void Datapath::set_trace(std::ostream* os) { pipe_->set_trace(os); }

JobOutput ReferenceModel::run(const JobInput& job) {
  JobOutput out;
  out.opcode = job.opcode;
  float euclidean = 0.0f;
  CosinePartial cosine;
  switch (job.opcode) {
    case Opcode::QuadBox:
      out.box = quad_box_test(job.ray, job.boxes, job.child_ptr);
      break;
    case Opcode::Triangle:
      out.tri = watertight_triangle_test(job.ray, job.triangle, culling_);
      break;
    case Opcode::Euclidean:
      euclidean = euclidean_partial(job.euclidean_a, job.euclidean_b, job.euclidean_mask);
      break;
    case Opcode::Cosine:
      cosine = cosine_partial(std::span<const float, kCosineLanes>(job.euclidean_a.data(), kCosineLanes),
                              std::span<const float, kCosineLanes>(job.euclidean_b.data(), kCosineLanes),
                              static_cast<std::uint8_t>(job.euclidean_mask & 0xFFu));
      break;
    case Opcode::Bubble:
      return out;
  }
  out.dist = accumulate(acc_, job.opcode, euclidean, cosine, job.reset_accumulator);
  return out;
}

}  // namespace rayflex
