#include "rayflex/shared_record.hpp"

namespace rayflex {

std::string_view to_string(Field f) {
  switch (f) {
    case Field::Input: return "input";
    case Field::BoxTranslated: return "box.translated";
    case Field::BoxSlabT: return "box.slab_t";
    case Field::BoxInterval: return "box.interval";
    case Field::BoxSorted: return "box.sorted";
    case Field::TriTranslated: return "tri.translated";
    case Field::TriShearProducts: return "tri.shear_products";
    case Field::TriSheared: return "tri.sheared";
    case Field::TriProducts: return "tri.products";
    case Field::TriBarycentrics: return "tri.barycentrics";
    case Field::TriDetPartial: return "tri.det_partial";
    case Field::TriDet: return "tri.det";
    case Field::TriT: return "tri.t";
    case Field::TriResult: return "tri.result";
    case Field::EucDiff: return "euc.diff";
    case Field::EucSquares: return "euc.squares";
    case Field::EucTree8: return "euc.tree8";
    case Field::EucTree4: return "euc.tree4";
    case Field::EucTree2: return "euc.tree2";
    case Field::EucSum: return "euc.sum";
    case Field::CosProducts: return "cos.products";
    case Field::CosTree4: return "cos.tree4";
    case Field::CosTree2: return "cos.tree2";
    case Field::CosSum: return "cos.sum";
    case Field::Distance: return "distance";
    case Field::kCount: break;
  }
  return "?";
}

void WriteLog::produce(Field f, int stage) {
  auto& w = writer_[static_cast<std::size_t>(f)];
  if (w != 0) {
    throw WriteOnceViolation("field " + std::string(to_string(f)) + " written by stage " +
                             std::to_string(stage) + " after stage " + std::to_string(w));
  }
  w = static_cast<std::uint8_t>(stage);
}

void WriteLog::require(Field f, int stage) const {
  const int w = writer(f);
  if (w == 0 || w >= stage) {
    throw WriteOnceViolation("stage " + std::to_string(stage) + " reads field " +
                             std::string(to_string(f)) +
                             (w == 0 ? " before it was written" : " written by stage " + std::to_string(w)));
  }
}

SharedRecord pack_input(const JobInput& job) {
  SharedRecord rec;
  rec.in = job;
  return rec;
}

JobInput unpack_input(const SharedRecord& rec) { return rec.in; }

JobOutput pack_output(const SharedRecord& rec) {
  JobOutput out;
  out.opcode = rec.in.opcode;
  out.box = rec.box_out;
  out.tri = rec.tri_out;
  out.dist = rec.dist_out;
  return out;
}

std::string_view trace_label(const SharedRecord& rec) { return to_string(rec.in.opcode); }

}  // namespace rayflex
