#pragma once

// Cycle-stepped elastic pipeline built from two-slot skid buffers.
//
// Every stage has registered outputs: `valid`/`data` come from the main
// register and `ready` is "skid register empty", so none of the handshake
// signals a stage drives depends combinationally on its neighbours. A datum
// accepted by a stage during cycle t is visible at that stage's output
// during cycle t+1.
//
// Pipeline::step evaluates stages from the sink back to the source in one
// pass. When stage i is clocked its upstream neighbour has not been clocked
// yet, so it still presents its pre-edge output, and its downstream
// neighbour has already reported the pre-edge ready it sampled.

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string_view>
#include <utility>
#include <vector>

namespace rayflex::elastic {

template <class T>
struct Handshake {
  bool valid = false;
  T data{};
  bool ready = false;

  bool fire() const { return valid && ready; }
};

template <class T>
concept TraceLabelled = requires(const T& t) {
  { trace_label(t) } -> std::convertible_to<std::string_view>;
};

template <class T>
std::string_view label_of(const T& value) {
  if constexpr (TraceLabelled<T>) {
    return trace_label(value);
  } else {
    (void)value;
    return "";
  }
}

// Signals a stage saw and drove during one clock edge. Values are the
// pre-edge (registered) ones.
struct StageSignals {
  bool in_valid = false;
  bool in_ready = false;
  bool out_valid = false;
  bool out_ready = false;

  bool in_fire() const { return in_valid && in_ready; }
  bool out_fire() const { return out_valid && out_ready; }
};

template <class U>
struct StageStep {
  Handshake<U> out;
  bool upstream_ready = false;
  bool in_fire = false;
};

// One pipeline stage: transform logic feeding a main + skid register pair.
// The transform runs only when an input fires, so stateful logic (e.g. an
// accumulator) is updated exactly once per accepted datum.
template <class T, class U>
class SkidStage {
 public:
  using Input = T;
  using Output = U;
  using Transform = std::function<U(const T&)>;

  explicit SkidStage(Transform transform) : transform_(std::move(transform)) {}

  bool out_valid() const { return main_.has_value(); }
  const U& out_data() const { return *main_; }
  bool upstream_ready() const { return !skid_.has_value(); }
  std::size_t occupancy() const { return std::size_t{main_.has_value()} + skid_.has_value(); }

  // Advances one clock edge. in_data is read only when in_valid is set.
  StageSignals clock(bool in_valid, const T* in_data, bool downstream_ready) {
    StageSignals s;
    s.in_valid = in_valid;
    s.in_ready = upstream_ready();
    s.out_valid = out_valid();
    s.out_ready = downstream_ready;

    if (s.out_fire()) {
      main_ = std::move(skid_);
      skid_.reset();
    }
    if (s.in_fire()) {
      if (main_) {
        skid_.emplace(transform_(*in_data));
      } else {
        main_.emplace(transform_(*in_data));
      }
    }
    return s;
  }

  // Handshake-level form of clock(): returns what the stage drove this cycle.
  StageStep<U> step(const Handshake<T>& in, bool downstream_ready) {
    StageStep<U> r;
    r.out.valid = out_valid();
    if (r.out.valid) r.out.data = out_data();
    r.out.ready = downstream_ready;
    const StageSignals s = clock(in.valid, in.valid ? &in.data : nullptr, downstream_ready);
    r.upstream_ready = s.in_ready;
    r.in_fire = s.in_fire();
    return r;
  }

 private:
  Transform transform_;
  std::optional<U> main_;
  std::optional<U> skid_;
};

// CSV trace: cycle,stage,in_valid,in_ready,out_valid,out_ready,opcode.
// Stages are numbered from 1. The opcode column labels the datum offered at
// the stage input, or the one held at its output when no input is offered.
class TraceWriter {
 public:
  explicit TraceWriter(std::ostream& os) : os_(&os) {
    *os_ << "cycle,stage,in_valid,in_ready,out_valid,out_ready,opcode\n";
  }

  void row(std::uint64_t cycle, std::size_t stage, const StageSignals& s, std::string_view label) {
    *os_ << cycle << ',' << stage << ',' << s.in_valid << ',' << s.in_ready << ',' << s.out_valid
         << ',' << s.out_ready << ',' << (label.empty() ? std::string_view("-") : label) << '\n';
  }

 private:
  std::ostream* os_;
};

template <class In, class Out>
struct PipelineStep {
  Handshake<Out> out;
  bool source_ready = false;
  bool in_fire = false;
  bool out_fire = false;
};

namespace detail {

template <class T>
class Port {
 public:
  virtual ~Port() = default;
  virtual bool valid() const = 0;
  virtual const T& data() const = 0;
};

template <class T>
class SourcePort final : public Port<T> {
 public:
  bool valid() const override { return valid_; }
  const T& data() const override { return *data_; }

  void drive(bool valid, const T* data) {
    valid_ = valid;
    data_ = data;
  }

 private:
  bool valid_ = false;
  const T* data_ = nullptr;
};

class AnyStage {
 public:
  virtual ~AnyStage() = default;
  // Clocks the stage and returns its pre-edge upstream ready.
  virtual bool clock(bool downstream_ready, std::uint64_t cycle, std::size_t index,
                     TraceWriter* trace) = 0;
  virtual std::size_t occupancy() const = 0;
};

template <class T, class U>
class ChainedStage final : public AnyStage, public Port<U> {
 public:
  ChainedStage(const Port<T>* source, typename SkidStage<T, U>::Transform f)
      : source_(source), stage_(std::move(f)) {}

  bool valid() const override { return stage_.out_valid(); }
  const U& data() const override { return stage_.out_data(); }
  std::size_t occupancy() const override { return stage_.occupancy(); }

  bool clock(bool downstream_ready, std::uint64_t cycle, std::size_t index,
             TraceWriter* trace) override {
    const bool in_valid = source_->valid();
    const T* in_data = in_valid ? &source_->data() : nullptr;
    if (trace) {
      std::string_view label;
      if (in_valid) {
        label = label_of(*in_data);
      } else if (stage_.out_valid()) {
        label = label_of(stage_.out_data());
      }
      const StageSignals s = stage_.clock(in_valid, in_data, downstream_ready);
      trace->row(cycle, index + 1, s, label);
      return s.in_ready;
    }
    return stage_.clock(in_valid, in_data, downstream_ready).in_ready;
  }

 private:
  const Port<T>* source_;
  SkidStage<T, U> stage_;
};

}  // namespace detail

template <class In, class Cur>
class PipelineBuilder;

// A chain of skid stages from In to Out, stepped one cycle at a time by a
// single driver.
template <class In, class Out>
class Pipeline {
 public:
  Pipeline(Pipeline&&) noexcept = default;
  Pipeline& operator=(Pipeline&&) noexcept = default;

  PipelineStep<In, Out> step(const Handshake<In>& in, bool sink_ready) {
    source_->drive(in.valid, &in.data);

    PipelineStep<In, Out> r;
    r.out.valid = tail_->valid();
    if (r.out.valid) r.out.data = tail_->data();
    r.out.ready = sink_ready;
    r.out_fire = r.out.fire();

    bool ready = sink_ready;
    for (std::size_t i = stages_.size(); i-- > 0;) {
      ready = stages_[i]->clock(ready, cycle_, i, trace_.get());
    }
    r.source_ready = ready;
    r.in_fire = in.valid && ready;

    source_->drive(false, nullptr);
    ++cycle_;
    return r;
  }

  void set_trace(std::ostream* os) { trace_ = os ? std::make_unique<TraceWriter>(*os) : nullptr; }

  std::size_t size() const { return stages_.size(); }
  std::uint64_t cycle() const { return cycle_; }

  std::size_t occupancy() const {
    std::size_t n = 0;
    for (const auto& s : stages_) n += s->occupancy();
    return n;
  }

 private:
  template <class, class>
  friend class PipelineBuilder;

  Pipeline(std::unique_ptr<detail::SourcePort<In>> source,
           std::vector<std::unique_ptr<detail::AnyStage>> stages, const detail::Port<Out>* tail)
      : source_(std::move(source)), stages_(std::move(stages)), tail_(tail) {}

  std::unique_ptr<detail::SourcePort<In>> source_;
  std::vector<std::unique_ptr<detail::AnyStage>> stages_;
  const detail::Port<Out>* tail_;
  std::unique_ptr<TraceWriter> trace_;
  std::uint64_t cycle_ = 0;
};

// Composes stages with compile-time type checking: then<Next>(f) needs f to
// map the current output type to Next.
//
//   auto p = PipelineBuilder<int>{}
//                .then<int>([](int x) { return x + 1; })
//                .then<double>([](int x) { return x * 0.5; })
//                .build();
template <class In, class Cur = In>
class PipelineBuilder {
 public:
  PipelineBuilder() : source_(std::make_unique<detail::SourcePort<In>>()) {
    tail_ = source_.get();
  }

  template <class Next, class F>
    requires std::invocable<F&, const Cur&> &&
             std::convertible_to<std::invoke_result_t<F&, const Cur&>, Next>
  PipelineBuilder<In, Next> then(F f) && {
    auto stage = std::make_unique<detail::ChainedStage<Cur, Next>>(
        tail_, typename SkidStage<Cur, Next>::Transform(std::move(f)));
    const detail::Port<Next>* next_tail = stage.get();
    stages_.push_back(std::move(stage));
    return PipelineBuilder<In, Next>(std::move(source_), std::move(stages_), next_tail);
  }

  Pipeline<In, Cur> build() && {
    return Pipeline<In, Cur>(std::move(source_), std::move(stages_), tail_);
  }

  std::size_t size() const { return stages_.size(); }

 private:
  template <class, class>
  friend class PipelineBuilder;

  PipelineBuilder(std::unique_ptr<detail::SourcePort<In>> source,
                  std::vector<std::unique_ptr<detail::AnyStage>> stages, const detail::Port<Cur>* tail)
      : source_(std::move(source)), stages_(std::move(stages)), tail_(tail) {}

  std::unique_ptr<detail::SourcePort<In>> source_;
  std::vector<std::unique_ptr<detail::AnyStage>> stages_;
  const detail::Port<Cur>* tail_ = nullptr;
};

}  // namespace rayflex::elastic
