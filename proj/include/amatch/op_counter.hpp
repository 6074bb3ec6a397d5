#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace amatch {

// Buckets for multiply-add accounting of the forward pass.
enum class Stage : int {
  kOther = 0,
  kEncoder,
  kAnchorSelect,
  kAnchorUnits,    // anchor self + cross attention
  kAnchorPrimary,  // anchor -> primal message passing
  kFfn,
  kFullAttention,  // dense reference in the benchmark
  kAssignment,
  kCount,
};

std::string_view to_string(Stage stage);

// Thread-local tally of scalar multiply-adds issued by the matrix kernels.
class OpCounter {
 public:
  static OpCounter& local();

  void reset() { macs_.fill(0); }
  void add(std::int64_t macs) { macs_[static_cast<int>(current_)] += macs; }
  std::int64_t macs(Stage s) const { return macs_[static_cast<int>(s)]; }
  std::int64_t total() const;
  Stage current() const { return current_; }
  void set_current(Stage s) { current_ = s; }

 private:
  std::array<std::int64_t, static_cast<int>(Stage::kCount)> macs_{};
  Stage current_ = Stage::kOther;
};

class ScopedStage {
 public:
  explicit ScopedStage(Stage s) : previous_(OpCounter::local().current()) {
    OpCounter::local().set_current(s);
  }
  ~ScopedStage() { OpCounter::local().set_current(previous_); }
  ScopedStage(const ScopedStage&) = delete;
  ScopedStage& operator=(const ScopedStage&) = delete;

 private:
  Stage previous_;
};

}  // namespace amatch
