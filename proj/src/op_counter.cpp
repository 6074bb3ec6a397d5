#include "amatch/op_counter.hpp"

#include <numeric>

namespace amatch {

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::kOther: return "other";
    case Stage::kEncoder: return "encoder";
    case Stage::kAnchorSelect: return "anchor_select";
    case Stage::kAnchorUnits: return "anchor_units";
    case Stage::kAnchorPrimary: return "anchor_primary";
    case Stage::kFfn: return "ffn";
    case Stage::kFullAttention: return "full_attention";
    case Stage::kAssignment: return "assignment";
    case Stage::kCount: break;
  }
  return "unknown";
}

OpCounter& OpCounter::local() {
  thread_local OpCounter counter;
  return counter;
}

std::int64_t OpCounter::total() const { return std::accumulate(macs_.begin(), macs_.end(), std::int64_t{0}); }

}  // namespace amatch
