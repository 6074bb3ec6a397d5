#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace amatch {

// Closed-form message-passing cost counts; one multiply-add counts as 2.
std::int64_t flops_amatformer(std::int64_t n, std::int64_t k, std::int64_t c);  // 2(nkc + 2k^2c + nc^2)
std::int64_t flops_sgmnet(std::int64_t n, std::int64_t k, std::int64_t c);      // 2(2nkc + 2k^2c + 4kc^2 + 2nc^2)
std::int64_t flops_superglue(std::int64_t n, std::int64_t c);                   // 3n^2c + 4nc^2

struct FlopsRow {
  std::string model;
  std::int64_t n = 0;
  std::int64_t k = 0;
  std::int64_t c = 0;
  std::int64_t flops = 0;
  friend bool operator==(const FlopsRow&, const FlopsRow&) = default;
};

// amatformer, sgmnet and superglue rows for one (n, k, c).
std::vector<FlopsRow> flops_table(std::int64_t n, std::int64_t k, std::int64_t c);

// CSV with header `model,n,k,c,flops`.
std::string flops_csv(const std::vector<FlopsRow>& rows);
std::vector<FlopsRow> parse_flops_csv(std::string_view text);

}  // namespace amatch
