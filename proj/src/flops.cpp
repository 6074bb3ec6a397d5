#include "amatch/flops.hpp"

#include <charconv>
#include <sstream>

#include "amatch/error.hpp"

namespace amatch {
namespace {

void require_positive(std::int64_t v, const char* name) {
  require(v >= 1, ErrorKind::kInvalidArgument, std::string(name) + " must be >= 1, got " + std::to_string(v));
}

std::int64_t parse_int(std::string_view field, std::size_t line) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorKind::kFileFormat, "line " + std::to_string(line) + ": bad integer '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace

std::int64_t flops_amatformer(std::int64_t n, std::int64_t k, std::int64_t c) {
  require_positive(n, "n");
  require_positive(k, "k");
  require_positive(c, "c");
  return 2 * (n * k * c + 2 * k * k * c + n * c * c);
}

std::int64_t flops_sgmnet(std::int64_t n, std::int64_t k, std::int64_t c) {
  require_positive(n, "n");
  require_positive(k, "k");
  require_positive(c, "c");
  return 2 * (2 * n * k * c + 2 * k * k * c + 4 * k * c * c + 2 * n * c * c);
}

std::int64_t flops_superglue(std::int64_t n, std::int64_t c) {
  require_positive(n, "n");
  require_positive(c, "c");
  return 3 * n * n * c + 4 * n * c * c;
}

std::vector<FlopsRow> flops_table(std::int64_t n, std::int64_t k, std::int64_t c) {
  return {{"amatformer", n, k, c, flops_amatformer(n, k, c)},
          {"sgmnet", n, k, c, flops_sgmnet(n, k, c)},
          {"superglue", n, k, c, flops_superglue(n, c)}};
}

std::string flops_csv(const std::vector<FlopsRow>& rows) {
  std::ostringstream os;
  os << "model,n,k,c,flops\n";
  for (const auto& r : rows) os << r.model << ',' << r.n << ',' << r.k << ',' << r.c << ',' << r.flops << '\n';
  return os.str();
}

std::vector<FlopsRow> parse_flops_csv(std::string_view text) {
  std::vector<FlopsRow> rows;
  std::size_t line_no = 0;
  bool header = true;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      require(line == "model,n,k,c,flops", ErrorKind::kFileFormat, "unexpected flops CSV header");
      header = false;
      continue;
    }
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    require(fields.size() == 5, ErrorKind::kFileFormat, "line " + std::to_string(line_no) + ": expected 5 fields");
    rows.push_back({std::string(fields[0]), parse_int(fields[1], line_no), parse_int(fields[2], line_no),
                    parse_int(fields[3], line_no), parse_int(fields[4], line_no)});
  }
  require(!header, ErrorKind::kFileFormat, "flops CSV is empty");
  return rows;
}

}  // namespace amatch
