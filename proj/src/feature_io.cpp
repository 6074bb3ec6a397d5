#include "amatch/feature_io.hpp"

#include <limits>

#include "amatch/error.hpp"
#include "amatch/io.hpp"

namespace amatch {
namespace {

constexpr std::string_view kMagic = "AMFT";

std::uint32_t checked_u32(Index v, const char* what) {
  require(v >= 0 && v <= std::numeric_limits<std::uint32_t>::max(), ErrorKind::kInvalidArgument,
          std::string(what) + " does not fit in u32");
  return static_cast<std::uint32_t>(v);
}

// Runs `fn`, turning JSON library exceptions into FileFormat errors.
template <class Fn>
auto json_guard(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kFileFormat, std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::string encode_features(const ImageFeatures& f) {
  const Index n = f.keypoints.count();
  const Index d = f.descriptors.width();
  require(f.descriptors.count() == n && static_cast<Index>(f.keypoints.scores.size()) == n,
          ErrorKind::kShapeMismatch, "keypoints, scores and descriptors disagree on count");
  ByteWriter w;
  w.bytes(kMagic);
  w.u16(kFeatureVersion);
  w.u32(checked_u32(n, "keypoint count"));
  w.u32(checked_u32(d, "descriptor width"));
  for (Index i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    w.f32(static_cast<float>(f.keypoints.positions[idx].x));
    w.f32(static_cast<float>(f.keypoints.positions[idx].y));
    w.f32(static_cast<float>(f.keypoints.scores[idx]));
    for (Index k = 0; k < d; ++k) w.f32(static_cast<float>(f.descriptors.values(i, k)));
  }
  return w.take();
}

ImageFeatures decode_features(std::string_view bytes) {
  ByteReader r(bytes);
  require(r.remaining() >= kMagic.size() && r.bytes(kMagic.size()) == kMagic, ErrorKind::kFileFormat,
          "not a feature file (bad magic)");
  const std::uint16_t version = r.u16();
  require(version == kFeatureVersion, ErrorKind::kFileFormat,
          "unsupported feature file version " + std::to_string(version));
  const std::uint32_t n = r.u32();
  const std::uint32_t d = r.u32();
  const std::uint64_t record = 4ull * (3ull + d);
  require(r.remaining() == record * n, ErrorKind::kFileFormat,
          "feature file body is " + std::to_string(r.remaining()) + " bytes, expected " + std::to_string(record * n));
  ImageFeatures f;
  f.descriptors.values.resize(n, d);
  f.keypoints.positions.reserve(n);
  f.keypoints.scores.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const double x = r.f32();
    const double y = r.f32();
    f.keypoints.positions.push_back({x, y});
    f.keypoints.scores.push_back(r.f32());
    for (std::uint32_t k = 0; k < d; ++k) f.descriptors.values(i, k) = r.f32();
  }
  return f;
}

nlohmann::json features_to_json(const ImageFeatures& f) {
  nlohmann::json records = nlohmann::json::array();
  for (Index i = 0; i < f.keypoints.count(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    std::vector<double> desc(f.descriptors.values.row(i).begin(), f.descriptors.values.row(i).end());
    records.push_back({{"x", f.keypoints.positions[idx].x},
                       {"y", f.keypoints.positions[idx].y},
                       {"score", f.keypoints.scores[idx]},
                       {"descriptor", desc}});
  }
  return {{"magic", kMagic},
          {"version", kFeatureVersion},
          {"n", f.keypoints.count()},
          {"d_in", f.descriptors.width()},
          {"records", records}};
}

ImageFeatures features_from_json(const nlohmann::json& j) {
  return json_guard("feature JSON", [&] {
    require(j.is_object(), ErrorKind::kFileFormat, "feature JSON must be an object");
    if (j.contains("magic")) {
      require(j.at("magic") == kMagic, ErrorKind::kFileFormat, "feature JSON has wrong magic");
    }
    if (j.contains("version")) {
      require(j.at("version").get<int>() == kFeatureVersion, ErrorKind::kFileFormat,
              "unsupported feature JSON version");
    }
    const auto& records = j.at("records");
    require(records.is_array(), ErrorKind::kFileFormat, "\"records\" must be an array");
    const auto n = static_cast<Index>(records.size());
    Index d = j.contains("d_in") ? j.at("d_in").get<Index>() : -1;
    if (d < 0) d = n > 0 ? static_cast<Index>(records.front().at("descriptor").size()) : 0;
    if (j.contains("n")) {
      require(j.at("n").get<Index>() == n, ErrorKind::kFileFormat, "\"n\" disagrees with the record count");
    }
    ImageFeatures f;
    f.descriptors.values.resize(n, d);
    for (Index i = 0; i < n; ++i) {
      const auto& rec = records.at(static_cast<std::size_t>(i));
      f.keypoints.positions.push_back({rec.at("x").get<double>(), rec.at("y").get<double>()});
      f.keypoints.scores.push_back(rec.contains("score") ? rec.at("score").get<double>() : 1.0);
      const auto& desc = rec.at("descriptor");
      if (static_cast<Index>(desc.size()) != d) {
        throw Error(ErrorKind::kShapeMismatch, "record " + std::to_string(i) + " has " +
                                                   std::to_string(desc.size()) + " descriptor values, expected " +
                                                   std::to_string(d));
      }
      for (Index k = 0; k < d; ++k) f.descriptors.values(i, k) = desc.at(static_cast<std::size_t>(k)).get<double>();
    }
    return f;
  });
}

ImageFeatures read_features(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (bytes.starts_with(kMagic)) return decode_features(bytes);
  const auto first = bytes.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && bytes[first] == '{') {
    const auto j = json_guard("feature JSON", [&] { return nlohmann::json::parse(bytes); });
    return features_from_json(j);
  }
  throw Error(ErrorKind::kFileFormat, path.string() + ": not a feature file (bad magic)");
}

void write_features(const std::filesystem::path& path, const ImageFeatures& features) {
  atomic_write(path, encode_features(features));
}

nlohmann::json ground_truth_to_json(const GroundTruth& gt) {
  nlohmann::json t = nlohmann::json::array();
  for (const auto& [i, j] : gt.matches) t.push_back({i, j});
  nlohmann::json out{{"T", t}, {"U_s", gt.unmatched_source}, {"U_t", gt.unmatched_target}};
  if (gt.warp) {
    const auto& m = gt.warp->m;
    out["warp"] = {{m(0, 0), m(0, 1), m(0, 2)}, {m(1, 0), m(1, 1), m(1, 2)}};
  }
  return out;
}

GroundTruth ground_truth_from_json(const nlohmann::json& j) {
  return json_guard("ground truth JSON", [&] {
    GroundTruth gt;
    for (const auto& pair : j.at("T")) {
      require(pair.is_array() && pair.size() == 2, ErrorKind::kFileFormat, "T entries must be [i, j] pairs");
      gt.matches.emplace_back(pair.at(0).get<Index>(), pair.at(1).get<Index>());
    }
    gt.unmatched_source = j.value("U_s", std::vector<Index>{});
    gt.unmatched_target = j.value("U_t", std::vector<Index>{});
    if (j.contains("warp") && !j.at("warp").is_null()) {
      const auto& w = j.at("warp");
      require(w.is_array() && w.size() == 2 && w.at(0).size() == 3 && w.at(1).size() == 3, ErrorKind::kFileFormat,
              "warp must be a 2 x 3 array");
      Affine2 a;
      for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 3; ++c) a.m(r, c) = w.at(r).at(c).get<double>();
      }
      gt.warp = a;
    }
    return gt;
  });
}

GroundTruth read_ground_truth(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto j = json_guard("ground truth JSON", [&] { return nlohmann::json::parse(text); });
  return ground_truth_from_json(j);
}

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& gt) {
  atomic_write(path, ground_truth_to_json(gt).dump(1) + "\n");
}

void write_problem_dir(const std::filesystem::path& dir, const MatchProblem& problem, const GroundTruth& gt) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir.string());
  write_features(dir / "source.amft", problem.source);
  write_features(dir / "target.amft", problem.target);
  write_ground_truth(dir / "gt.json", gt);
}

std::pair<MatchProblem, GroundTruth> read_problem_dir(const std::filesystem::path& dir) {
  MatchProblem p;
  p.source = read_features(dir / "source.amft");
  p.target = read_features(dir / "target.amft");
  GroundTruth gt = read_ground_truth(dir / "gt.json");
  return {std::move(p), std::move(gt)};
}

}  // namespace amatch
