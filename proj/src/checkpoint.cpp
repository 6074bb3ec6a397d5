#include "amatch/checkpoint.hpp"

#include <limits>

#include "amatch/error.hpp"
#include "amatch/io.hpp"

namespace amatch {
namespace {

constexpr std::string_view kMagic = "AMCK";
constexpr std::string_view kStateMagic = "AMTS";

void write_f64_matrix(ByteWriter& w, const Matrix& m) {
  for (Index i = 0; i < m.size(); ++i) w.f64(m.data()[i]);
}

Matrix read_f64_matrix(ByteReader& r, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = r.f64();
  return m;
}

}  // namespace

std::string encode_checkpoint(const Checkpoint& ckpt) {
  const ModelParams& p = ckpt.params;
  nlohmann::json header{{"model", p.config}};
  if (ckpt.train) header["train"] = *ckpt.train;
  const std::string json = header.dump();

  ByteWriter w;
  w.bytes(kMagic);
  w.u16(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(json.size()));
  w.bytes(json);
  w.u32(static_cast<std::uint32_t>(p.tensors.size()));
  for (const auto& t : p.tensors) {
    w.u16(static_cast<std::uint16_t>(t.name.size()));
    w.bytes(t.name);
    w.u32(static_cast<std::uint32_t>(t.value.rows()));
    w.u32(static_cast<std::uint32_t>(t.value.cols()));
    for (Index i = 0; i < t.value.size(); ++i) w.f32(static_cast<float>(t.value.data()[i]));
  }
  if (ckpt.resume) {
    const ResumeState& s = *ckpt.resume;
    require(s.params.size() == p.tensors.size() && s.adam.m.size() == p.tensors.size() &&
                s.adam.v.size() == p.tensors.size(),
            ErrorKind::kShapeMismatch, "training state does not match the parameter list");
    w.bytes(kStateMagic);
    w.u64(static_cast<std::uint64_t>(s.step));
    w.u64(static_cast<std::uint64_t>(s.adam.step));
    for (std::size_t i = 0; i < p.tensors.size(); ++i) {
      const Matrix& ref = p.tensors[i].value;
      for (const Matrix* m : {&s.params[i], &s.adam.m[i], &s.adam.v[i]}) {
        require(m->rows() == ref.rows() && m->cols() == ref.cols(), ErrorKind::kShapeMismatch,
                "training state shape differs for " + p.tensors[i].name);
      }
      write_f64_matrix(w, s.params[i]);
      write_f64_matrix(w, s.adam.m[i]);
      write_f64_matrix(w, s.adam.v[i]);
    }
  }
  return w.take();
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  ByteReader r(bytes);
  require(r.remaining() >= kMagic.size() && r.bytes(kMagic.size()) == kMagic, ErrorKind::kFileFormat,
          "not a checkpoint (bad magic)");
  const std::uint16_t version = r.u16();
  require(version == kCheckpointVersion, ErrorKind::kFileFormat,
          "unsupported checkpoint version " + std::to_string(version));
  const std::uint32_t json_len = r.u32();
  const std::string_view json_text = r.bytes(json_len);

  Checkpoint ckpt;
  ModelConfig model;
  try {
    const auto header = nlohmann::json::parse(json_text);
    model = header.at("model").get<ModelConfig>();
    if (header.contains("train")) ckpt.train = header.at("train").get<TrainConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kFileFormat, std::string("checkpoint header: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorKind::kFileFormat, "checkpoint header: " + e.detail());
  }
  ckpt.params = make_params(model);

  auto& tensors = ckpt.params.tensors;
  const std::uint32_t count = r.u32();
  require(count == tensors.size(), ErrorKind::kFileFormat,
          "checkpoint has " + std::to_string(count) + " tensors, config implies " + std::to_string(tensors.size()));
  for (auto& t : tensors) {
    const std::uint16_t name_len = r.u16();
    const std::string_view name = r.bytes(name_len);
    require(name == t.name, ErrorKind::kFileFormat,
            "tensor '" + std::string(name) + "' where '" + t.name + "' was expected");
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    require(rows == t.value.rows() && cols == t.value.cols(), ErrorKind::kFileFormat,
            "tensor " + t.name + " has shape " + std::to_string(rows) + "x" + std::to_string(cols));
    for (Index i = 0; i < t.value.size(); ++i) t.value.data()[i] = r.f32();
  }

  if (!r.done()) {
    require(r.remaining() >= kStateMagic.size() && r.bytes(kStateMagic.size()) == kStateMagic,
            ErrorKind::kFileFormat, "unexpected trailing bytes in checkpoint");
    ResumeState s;
    s.step = static_cast<std::int64_t>(r.u64());
    s.adam.step = static_cast<std::int64_t>(r.u64());
    for (const auto& t : tensors) {
      s.params.push_back(read_f64_matrix(r, t.value.rows(), t.value.cols()));
      s.adam.m.push_back(read_f64_matrix(r, t.value.rows(), t.value.cols()));
      s.adam.v.push_back(read_f64_matrix(r, t.value.rows(), t.value.cols()));
    }
    require(r.done(), ErrorKind::kFileFormat, "unexpected trailing bytes after training state");
    ckpt.resume = std::move(s);
  }
  return ckpt;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  atomic_write(path, encode_checkpoint(ckpt));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file(path)); }

ModelParams exact_params(const Checkpoint& ckpt) {
  ModelParams p = ckpt.params;
  if (ckpt.resume) {
    for (std::size_t i = 0; i < p.tensors.size(); ++i) p.tensors[i].value = ckpt.resume->params[i];
  }
  return p;
}

}  // namespace amatch
