#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>

#include "amatch/error.hpp"

namespace amatch {

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`.
void atomic_write(const std::filesystem::path& path, std::string_view bytes);

// Little-endian append-only encoder.
class ByteWriter {
 public:
  void bytes(std::string_view s) { out_.append(s); }
  void u16(std::uint16_t v) { put(v); }
  void u32(std::uint32_t v) { put(v); }
  void u64(std::uint64_t v) { put(v); }
  void f32(float v) { put(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
  const std::string& str() const { return out_; }
  std::string take() { return std::move(out_); }

 private:
  template <class U>
  void put(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  std::string out_;
};

// Bounds-checked little-endian decoder; running past the end throws FileFormat.
class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}

  std::string_view bytes(std::size_t count) {
    need(count);
    const auto s = data_.substr(pos_, count);
    pos_ += count;
    return s;
  }
  std::uint16_t u16() { return get<std::uint16_t>(); }
  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::uint64_t u64() { return get<std::uint64_t>(); }
  float f32() { return std::bit_cast<float>(get<std::uint32_t>()); }
  double f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  std::size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t count) const {
    if (data_.size() - pos_ < count) {
      throw Error(ErrorKind::kFileFormat, "truncated input: need " + std::to_string(count) + " bytes at offset " +
                                              std::to_string(pos_) + ", have " + std::to_string(data_.size() - pos_));
    }
  }
  template <class U>
  U get() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      v |= static_cast<U>(static_cast<U>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i));
    }
    pos_ += sizeof(U);
    return v;
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace amatch
