#pragma once

// Little-endian primitive readers/writers shared by the .flo/FMAP/SFLD codecs.

#include <bit>
#include <cstdint>
#include <fstream>
#include <string>

#include "crowdseg/errors.hpp"

namespace crowdseg::detail {

inline void put_u8(std::ostream& out, std::uint8_t v) {
  out.put(static_cast<char>(v));
}

inline void put_u16le(std::ostream& out, std::uint16_t v) {
  out.put(static_cast<char>(v & 0xff));
  out.put(static_cast<char>(v >> 8));
}

inline void put_i32le(std::ostream& out, std::int32_t v) {
  auto u = static_cast<std::uint32_t>(v);
  for (int i = 0; i < 4; ++i) out.put(static_cast<char>((u >> (8 * i)) & 0xff));
}

inline void put_f32le(std::ostream& out, float v) {
  put_i32le(out, static_cast<std::int32_t>(std::bit_cast<std::uint32_t>(v)));
}

inline std::uint8_t get_u8(std::istream& in, const std::string& path) {
  int c = in.get();
  if (c == EOF) throw IoError(path + ": unexpected end of file");
  return static_cast<std::uint8_t>(c);
}

inline std::uint16_t get_u16le(std::istream& in, const std::string& path) {
  std::uint16_t lo = get_u8(in, path), hi = get_u8(in, path);
  return static_cast<std::uint16_t>(lo | (hi << 8));
}

inline std::int32_t get_i32le(std::istream& in, const std::string& path) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(get_u8(in, path)) << (8 * i);
  return static_cast<std::int32_t>(v);
}

inline float get_f32le(std::istream& in, const std::string& path) {
  return std::bit_cast<float>(static_cast<std::uint32_t>(get_i32le(in, path)));
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open file for writing");
  return out;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open file");
  return in;
}

}  // namespace crowdseg::detail
