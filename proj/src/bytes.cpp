#include "qres/bytes.hpp"

#include <algorithm>

#include "qres/error.hpp"

namespace qres {

namespace {

int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) fail(ErrorCode::BadLength, "odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) fail(ErrorCode::BadLength, "invalid hex digit");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

void check_length(std::size_t got, std::size_t want, std::string_view what) {
  if (got != want) {
    fail(ErrorCode::BadLength, std::string(what) + ": expected " + std::to_string(want) +
                                   " bytes, got " + std::to_string(got));
  }
}

bool contains(ByteView haystack, ByteView needle) {
  if (needle.empty()) return true;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
         haystack.end();
}

void Writer::u16(std::uint16_t v) {
  buf_.push_back(static_cast<std::uint8_t>(v >> 8));
  buf_.push_back(static_cast<std::uint8_t>(v));
}

void Writer::u32(std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> s));
}

void Writer::u64(std::uint64_t v) {
  for (int s = 56; s >= 0; s -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> s));
}

void Writer::blob(ByteView data) {
  u32(static_cast<std::uint32_t>(data.size()));
  raw(data);
}

ByteView Reader::raw(std::size_t n) {
  if (remaining() < n) {
    fail(ErrorCode::Truncated, "need " + std::to_string(n) + " bytes, have " +
                                   std::to_string(remaining()));
  }
  auto out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::uint8_t Reader::u8() { return raw(1)[0]; }

std::uint16_t Reader::u16() {
  auto v = raw(2);
  return static_cast<std::uint16_t>((v[0] << 8) | v[1]);
}

std::uint32_t Reader::u32() {
  auto v = raw(4);
  return (std::uint32_t{v[0]} << 24) | (std::uint32_t{v[1]} << 16) | (std::uint32_t{v[2]} << 8) |
         std::uint32_t{v[3]};
}

std::uint64_t Reader::u64() {
  std::uint64_t hi = u32();
  return (hi << 32) | u32();
}

Bytes Reader::blob() {
  auto n = u32();
  auto v = raw(n);
  return {v.begin(), v.end()};
}

std::string Reader::str() {
  auto n = u32();
  auto v = raw(n);
  return {v.begin(), v.end()};
}

void Reader::expect_done() const {
  if (!done()) fail(ErrorCode::ProtocolError, std::to_string(remaining()) + " trailing bytes");
}

}  // namespace qres
