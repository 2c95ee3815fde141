#include "qres/rng.hpp"

#include <sodium.h>

#include "qres/error.hpp"

namespace qres {

namespace {

void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) fail(ErrorCode::RngFailure, "libsodium initialisation failed");
}

}  // namespace

std::uint64_t Rng::next_u64() {
  auto b = bytes<8>();
  std::uint64_t v = 0;
  for (auto x : b) v = (v << 8) | x;
  return v;
}

std::uint64_t Rng::uniform(std::uint64_t bound) {
  // rejection sampling removes modulo bias
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  for (;;) {
    auto v = next_u64();
    if (v < limit) return v % bound;
  }
}

SystemRng::SystemRng() { ensure_sodium(); }

void SystemRng::fill(std::span<std::uint8_t> out) { randombytes_buf(out.data(), out.size()); }

DeterministicRng::DeterministicRng(std::uint64_t seed) {
  ensure_sodium();
  for (int i = 0; i < 8; ++i) key_[i] = static_cast<std::uint8_t>(seed >> (56 - 8 * i));
}

DeterministicRng::DeterministicRng(const ByteArray<32>& seed) : key_(seed) { ensure_sodium(); }

void DeterministicRng::refill() {
  ByteArray<crypto_stream_chacha20_ietf_NONCEBYTES> nonce{};
  block_.fill(0);
  crypto_stream_chacha20_ietf_xor_ic(block_.data(), block_.data(), block_.size(), nonce.data(),
                                     counter_++, key_.data());
  used_ = 0;
}

void DeterministicRng::fill(std::span<std::uint8_t> out) {
  for (auto& b : out) {
    if (used_ == block_.size()) refill();
    b = block_[used_++];
  }
}

Rng& system_rng() {
  static SystemRng rng;
  return rng;
}

}  // namespace qres
