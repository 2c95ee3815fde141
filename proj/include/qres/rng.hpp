#pragma once

#include <cstdint>
#include <span>

#include "qres/bytes.hpp"

namespace qres {

class Rng {
 public:
  virtual ~Rng() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;

  template <std::size_t N>
  ByteArray<N> bytes() {
    ByteArray<N> out{};
    fill(out);
    return out;
  }

  std::uint64_t next_u64();
  // Uniform integer in [0, bound); bound > 0.
  std::uint64_t uniform(std::uint64_t bound);
};

// Operating-system CSPRNG (libsodium randombytes).
class SystemRng final : public Rng {
 public:
  SystemRng();
  void fill(std::span<std::uint8_t> out) override;
};

// ChaCha20 keystream seeded from a 64-bit value or a 32-byte seed. Used for
// reproducible fixtures, scenario generation and cut-and-choose openings.
class DeterministicRng final : public Rng {
 public:
  explicit DeterministicRng(std::uint64_t seed);
  explicit DeterministicRng(const ByteArray<32>& seed);

  void fill(std::span<std::uint8_t> out) override;

 private:
  void refill();

  ByteArray<32> key_{};
  std::uint32_t counter_ = 0;
  ByteArray<64> block_{};
  std::size_t used_ = 64;
};

// Process-wide system RNG instance.
Rng& system_rng();

}  // namespace qres
