#pragma once

#include <optional>

#include "qres/garble.hpp"

// Cut-and-choose over n independently garbled copies of one circuit. Each
// copy is garbled from its own 32-byte seed so that opening it means sending
// the seed; the evaluator regarbles and compares.
namespace qres::garble {

inline constexpr std::size_t kDefaultCacCopies = 10;

struct CacCopy {
  GarbledCircuit gc;
  // Per garbler input wire, H(nonce || label) for the label whose permute
  // bit is 0 and for the one whose permute bit is 1.
  std::vector<std::array<Digest, 2>> input_commitments;
  Digest decoding_digest{};
};

struct CutAndChoosePack {
  std::vector<CacCopy> copies;

  Bytes serialize() const;
  static CutAndChoosePack deserialize(ByteView raw);
};

struct CacOpening {
  std::vector<std::pair<std::uint32_t, ByteArray<32>>> revealed_seeds;
  std::uint32_t evaluated = 0;
  std::vector<WireLabel> garbler_labels;
  std::vector<ByteArray<16>> label_nonces;
  OutputDecoding decoding;

  Bytes serialize() const;
  static CacOpening deserialize(ByteView raw);
};

// Garbler-side secret state.
class CacGarbler {
 public:
  // garbler_bits are fixed before garbling and baked into every copy's
  // commitments. n >= 2.
  CacGarbler(const circuit::Circuit& c, std::span<const std::uint8_t> garbler_bits, std::size_t n,
             Rng& rng, GarbleOptions options = {});

  const CutAndChoosePack& pack() const { return pack_; }

  // reveal_set must hold n - 1 distinct indices in [0, n); BadIndexSet otherwise.
  // May only be answered once.
  CacOpening open(std::span<const std::uint32_t> reveal_set);

  // Encoding of the unopened copy, available after open().
  InputEncoding& evaluated_encoding();

 private:
  const circuit::Circuit* circuit_;
  circuit::Bits garbler_bits_;
  GarbleOptions options_;
  std::vector<ByteArray<32>> seeds_;
  CutAndChoosePack pack_;
  std::optional<std::uint32_t> evaluated_;
  GarbleResult evaluated_result_;
};

// Deterministic garbling of one copy from its seed: the garbled circuit, the
// encoding, and the commitment nonces.
struct CacCopySecrets {
  GarbleResult result;
  std::vector<std::array<ByteArray<16>, 2>> nonces;  // indexed by permute bit
  std::vector<std::array<Digest, 2>> commitments;
};
CacCopySecrets cac_garble_copy(const circuit::Circuit& c, const ByteArray<32>& seed,
                               GarbleOptions options);

// Picks n - 1 of n copies to open uniformly at random.
std::vector<std::uint32_t> cac_choose(std::size_t n, Rng& rng);

// True iff every revealed copy regarbles to exactly what was sent, the
// opening covers the complementary index, and the garbler's labels for the
// evaluated copy open its commitments.
bool cac_verify(const circuit::Circuit& c, const CutAndChoosePack& pack,
                std::span<const std::uint32_t> reveal_set, const CacOpening& opening,
                GarbleOptions options = {});

}  // namespace qres::garble
