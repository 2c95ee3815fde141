#pragma once

#include <utility>
#include <vector>

#include "qres/circuit.hpp"
#include "qres/crypto.hpp"
#include "qres/rng.hpp"

namespace qres::garble {

inline constexpr std::size_t kLabelSize = 16;
inline constexpr std::size_t kRowSize = kLabelSize + 8;  // label || 8 zero bytes
inline constexpr std::size_t kRowsPerGate = 4;
inline constexpr std::uint8_t kGarbledCircuitVersion = 1;

struct WireLabel {
  ByteArray<kLabelSize> bytes{};

  // Point-and-permute bit; the two labels of a wire always disagree on it.
  bool permute_bit() const { return bytes[kLabelSize - 1] & 1; }
  friend bool operator==(const WireLabel&, const WireLabel&) = default;
};

using LabelPair = std::pair<WireLabel, WireLabel>;  // (G^0, G^1)
using SessionId = ByteArray<16>;

enum class Party { Garbler, Evaluator };

struct GarbleOptions {
  bool free_xor = false;
};

// Garbled tables for one circuit, in gate order. AND gates (and XOR gates
// unless free-XOR is on) carry four rows; INV gates are free.
struct GarbledCircuit {
  SessionId session_id{};
  Digest circuit_digest{};
  std::uint32_t gate_count = 0;
  bool free_xor = false;
  Bytes tables;

  Bytes serialize() const;
  static GarbledCircuit deserialize(ByteView raw);  // Truncated, VersionMismatch
};

// All input label pairs. Input group 0 belongs to the garbler, the rest to
// the evaluator. The evaluator's pairs can be handed out exactly once.
class InputEncoding {
 public:
  InputEncoding() = default;
  InputEncoding(std::vector<LabelPair> pairs, std::uint32_t garbler_bits)
      : pairs_(std::move(pairs)), garbler_bits_(garbler_bits) {}

  std::uint32_t garbler_bits() const { return garbler_bits_; }
  std::uint32_t evaluator_bits() const {
    return static_cast<std::uint32_t>(pairs_.size()) - garbler_bits_;
  }

  std::vector<WireLabel> encode_garbler(std::span<const std::uint8_t> bits) const;  // WidthMismatch

  // Label pairs of the evaluator's wires, fed to oblivious transfer. A second
  // call throws EncodingConsumed.
  std::vector<LabelPair> take_evaluator_pairs();
  bool consumed() const { return consumed_; }

  const std::vector<LabelPair>& all_pairs_for_verification() const { return pairs_; }

 private:
  std::vector<LabelPair> pairs_;
  std::uint32_t garbler_bits_ = 0;
  bool consumed_ = false;
};

// Maps each output label back to its bit; detects labels from elsewhere.
struct OutputDecoding {
  struct Entry {
    ByteArray<8> check0{};
    ByteArray<8> check1{};
  };
  std::vector<Entry> entries;

  Bytes serialize() const;
  static OutputDecoding deserialize(ByteView raw);
};

struct GarbleResult {
  GarbledCircuit gc;
  InputEncoding encoding;
  OutputDecoding decoding;
};

GarbleResult garble(const circuit::Circuit& c, Rng& rng, GarbleOptions options = {});

// Garbler labels followed by evaluator labels, one per input wire.
std::vector<WireLabel> evaluate_garbled(const circuit::Circuit& c, const GarbledCircuit& gc,
                                        std::span<const WireLabel> input_labels);  // CorruptTable

circuit::Bits decode_output(const OutputDecoding& dec, std::span<const WireLabel> output_labels);

// Garbler-side selection of its own labels.
std::vector<WireLabel> encode_input(const InputEncoding& enc, std::span<const std::uint8_t> bits,
                                    Party party);

}  // namespace qres::garble
