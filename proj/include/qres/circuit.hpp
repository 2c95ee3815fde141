#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qres/crypto.hpp"

namespace qres::circuit {

using WireId = std::uint32_t;
// One bit per element, each 0 or 1.
using Bits = std::vector<std::uint8_t>;

enum class GateKind : std::uint8_t { And, Xor, Inv };

struct Gate {
  GateKind kind;
  WireId in0;
  WireId in1;  // unused for Inv
  WireId out;
};

// Boolean circuit in Bristol Fashion conventions: input groups occupy wires
// [0, num_inputs) in order, outputs are the last num_outputs wires.
class Circuit {
 public:
  Circuit() = default;
  // Validates wiring; throws FormatError or NonTopological.
  Circuit(std::vector<Gate> gates, std::uint32_t num_wires, std::vector<std::uint32_t> input_widths,
          std::vector<std::uint32_t> output_widths);

  const std::vector<Gate>& gates() const { return gates_; }
  std::uint32_t num_wires() const { return num_wires_; }
  const std::vector<std::uint32_t>& input_widths() const { return input_widths_; }
  const std::vector<std::uint32_t>& output_widths() const { return output_widths_; }
  std::uint32_t num_inputs() const { return num_inputs_; }
  std::uint32_t num_outputs() const { return num_outputs_; }
  WireId first_output_wire() const { return num_wires_ - num_outputs_; }

  std::size_t count(GateKind kind) const;

 private:
  std::vector<Gate> gates_;
  std::uint32_t num_wires_ = 0;
  std::vector<std::uint32_t> input_widths_;
  std::vector<std::uint32_t> output_widths_;
  std::uint32_t num_inputs_ = 0;
  std::uint32_t num_outputs_ = 0;
};

Circuit parse_bristol(std::string_view text);
std::string to_bristol(const Circuit& c);
// SHA-256 over the canonical Bristol serialization.
Digest circuit_digest(const Circuit& c);

Bits eval_plain(const Circuit& c, std::span<const std::uint8_t> inputs);  // WidthMismatch

// MSB-first bit expansion: bit i is bit (7 - i % 8) of byte i / 8.
Bits to_bits(ByteView bytes);
Bytes from_bits(std::span<const std::uint8_t> bits);

}  // namespace qres::circuit
