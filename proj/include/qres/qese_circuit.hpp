#pragma once

#include <filesystem>

#include "qres/circuit.hpp"
#include "qres/crypto.hpp"

namespace qres {

enum class QeseMode : std::uint8_t { Basic = 1, Validated = 2 };

std::string_view mode_name(QeseMode mode);
QeseMode parse_mode(std::string_view name);  // Config

// The function garbled once per keyword. Input group 0 belongs to the
// provider (garbler), group 1 to the broker (evaluator).
//
// Basic:     garbler = k (128); evaluator = pad16(w) (128); output Enc(k, w).
// Validated: garbler = k (128) || HMAC inner midstate (256) || outer midstate (256);
//            evaluator = pad16(w) (128) || tag (256); output Enc(k, w) when
//            HMAC-SHA-256(k_val, w) == tag, else the all-zero block.
struct QeseCircuit {
  QeseMode mode;
  circuit::Circuit circuit;
  Digest digest;

  std::uint32_t garbler_bits() const { return circuit.input_widths()[0]; }
  std::uint32_t evaluator_bits() const { return circuit.input_widths()[1]; }
};

// Gates added around the embedded AES and SHA-256 circuits in Validated mode:
// two constant wires, a 256-bit equality comparator and a 128-bit mux.
inline constexpr std::size_t kValidatedGlueGates = 2 + (256 + 256 + 255) + 128;

// Directory holding aes_128.txt and sha256_compress.txt. Defaults to the
// source tree's resources/; QRES_RESOURCES overrides it.
std::filesystem::path resource_dir();
circuit::Circuit load_resource_circuit(std::string_view filename);  // ResourceMissing

// Built once per mode and cached; ResourceMissing when the files are absent.
const QeseCircuit& build_qese_circuit(QeseMode mode);

struct HmacMidstates {
  std::array<std::uint32_t, 8> inner;
  std::array<std::uint32_t, 8> outer;
};
HmacMidstates hmac_midstates(const MacKey& k_val);

circuit::Bits garbler_input(QeseMode mode, const SymKey& k, const MacKey* k_val);
circuit::Bits evaluator_input(QeseMode mode, const Token& w, const Tag* tag);

inline bool is_bottom(const EncryptedToken& c) { return c == EncryptedToken{}; }

}  // namespace qres
