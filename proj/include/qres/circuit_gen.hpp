#pragma once

#include "qres/circuit.hpp"
#include "qres/circuit_builder.hpp"

// Generators for the circuits shipped under resources/. Bit order everywhere
// is MSB-first within bytes and bytes in natural order (see to_bits).
namespace qres::circuit {

// Inputs: key (128), plaintext block (128). Output: ciphertext block (128).
Circuit make_aes128_circuit();

// Inputs: message block (512), chaining value (256, eight big-endian words).
// Output: next chaining value (256), including the feed-forward addition.
Circuit make_sha256_compress_circuit();

// Boyar-Peralta S-box on 8 MSB-first bits; exposed for exhaustive testing.
BitVec sbox_bits(Builder& b, const BitVec& x);

}  // namespace qres::circuit
