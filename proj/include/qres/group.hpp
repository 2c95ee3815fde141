#pragma once

#include "qres/bytes.hpp"
#include "qres/rng.hpp"

// ristretto255: prime-order group with canonical 32-byte encodings.
namespace qres::group {

inline constexpr std::size_t kElementSize = 32;

struct Scalar {
  ByteArray<32> bytes{};
};

struct Element {
  ByteArray<kElementSize> bytes{};
  friend bool operator==(const Element&, const Element&) = default;
};

Scalar random_scalar(Rng& rng);
Element base_mul(const Scalar& s);
Element mul(const Element& p, const Scalar& s);  // InvalidGroupElement on identity result
Element add(const Element& a, const Element& b);
Element sub(const Element& a, const Element& b);

bool is_valid(const Element& e);
Element decode(ByteView raw);  // InvalidGroupElement

}  // namespace qres::group
