#include "qres/group.hpp"

#include <sodium.h>

#include "qres/error.hpp"

namespace qres::group {

Scalar random_scalar(Rng& rng) {
  auto wide = rng.bytes<crypto_core_ristretto255_NONREDUCEDSCALARBYTES>();
  Scalar s;
  crypto_core_ristretto255_scalar_reduce(s.bytes.data(), wide.data());
  return s;
}

Element base_mul(const Scalar& s) {
  Element e;
  if (crypto_scalarmult_ristretto255_base(e.bytes.data(), s.bytes.data()) != 0) {
    fail(ErrorCode::InvalidGroupElement, "zero scalar");
  }
  return e;
}

Element mul(const Element& p, const Scalar& s) {
  Element e;
  if (crypto_scalarmult_ristretto255(e.bytes.data(), s.bytes.data(), p.bytes.data()) != 0) {
    fail(ErrorCode::InvalidGroupElement, "scalar multiplication produced the identity");
  }
  return e;
}

Element add(const Element& a, const Element& b) {
  Element e;
  if (crypto_core_ristretto255_add(e.bytes.data(), a.bytes.data(), b.bytes.data()) != 0) {
    fail(ErrorCode::InvalidGroupElement, "invalid operand");
  }
  return e;
}

Element sub(const Element& a, const Element& b) {
  Element e;
  if (crypto_core_ristretto255_sub(e.bytes.data(), a.bytes.data(), b.bytes.data()) != 0) {
    fail(ErrorCode::InvalidGroupElement, "invalid operand");
  }
  return e;
}

bool is_valid(const Element& e) { return crypto_core_ristretto255_is_valid_point(e.bytes.data()) == 1; }

Element decode(ByteView raw) {
  if (raw.size() != kElementSize) {
    fail(ErrorCode::InvalidGroupElement, "group element must be 32 bytes");
  }
  Element e;
  std::copy(raw.begin(), raw.end(), e.bytes.begin());
  if (!is_valid(e)) fail(ErrorCode::InvalidGroupElement, "not a canonical ristretto255 encoding");
  return e;
}

}  // namespace qres::group
