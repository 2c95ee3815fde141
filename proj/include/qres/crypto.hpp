#pragma once

#include <initializer_list>
#include <memory>

#include "qres/bytes.hpp"
#include "qres/rng.hpp"

namespace qres {

inline constexpr std::size_t kTokenSize = 8;
inline constexpr std::size_t kBlockSize = 16;

using Block = ByteArray<kBlockSize>;
using Digest = ByteArray<32>;
using Tag = ByteArray<32>;

// 8-byte derived form of an SLO substring.
struct Token {
  ByteArray<kTokenSize> bytes{};
  friend bool operator==(const Token&, const Token&) = default;
  friend auto operator<=>(const Token&, const Token&) = default;
};

struct SymKey {
  ByteArray<16> bytes{};
  friend bool operator==(const SymKey&, const SymKey&) = default;
};

// One AES block: Enc(k, t) for a provider token or a customer keyword.
struct EncryptedToken {
  Block bytes{};
  friend bool operator==(const EncryptedToken&, const EncryptedToken&) = default;
  friend auto operator<=>(const EncryptedToken&, const EncryptedToken&) = default;
};

struct Nonce {
  ByteArray<16> bytes{};
  friend bool operator==(const Nonce&, const Nonce&) = default;
};

struct MacKey {
  ByteArray<32> bytes{};
  friend bool operator==(const MacKey&, const MacKey&) = default;
};

struct VerifyKey {
  ByteArray<32> bytes{};
  friend bool operator==(const VerifyKey&, const VerifyKey&) = default;
};

struct SigningKey {
  ByteArray<64> bytes{};
};

struct Signature {
  ByteArray<64> bytes{};
  friend bool operator==(const Signature&, const Signature&) = default;
};

struct SigKeyPair {
  SigningKey sk;
  VerifyKey pk;
};

Token token_from_bytes(ByteView raw);               // BadTokenLength
EncryptedToken encrypted_token_from_bytes(ByteView raw);  // BadLength

SymKey keygen_sym(Rng& rng);
MacKey keygen_mac(Rng& rng);
Nonce make_nonce(Rng& rng);

// Fixed-length padding of an 8-byte token to one block: t || 0x08 * 8.
Block pad16(const Token& t);
Token unpad16(const Block& b);  // BadPadding

// AES-128 on a single block. Holds OpenSSL contexts; not shareable across threads.
class Aes128 {
 public:
  explicit Aes128(const ByteArray<16>& key);
  ~Aes128();
  Aes128(Aes128&&) noexcept;
  Aes128& operator=(Aes128&&) noexcept;

  Block encrypt(const Block& in) const;
  Block decrypt(const Block& in) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

EncryptedToken enc_token(const SymKey& k, const Token& t);
Token dec_token(const SymKey& k, const EncryptedToken& c);  // BadPadding

Digest hash(ByteView m);
Digest hash(std::initializer_list<ByteView> parts);
Tag mac_tag(const MacKey& mk, ByteView m);

// SHA-256 chaining value after absorbing exactly one 64-byte block from the standard IV.
std::array<std::uint32_t, 8> sha256_midstate(ByteView block64);
// One SHA-256 compression step applied to an arbitrary chaining value.
std::array<std::uint32_t, 8> sha256_compress(const std::array<std::uint32_t, 8>& state,
                                             ByteView block64);

SigKeyPair sig_keygen(Rng& rng);
Signature sign(const SigningKey& sk, ByteView m);
bool verify(const VerifyKey& pk, ByteView m, const Signature& sig);

}  // namespace qres
