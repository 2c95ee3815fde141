#include "qres/crypto.hpp"

#define OPENSSL_SUPPRESS_DEPRECATED
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/sha.h>
#include <sodium.h>

#include <cstring>

#include "qres/error.hpp"

namespace qres {

namespace {

constexpr std::uint8_t kPadByte = 0x08;

void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) fail(ErrorCode::RngFailure, "libsodium initialisation failed");
}

}  // namespace

Token token_from_bytes(ByteView raw) {
  if (raw.size() != kTokenSize) {
    fail(ErrorCode::BadTokenLength, "token must be 8 bytes, got " + std::to_string(raw.size()));
  }
  Token t;
  std::copy(raw.begin(), raw.end(), t.bytes.begin());
  return t;
}

EncryptedToken encrypted_token_from_bytes(ByteView raw) {
  check_length(raw.size(), kBlockSize, "encrypted token");
  EncryptedToken c;
  std::copy(raw.begin(), raw.end(), c.bytes.begin());
  return c;
}

SymKey keygen_sym(Rng& rng) { return SymKey{rng.bytes<16>()}; }
MacKey keygen_mac(Rng& rng) { return MacKey{rng.bytes<32>()}; }
Nonce make_nonce(Rng& rng) { return Nonce{rng.bytes<16>()}; }

Block pad16(const Token& t) {
  Block b;
  std::copy(t.bytes.begin(), t.bytes.end(), b.begin());
  std::fill(b.begin() + kTokenSize, b.end(), kPadByte);
  return b;
}

Token unpad16(const Block& b) {
  for (std::size_t i = kTokenSize; i < kBlockSize; ++i) {
    if (b[i] != kPadByte) fail(ErrorCode::BadPadding, "token padding check failed");
  }
  Token t;
  std::copy(b.begin(), b.begin() + kTokenSize, t.bytes.begin());
  return t;
}

struct Aes128::Impl {
  EVP_CIPHER_CTX* enc = nullptr;
  EVP_CIPHER_CTX* dec = nullptr;

  ~Impl() {
    EVP_CIPHER_CTX_free(enc);
    EVP_CIPHER_CTX_free(dec);
  }
};

Aes128::Aes128(const ByteArray<16>& key) : impl_(std::make_unique<Impl>()) {
  impl_->enc = EVP_CIPHER_CTX_new();
  impl_->dec = EVP_CIPHER_CTX_new();
  if (!impl_->enc || !impl_->dec ||
      EVP_EncryptInit_ex(impl_->enc, EVP_aes_128_ecb(), nullptr, key.data(), nullptr) != 1 ||
      EVP_DecryptInit_ex(impl_->dec, EVP_aes_128_ecb(), nullptr, key.data(), nullptr) != 1) {
    fail(ErrorCode::Io, "OpenSSL AES context setup failed");
  }
  EVP_CIPHER_CTX_set_padding(impl_->enc, 0);
  EVP_CIPHER_CTX_set_padding(impl_->dec, 0);
}

Aes128::~Aes128() = default;
Aes128::Aes128(Aes128&&) noexcept = default;
Aes128& Aes128::operator=(Aes128&&) noexcept = default;

Block Aes128::encrypt(const Block& in) const {
  Block out;
  int len = 0;
  if (EVP_EncryptUpdate(impl_->enc, out.data(), &len, in.data(), kBlockSize) != 1 ||
      len != static_cast<int>(kBlockSize)) {
    fail(ErrorCode::Io, "AES encrypt failed");
  }
  return out;
}

Block Aes128::decrypt(const Block& in) const {
  Block out;
  int len = 0;
  if (EVP_DecryptUpdate(impl_->dec, out.data(), &len, in.data(), kBlockSize) != 1 ||
      len != static_cast<int>(kBlockSize)) {
    fail(ErrorCode::Io, "AES decrypt failed");
  }
  return out;
}

EncryptedToken enc_token(const SymKey& k, const Token& t) {
  return EncryptedToken{Aes128(k.bytes).encrypt(pad16(t))};
}

Token dec_token(const SymKey& k, const EncryptedToken& c) {
  return unpad16(Aes128(k.bytes).decrypt(c.bytes));
}

Digest hash(ByteView m) {
  // The low-level interface skips the per-call provider fetch of SHA256().
  SHA256_CTX ctx;
  Digest d;
  SHA256_Init(&ctx);
  SHA256_Update(&ctx, m.data(), m.size());
  SHA256_Final(d.data(), &ctx);
  return d;
}

Digest hash(std::initializer_list<ByteView> parts) {
  SHA256_CTX ctx;
  Digest d;
  SHA256_Init(&ctx);
  for (auto p : parts) SHA256_Update(&ctx, p.data(), p.size());
  SHA256_Final(d.data(), &ctx);
  return d;
}

Tag mac_tag(const MacKey& mk, ByteView m) {
  Tag t;
  unsigned int len = 0;
  if (!HMAC(EVP_sha256(), mk.bytes.data(), static_cast<int>(mk.bytes.size()), m.data(), m.size(),
            t.data(), &len) ||
      len != t.size()) {
    fail(ErrorCode::Io, "HMAC-SHA-256 failed");
  }
  return t;
}

std::array<std::uint32_t, 8> sha256_compress(const std::array<std::uint32_t, 8>& state,
                                             ByteView block64) {
  check_length(block64.size(), 64, "SHA-256 block");
  crypto_hash_sha256_state st;
  crypto_hash_sha256_init(&st);
  std::memcpy(st.state, state.data(), sizeof(st.state));
  crypto_hash_sha256_update(&st, block64.data(), block64.size());
  std::array<std::uint32_t, 8> out;
  std::memcpy(out.data(), st.state, sizeof(st.state));
  return out;
}

std::array<std::uint32_t, 8> sha256_midstate(ByteView block64) {
  static constexpr std::array<std::uint32_t, 8> kIv = {0x6a09e667, 0xbb67ae85, 0x3c6ef372,
                                                       0xa54ff53a, 0x510e527f, 0x9b05688c,
                                                       0x1f83d9ab, 0x5be0cd19};
  return sha256_compress(kIv, block64);
}

SigKeyPair sig_keygen(Rng& rng) {
  ensure_sodium();
  auto seed = rng.bytes<crypto_sign_SEEDBYTES>();
  SigKeyPair kp;
  crypto_sign_seed_keypair(kp.pk.bytes.data(), kp.sk.bytes.data(), seed.data());
  sodium_memzero(seed.data(), seed.size());
  return kp;
}

Signature sign(const SigningKey& sk, ByteView m) {
  ensure_sodium();
  Signature sig;
  crypto_sign_detached(sig.bytes.data(), nullptr, m.data(), m.size(), sk.bytes.data());
  return sig;
}

bool verify(const VerifyKey& pk, ByteView m, const Signature& sig) {
  ensure_sodium();
  return crypto_sign_verify_detached(sig.bytes.data(), m.data(), m.size(), pk.bytes.data()) == 0;
}

}  // namespace qres
