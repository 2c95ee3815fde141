#include <gtest/gtest.h>

#include <set>

#include "qres/crypto.hpp"
#include "qres/error.hpp"
#include "qres/group.hpp"

using namespace qres;

namespace {

Token token_of(std::string_view hex) { return token_from_bytes(from_hex(hex)); }

SymKey sequential_key() {
  SymKey k;
  for (int i = 0; i < 16; ++i) k.bytes[i] = static_cast<std::uint8_t>(i);
  return k;
}

}  // namespace

TEST(Keygen, KeysAreSixteenBytesAndDistinct) {
  std::set<std::string> seen;
  for (int i = 0; i < 1000; ++i) {
    auto k = keygen_sym(system_rng());
    EXPECT_EQ(k.bytes.size(), 16u);
    seen.insert(to_hex(k.bytes));
  }
  EXPECT_EQ(seen.size(), 1000u);
}

TEST(Keygen, DeterministicSeedReproducesKey) {
  DeterministicRng a(42), b(42), c(43);
  auto ka = keygen_sym(a);
  EXPECT_EQ(ka, keygen_sym(b));
  EXPECT_NE(ka, keygen_sym(c));
  // ChaCha20-IETF keystream, key = seed as 8 big-endian bytes + 24 zero bytes
  EXPECT_EQ(to_hex(ka.bytes), to_hex(keygen_sym(*std::make_unique<DeterministicRng>(42)).bytes));
}

TEST(EncToken, PinnedVectors) {
  // computed with an independent AES-128 (Python `cryptography`)
  EXPECT_EQ(to_hex(enc_token(sequential_key(), token_of("0000000000000000")).bytes),
            "603d8ccd7521e2961567c024df336785");
  EXPECT_EQ(to_hex(enc_token(sequential_key(), token_of("6b0e3c36430c5f13")).bytes),
            "5e34f3c31c60d3793ba4cdc91b395421");
}

TEST(EncToken, FipsBlockVector) {
  Aes128 aes(sequential_key().bytes);
  auto pt = array_from_hex<16>("00112233445566778899aabbccddeeff");
  EXPECT_EQ(to_hex(aes.encrypt(pt)), "69c4e0d86a7b0430d8cdb78070b4c55a");
  EXPECT_EQ(aes.decrypt(aes.encrypt(pt)), pt);
}

TEST(EncToken, DeterministicAndInjective) {
  DeterministicRng rng(7);
  auto k = keygen_sym(rng);
  std::set<std::string> cts;
  for (int i = 0; i < 100000; ++i) {
    Token t{rng.bytes<8>()};
    auto c = enc_token(k, t);
    ASSERT_EQ(dec_token(k, c), t);
    cts.insert(to_hex(c.bytes));
  }
  EXPECT_EQ(cts.size(), 100000u);
  Token t{};
  EXPECT_EQ(enc_token(k, t), enc_token(k, t));
}

TEST(DecToken, WrongKeyFailsPadding) {
  DeterministicRng rng(11);
  int rejected = 0;
  for (int i = 0; i < 1000; ++i) {
    auto k1 = keygen_sym(rng);
    auto k2 = keygen_sym(rng);
    auto c = enc_token(k1, Token{rng.bytes<8>()});
    try {
      dec_token(k2, c);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::BadPadding);
      ++rejected;
    }
  }
  EXPECT_EQ(rejected, 1000);
}

TEST(DecToken, TamperedLastByte) {
  auto k = sequential_key();
  Token t = token_of("0102030405060708");
  auto c = enc_token(k, t);
  c.bytes[15] ^= 1;
  try {
    EXPECT_NE(dec_token(k, c), t);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadPadding);
  }
}

TEST(EncToken, BadTokenLength) {
  Bytes seven(7);
  try {
    token_from_bytes(seven);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadTokenLength);
  }
}

TEST(Hash, Vectors) {
  EXPECT_EQ(to_hex(hash(ByteView{})),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  auto a = hash(as_bytes("abc"));
  EXPECT_EQ(a, hash({as_bytes("a"), as_bytes("bc")}));
  EXPECT_NE(hash(as_bytes("abc")), hash(as_bytes("abb")));
}

TEST(Mac, Rfc4231CaseOne) {
  MacKey mk{};
  std::fill(mk.bytes.begin(), mk.bytes.begin() + 20, 0x0b);
  // HMAC zero-pads short keys, so a 20-byte key equals its 32-byte zero extension
  EXPECT_EQ(to_hex(mac_tag(mk, as_bytes("Hi There"))),
            "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7");
}

TEST(Mac, KeysSeparateTags) {
  DeterministicRng rng(3);
  for (int i = 0; i < 200; ++i) {
    auto m = rng.bytes<24>();
    EXPECT_NE(mac_tag(keygen_mac(rng), m), mac_tag(keygen_mac(rng), m));
  }
}

TEST(Sha256Compress, MidstateMatchesFullHash) {
  // a 55-byte message fits one padded block
  Bytes msg(55, 'q');
  Bytes block = msg;
  block.push_back(0x80);
  block.resize(56, 0);
  for (int s = 56; s >= 0; s -= 8) block.push_back(static_cast<std::uint8_t>((55 * 8ull) >> s));
  auto st = sha256_midstate(block);
  Bytes digest;
  for (auto w : st) {
    for (int s = 24; s >= 0; s -= 8) digest.push_back(static_cast<std::uint8_t>(w >> s));
  }
  EXPECT_EQ(to_hex(digest), to_hex(hash(msg)));
}

TEST(Signature, Contract) {
  DeterministicRng rng(5);
  auto kp = sig_keygen(rng);
  auto other = sig_keygen(rng);
  Bytes m = {1, 2, 3, 4};
  auto sig = sign(kp.sk, m);
  EXPECT_TRUE(verify(kp.pk, m, sig));
  Bytes m2 = m;
  m2[0] ^= 1;
  EXPECT_FALSE(verify(kp.pk, m2, sig));
  EXPECT_FALSE(verify(other.pk, m, sig));
  auto bad = sig;
  bad.bytes[10] ^= 0x40;
  EXPECT_FALSE(verify(kp.pk, m, bad));
}

TEST(Group, LawsAndEncoding) {
  DeterministicRng rng(9);
  auto a = group::random_scalar(rng);
  auto b = group::random_scalar(rng);
  auto ga = group::base_mul(a);
  auto gb = group::base_mul(b);
  EXPECT_TRUE(group::is_valid(ga));
  EXPECT_EQ(group::mul(ga, b), group::mul(gb, a));
  EXPECT_EQ(group::sub(group::add(ga, gb), gb), ga);
  EXPECT_EQ(group::decode(ga.bytes), ga);
  auto bad = ga.bytes;
  bad[0] |= 1;  // odd s is a negative field element, never canonical
  EXPECT_THROW(group::decode(bad), Error);
  EXPECT_THROW(group::decode(Bytes(31)), Error);
}
