#include "qres/circuit_gen.hpp"

#include <array>

namespace qres::circuit {

BitVec sbox_bits(Builder& b, const BitVec& x) {
  auto X = [&](Bit p, Bit q) { return b.xor_(p, q); };
  auto A = [&](Bit p, Bit q) { return b.and_(p, q); };
  auto N = [&](Bit p, Bit q) { return b.xnor_(p, q); };

  // Boyar & Peralta straight-line program, depth 16, 32 AND gates.
  // top linear transformation
  Bit y14 = X(x[3], x[5]);
  Bit y13 = X(x[0], x[6]);
  Bit y9 = X(x[0], x[3]);
  Bit y8 = X(x[0], x[5]);
  Bit t0 = X(x[1], x[2]);
  Bit y1 = X(t0, x[7]);
  Bit y4 = X(y1, x[3]);
  Bit y12 = X(y13, y14);
  Bit y2 = X(y1, x[0]);
  Bit y5 = X(y1, x[6]);
  Bit y3 = X(y5, y8);
  Bit t1 = X(x[4], y12);
  Bit y15 = X(t1, x[5]);
  Bit y20 = X(t1, x[1]);
  Bit y6 = X(y15, x[7]);
  Bit y10 = X(y15, t0);
  Bit y11 = X(y20, y9);
  Bit y7 = X(x[7], y11);
  Bit y17 = X(y10, y11);
  Bit y19 = X(y10, y8);
  Bit y16 = X(t0, y11);
  Bit y21 = X(y13, y16);
  Bit y18 = X(x[0], y16);

  // nonlinear middle
  Bit t2 = A(y12, y15);
  Bit t3 = A(y3, y6);
  Bit t4 = X(t3, t2);
  Bit t5 = A(y4, x[7]);
  Bit t6 = X(t5, t2);
  Bit t7 = A(y13, y16);
  Bit t8 = A(y5, y1);
  Bit t9 = X(t8, t7);
  Bit t10 = A(y2, y7);
  Bit t11 = X(t10, t7);
  Bit t12 = A(y9, y11);
  Bit t13 = A(y14, y17);
  Bit t14 = X(t13, t12);
  Bit t15 = A(y8, y10);
  Bit t16 = X(t15, t12);
  Bit t17 = X(t4, t14);
  Bit t18 = X(t6, t16);
  Bit t19 = X(t9, t14);
  Bit t20 = X(t11, t16);
  Bit t21 = X(t17, y20);
  Bit t22 = X(t18, y19);
  Bit t23 = X(t19, y21);
  Bit t24 = X(t20, y18);

  // GF(16) inversion
  Bit t25 = X(t21, t22);
  Bit t26 = A(t21, t23);
  Bit t27 = X(t24, t26);
  Bit t28 = A(t25, t27);
  Bit t29 = X(t28, t22);
  Bit t30 = X(t23, t24);
  Bit t31 = X(t22, t26);
  Bit t32 = A(t31, t30);
  Bit t33 = X(t32, t24);
  Bit t34 = X(t23, t33);
  Bit t35 = X(t27, t33);
  Bit t36 = A(t24, t35);
  Bit t37 = X(t36, t34);
  Bit t38 = X(t27, t36);
  Bit t39 = A(t29, t38);
  Bit t40 = X(t25, t39);

  Bit t41 = X(t40, t37);
  Bit t42 = X(t29, t33);
  Bit t43 = X(t29, t40);
  Bit t44 = X(t33, t37);
  Bit t45 = X(t42, t41);
  Bit z0 = A(t44, y15);
  Bit z1 = A(t37, y6);
  Bit z2 = A(t33, x[7]);
  Bit z3 = A(t43, y16);
  Bit z4 = A(t40, y1);
  Bit z5 = A(t29, y7);
  Bit z6 = A(t42, y11);
  Bit z7 = A(t45, y17);
  Bit z8 = A(t41, y10);
  Bit z9 = A(t44, y12);
  Bit z10 = A(t37, y3);
  Bit z11 = A(t33, y4);
  Bit z12 = A(t43, y13);
  Bit z13 = A(t40, y5);
  Bit z14 = A(t29, y2);
  Bit z15 = A(t42, y9);
  Bit z16 = A(t45, y14);
  Bit z17 = A(t41, y8);

  // bottom linear transformation
  Bit t46 = X(z15, z16);
  Bit t47 = X(z10, z11);
  Bit t48 = X(z5, z13);
  Bit t49 = X(z9, z10);
  Bit t50 = X(z2, z12);
  Bit t51 = X(z2, z5);
  Bit t52 = X(z7, z8);
  Bit t53 = X(z0, z3);
  Bit t54 = X(z6, z7);
  Bit t55 = X(z16, z17);
  Bit t56 = X(z12, t48);
  Bit t57 = X(t50, t53);
  Bit t58 = X(z4, t46);
  Bit t59 = X(z3, t54);
  Bit t60 = X(t46, t57);
  Bit t61 = X(z14, t57);
  Bit t62 = X(t52, t58);
  Bit t63 = X(t49, t58);
  Bit t64 = X(z4, t59);
  Bit t65 = X(t61, t62);
  Bit t66 = X(z1, t63);
  Bit s0 = X(t59, t63);
  Bit s6 = N(t56, t62);
  Bit s7 = N(t48, t60);
  Bit t67 = X(t64, t65);
  Bit s3 = X(t53, t66);
  Bit s4 = X(t51, t66);
  Bit s5 = X(t47, t65);
  Bit s1 = N(t64, s3);
  Bit s2 = N(t55, t67);
  return {s0, s1, s2, s3, s4, s5, s6, s7};
}

namespace {

using Byte = BitVec;  // 8 bits, MSB first

Byte byte_of(const BitVec& v, std::size_t i) { return Byte(v.begin() + 8 * i, v.begin() + 8 * i + 8); }

Byte xtime(Builder& b, const Byte& a) {
  // multiply by x modulo x^8 + x^4 + x^3 + x + 1
  Byte out(8);
  for (int i = 0; i < 7; ++i) out[i] = a[i + 1];
  out[7] = a[0];
  out[3] = b.xor_(out[3], a[0]);
  out[4] = b.xor_(out[4], a[0]);
  out[6] = b.xor_(out[6], a[0]);
  return out;
}

Byte const_byte(const Builder& b, std::uint8_t v) {
  Byte out(8);
  for (int i = 0; i < 8; ++i) out[i] = b.constant((v >> (7 - i)) & 1);
  return out;
}

using State = std::array<Byte, 16>;  // byte index = 4 * column + row

State add_round_key(Builder& b, const State& s, const std::array<Byte, 16>& rk) {
  State out;
  for (int i = 0; i < 16; ++i) out[i] = b.xor_(s[i], rk[i]);
  return out;
}

}  // namespace

Circuit make_aes128_circuit() {
  Builder b;
  auto key = b.add_input(128);
  auto msg = b.add_input(128);

  // key expansion into 44 words of 4 bytes
  std::array<std::array<Byte, 4>, 44> w;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) w[i][j] = byte_of(key, 4 * i + j);
  }
  std::uint8_t rcon = 0x01;
  for (int i = 4; i < 44; ++i) {
    std::array<Byte, 4> temp = w[i - 1];
    if (i % 4 == 0) {
      std::array<Byte, 4> rot = {temp[1], temp[2], temp[3], temp[0]};
      for (int j = 0; j < 4; ++j) temp[j] = sbox_bits(b, rot[j]);
      temp[0] = b.xor_(temp[0], const_byte(b, rcon));
      rcon = static_cast<std::uint8_t>((rcon << 1) ^ ((rcon & 0x80) ? 0x1b : 0));
    }
    for (int j = 0; j < 4; ++j) w[i][j] = b.xor_(w[i - 4][j], temp[j]);
  }
  auto round_key = [&](int r) {
    std::array<Byte, 16> rk;
    for (int c = 0; c < 4; ++c) {
      for (int j = 0; j < 4; ++j) rk[4 * c + j] = w[4 * r + c][j];
    }
    return rk;
  };

  State s;
  for (int i = 0; i < 16; ++i) s[i] = byte_of(msg, i);
  s = add_round_key(b, s, round_key(0));

  for (int round = 1; round <= 10; ++round) {
    for (auto& byte : s) byte = sbox_bits(b, byte);
    State shifted;
    for (int c = 0; c < 4; ++c) {
      for (int r = 0; r < 4; ++r) shifted[4 * c + r] = s[4 * ((c + r) % 4) + r];
    }
    s = shifted;
    if (round != 10) {
      State mixed;
      for (int c = 0; c < 4; ++c) {
        const Byte* a = &s[4 * c];
        Byte t = b.xor_(b.xor_(a[0], a[1]), b.xor_(a[2], a[3]));
        for (int r = 0; r < 4; ++r) {
          Byte x = xtime(b, b.xor_(a[r], a[(r + 1) % 4]));
          mixed[4 * c + r] = b.xor_(b.xor_(a[r], t), x);
        }
      }
      s = mixed;
    }
    s = add_round_key(b, s, round_key(round));
  }

  BitVec out;
  for (const auto& byte : s) out.insert(out.end(), byte.begin(), byte.end());
  return b.finish({out});
}

namespace {

using Word = BitVec;  // 32 bits, MSB first

constexpr std::array<std::uint32_t, 64> kRoundConstants = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
    0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
    0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
    0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
    0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
    0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
    0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
    0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
    0xc67178f2};

Word rotr(const Word& x, int n) {
  Word out(32);
  for (int i = 0; i < 32; ++i) out[i] = x[(i - n + 32) % 32];
  return out;
}

Word shr(const Builder& b, const Word& x, int n) {
  Word out(32);
  for (int i = 0; i < 32; ++i) out[i] = i < n ? b.constant(false) : x[i - n];
  return out;
}

Word add(Builder& b, const Word& x, const Word& y) {
  Word out(32);
  Bit carry = b.constant(false);
  for (int i = 31; i >= 0; --i) {
    Bit xc = b.xor_(x[i], carry);
    out[i] = b.xor_(xc, y[i]);
    if (i > 0) carry = b.xor_(carry, b.and_(xc, b.xor_(y[i], carry)));
  }
  return out;
}

Word const_word(const Builder& b, std::uint32_t v) {
  Word out(32);
  for (int i = 0; i < 32; ++i) out[i] = b.constant((v >> (31 - i)) & 1);
  return out;
}

Word xor3(Builder& b, const Word& x, const Word& y, const Word& z) {
  return b.xor_(b.xor_(x, y), z);
}

}  // namespace

Circuit make_sha256_compress_circuit() {
  Builder b;
  auto block = b.add_input(512);
  auto chain = b.add_input(256);

  std::array<Word, 64> w;
  for (int t = 0; t < 16; ++t) w[t] = Word(block.begin() + 32 * t, block.begin() + 32 * t + 32);
  for (int t = 16; t < 64; ++t) {
    Word s0 = xor3(b, rotr(w[t - 15], 7), rotr(w[t - 15], 18), shr(b, w[t - 15], 3));
    Word s1 = xor3(b, rotr(w[t - 2], 17), rotr(w[t - 2], 19), shr(b, w[t - 2], 10));
    w[t] = add(b, add(b, s1, w[t - 7]), add(b, s0, w[t - 16]));
  }

  std::array<Word, 8> h;
  for (int i = 0; i < 8; ++i) h[i] = Word(chain.begin() + 32 * i, chain.begin() + 32 * i + 32);
  auto [a, bb, c, d, e, f, g, hh] = h;

  for (int t = 0; t < 64; ++t) {
    Word big_s1 = xor3(b, rotr(e, 6), rotr(e, 11), rotr(e, 25));
    Word ch(32), maj(32);
    for (int i = 0; i < 32; ++i) {
      ch[i] = b.xor_(g[i], b.and_(e[i], b.xor_(f[i], g[i])));
      maj[i] = b.xor_(a[i], b.and_(b.xor_(a[i], bb[i]), b.xor_(a[i], c[i])));
    }
    Word t1 = add(b, add(b, hh, big_s1), add(b, ch, add(b, const_word(b, kRoundConstants[t]), w[t])));
    Word big_s0 = xor3(b, rotr(a, 2), rotr(a, 13), rotr(a, 22));
    Word t2 = add(b, big_s0, maj);
    hh = g;
    g = f;
    f = e;
    e = add(b, d, t1);
    d = c;
    c = bb;
    bb = a;
    a = add(b, t1, t2);
  }

  std::array<Word, 8> working = {a, bb, c, d, e, f, g, hh};
  BitVec out;
  for (int i = 0; i < 8; ++i) {
    Word sum = add(b, h[i], working[i]);
    out.insert(out.end(), sum.begin(), sum.end());
  }
  return b.finish({out});
}

}  // namespace qres::circuit
