#include "qres/qese_circuit.hpp"

#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>

#include "qres/circuit_builder.hpp"
#include "qres/error.hpp"

namespace qres {

using circuit::Bit;
using circuit::BitVec;
using circuit::Bits;
using circuit::Builder;
using circuit::Circuit;

std::string_view mode_name(QeseMode mode) {
  return mode == QeseMode::Basic ? "basic" : "validated";
}

QeseMode parse_mode(std::string_view name) {
  if (name == "basic") return QeseMode::Basic;
  if (name == "validated") return QeseMode::Validated;
  fail(ErrorCode::Config, "unknown QeSe mode '" + std::string(name) + "'");
}

std::filesystem::path resource_dir() {
  if (const char* env = std::getenv("QRES_RESOURCES"); env && *env) return env;
  return QRES_RESOURCE_DIR;
}

Circuit load_resource_circuit(std::string_view filename) {
  auto path = resource_dir() / filename;
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ResourceMissing, "cannot open circuit resource " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return circuit::parse_bristol(ss.str());
}

namespace {

void append_bits(BitVec& out, const BitVec& in, std::size_t from, std::size_t n) {
  out.insert(out.end(), in.begin() + from, in.begin() + from + n);
}

void append_const_bytes(BitVec& out, const Builder& b, ByteView bytes) {
  for (auto bit : circuit::to_bits(bytes)) out.push_back(b.constant(bit));
}

Bytes length_block_tail(std::uint64_t bits) {
  Bytes out(8);
  for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(bits >> (56 - 8 * i));
  return out;
}

QeseCircuit make_basic() {
  auto aes = load_resource_circuit("aes_128.txt");
  auto digest = circuit::circuit_digest(aes);
  return {QeseMode::Basic, std::move(aes), digest};
}

QeseCircuit make_validated() {
  auto aes = load_resource_circuit("aes_128.txt");
  auto sha = load_resource_circuit("sha256_compress.txt");

  Builder b(/*fold_constants=*/false);
  auto garbler = b.add_input(128 + 256 + 256);
  auto evaluator = b.add_input(128 + 256);

  BitVec aes_in;
  append_bits(aes_in, garbler, 0, 128);
  append_bits(aes_in, evaluator, 0, 128);
  auto ciphertext = b.embed(aes, aes_in);

  // inner block: w (8 bytes) || 0x80 || 0^47 || bitlen(64 + 8)
  BitVec inner_in;
  append_bits(inner_in, evaluator, 0, 64);
  Bytes inner_pad(48, 0);
  inner_pad[0] = 0x80;
  append_const_bytes(inner_in, b, inner_pad);
  append_const_bytes(inner_in, b, length_block_tail((64 + 8) * 8));
  append_bits(inner_in, garbler, 128, 256);
  auto inner = b.embed(sha, inner_in);

  // outer block: inner digest (32 bytes) || 0x80 || 0^23 || bitlen(64 + 32)
  BitVec outer_in = inner;
  Bytes outer_pad(24, 0);
  outer_pad[0] = 0x80;
  append_const_bytes(outer_in, b, outer_pad);
  append_const_bytes(outer_in, b, length_block_tail((64 + 32) * 8));
  append_bits(outer_in, garbler, 384, 256);
  auto mac = b.embed(sha, outer_in);

  BitVec same(256);
  for (int i = 0; i < 256; ++i) same[i] = b.not_(b.xor_(mac[i], evaluator[128 + i]));
  while (same.size() > 1) {
    BitVec next;
    for (std::size_t i = 0; i + 1 < same.size(); i += 2) next.push_back(b.and_(same[i], same[i + 1]));
    if (same.size() % 2) next.push_back(same.back());
    same = std::move(next);
  }
  BitVec out(128);
  for (int i = 0; i < 128; ++i) out[i] = b.and_(ciphertext[i], same[0]);

  auto composite = b.finish({out});
  auto digest = circuit::circuit_digest(composite);
  return {QeseMode::Validated, std::move(composite), digest};
}

Bits word_bits(const std::array<std::uint32_t, 8>& words) {
  Bytes bytes;
  for (auto w : words) {
    for (int s = 24; s >= 0; s -= 8) bytes.push_back(static_cast<std::uint8_t>(w >> s));
  }
  return circuit::to_bits(bytes);
}

}  // namespace

const QeseCircuit& build_qese_circuit(QeseMode mode) {
  static std::mutex mu;
  static std::unique_ptr<QeseCircuit> basic, validated;
  std::lock_guard lock(mu);
  auto& slot = mode == QeseMode::Basic ? basic : validated;
  if (!slot) {
    slot = std::make_unique<QeseCircuit>(mode == QeseMode::Basic ? make_basic() : make_validated());
  }
  return *slot;
}

HmacMidstates hmac_midstates(const MacKey& k_val) {
  ByteArray<64> ipad{}, opad{};
  for (std::size_t i = 0; i < 64; ++i) {
    std::uint8_t kb = i < k_val.bytes.size() ? k_val.bytes[i] : 0;
    ipad[i] = kb ^ 0x36;
    opad[i] = kb ^ 0x5c;
  }
  return {sha256_midstate(ipad), sha256_midstate(opad)};
}

Bits garbler_input(QeseMode mode, const SymKey& k, const MacKey* k_val) {
  Bits bits = circuit::to_bits(k.bytes);
  if (mode == QeseMode::Validated) {
    if (!k_val) fail(ErrorCode::WidthMismatch, "validated mode needs a validation key");
    auto mids = hmac_midstates(*k_val);
    auto inner = word_bits(mids.inner);
    auto outer = word_bits(mids.outer);
    bits.insert(bits.end(), inner.begin(), inner.end());
    bits.insert(bits.end(), outer.begin(), outer.end());
  }
  return bits;
}

Bits evaluator_input(QeseMode mode, const Token& w, const Tag* tag) {
  Bits bits = circuit::to_bits(pad16(w));
  if (mode == QeseMode::Validated) {
    if (!tag) fail(ErrorCode::WidthMismatch, "validated mode needs a keyword tag");
    auto t = circuit::to_bits(*tag);
    bits.insert(bits.end(), t.begin(), t.end());
  }
  return bits;
}

}  // namespace qres
