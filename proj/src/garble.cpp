#include "qres/garble.hpp"

#include <cstring>

#include "qres/error.hpp"
#include "qres/garble_harness.hpp"

namespace qres::garble {
namespace {

using circuit::GateKind;
using Label = ByteArray<kLabelSize>;

bool lsb(const Label& l) { return l[kLabelSize - 1] & 1; }

Label xor_labels(const Label& a, const Label& b) {
  Label out;
  for (std::size_t i = 0; i < kLabelSize; ++i) out[i] = a[i] ^ b[i];
  return out;
}

// H(A || B || gate index || session id), 52 bytes: a single compression.
void row_key(const Label& a, const Label& b, std::uint32_t gate, const SessionId& sid,
             std::uint8_t out[32]) {
  std::uint8_t buf[kLabelSize * 2 + 4 + 16];
  std::memcpy(buf, a.data(), kLabelSize);
  std::memcpy(buf + kLabelSize, b.data(), kLabelSize);
  buf[32] = static_cast<std::uint8_t>(gate >> 24);
  buf[33] = static_cast<std::uint8_t>(gate >> 16);
  buf[34] = static_cast<std::uint8_t>(gate >> 8);
  buf[35] = static_cast<std::uint8_t>(gate);
  std::memcpy(buf + 36, sid.data(), sid.size());
  Digest d = hash(ByteView(buf, sizeof buf));
  std::memcpy(out, d.data(), d.size());
}

ByteArray<8> label_check(const Label& l) {
  Digest d = hash(l);
  ByteArray<8> out;
  std::memcpy(out.data(), d.data(), 8);
  return out;
}

bool has_table(GateKind kind, bool free_xor) {
  return kind == GateKind::And || (kind == GateKind::Xor && !free_xor);
}

std::size_t expected_table_size(const circuit::Circuit& c, bool free_xor) {
  std::size_t n = c.count(GateKind::And);
  if (!free_xor) n += c.count(GateKind::Xor);
  return n * kRowsPerGate * kRowSize;
}

}  // namespace

Bytes GarbledCircuit::serialize() const {
  Writer w;
  w.u8(kGarbledCircuitVersion);
  w.raw(circuit_digest);
  w.u32(gate_count);
  w.raw(session_id);
  w.u8(free_xor ? 1 : 0);
  w.blob(tables);
  return std::move(w).take();
}

GarbledCircuit GarbledCircuit::deserialize(ByteView raw) {
  Reader r(raw);
  if (r.u8() != kGarbledCircuitVersion) fail(ErrorCode::VersionMismatch, "garbled circuit version");
  GarbledCircuit gc;
  gc.circuit_digest = r.fixed<32>();
  gc.gate_count = r.u32();
  gc.session_id = r.fixed<16>();
  gc.free_xor = r.u8() != 0;
  gc.tables = r.blob();
  r.expect_done();
  return gc;
}

Bytes OutputDecoding::serialize() const {
  Writer w;
  w.u32(static_cast<std::uint32_t>(entries.size()));
  for (const auto& e : entries) {
    w.raw(e.check0);
    w.raw(e.check1);
  }
  return std::move(w).take();
}

OutputDecoding OutputDecoding::deserialize(ByteView raw) {
  Reader r(raw);
  OutputDecoding dec;
  std::uint32_t n = r.u32();
  if (n > r.remaining() / 16) fail(ErrorCode::Truncated, "output decoding");
  dec.entries.resize(n);
  for (auto& e : dec.entries) {
    e.check0 = r.fixed<8>();
    e.check1 = r.fixed<8>();
  }
  r.expect_done();
  return dec;
}

std::vector<WireLabel> InputEncoding::encode_garbler(std::span<const std::uint8_t> bits) const {
  if (bits.size() != garbler_bits_) fail(ErrorCode::WidthMismatch, "garbler input width");
  std::vector<WireLabel> out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i)
    out[i] = bits[i] ? pairs_[i].second : pairs_[i].first;
  return out;
}

std::vector<LabelPair> InputEncoding::take_evaluator_pairs() {
  if (consumed_) fail(ErrorCode::EncodingConsumed, "evaluator encoding already issued");
  consumed_ = true;
  return {pairs_.begin() + garbler_bits_, pairs_.end()};
}

GarbleResult garble(const circuit::Circuit& c, Rng& rng, GarbleOptions options) {
  const std::uint32_t nw = c.num_wires();
  std::vector<Label> zero(nw), one(nw);

  GarbleResult res;
  res.gc.session_id = rng.bytes<16>();
  res.gc.circuit_digest = circuit_digest(c);
  res.gc.gate_count = static_cast<std::uint32_t>(c.gates().size());
  res.gc.free_xor = options.free_xor;

  Label delta{};
  if (options.free_xor) {
    rng.fill(delta);
    delta[kLabelSize - 1] |= 1;
  }
  auto fresh = [&](circuit::WireId w) {
    rng.fill(zero[w]);
    if (options.free_xor) {
      one[w] = xor_labels(zero[w], delta);
    } else {
      rng.fill(one[w]);
      one[w][kLabelSize - 1] = (one[w][kLabelSize - 1] & 0xfe) | (lsb(zero[w]) ? 0 : 1);
    }
  };

  for (circuit::WireId w = 0; w < c.num_inputs(); ++w) fresh(w);

  res.gc.tables.resize(expected_table_size(c, options.free_xor));
  std::uint8_t* table = res.gc.tables.data();
  std::uint8_t key[32];

  const auto& gates = c.gates();
  for (std::uint32_t g = 0; g < gates.size(); ++g) {
    const auto& gate = gates[g];
    if (gate.kind == GateKind::Inv) {
      zero[gate.out] = one[gate.in0];
      one[gate.out] = zero[gate.in0];
      continue;
    }
    if (!has_table(gate.kind, options.free_xor)) {
      zero[gate.out] = xor_labels(zero[gate.in0], zero[gate.in1]);
      one[gate.out] = xor_labels(zero[gate.out], delta);
      continue;
    }
    fresh(gate.out);
    const Label* la[2] = {&zero[gate.in0], &one[gate.in0]};
    const Label* lb[2] = {&zero[gate.in1], &one[gate.in1]};
    const Label* lo[2] = {&zero[gate.out], &one[gate.out]};
    const bool pa0 = lsb(zero[gate.in0]);
    const bool pb0 = lsb(zero[gate.in1]);
    for (int pa = 0; pa < 2; ++pa) {
      for (int pb = 0; pb < 2; ++pb) {
        const int va = pa ^ pa0;
        const int vb = pb ^ pb0;
        const int v = gate.kind == GateKind::And ? (va & vb) : (va ^ vb);
        row_key(*la[va], *lb[vb], g, res.gc.session_id, key);
        std::uint8_t* row = table + (2 * pa + pb) * kRowSize;
        for (std::size_t i = 0; i < kLabelSize; ++i) row[i] = key[i] ^ (*lo[v])[i];
        for (std::size_t i = kLabelSize; i < kRowSize; ++i) row[i] = key[i];
      }
    }
    table += kRowsPerGate * kRowSize;
  }

  std::vector<LabelPair> pairs(c.num_inputs());
  for (circuit::WireId w = 0; w < c.num_inputs(); ++w) {
    pairs[w].first.bytes = zero[w];
    pairs[w].second.bytes = one[w];
  }
  res.encoding = InputEncoding(std::move(pairs), c.input_widths()[0]);

  res.decoding.entries.resize(c.num_outputs());
  for (std::uint32_t i = 0; i < c.num_outputs(); ++i) {
    circuit::WireId w = c.first_output_wire() + i;
    res.decoding.entries[i] = {label_check(zero[w]), label_check(one[w])};
  }
  return res;
}

std::vector<WireLabel> evaluate_garbled(const circuit::Circuit& c, const GarbledCircuit& gc,
                                        std::span<const WireLabel> input_labels) {
  if (input_labels.size() != c.num_inputs()) fail(ErrorCode::WidthMismatch, "input label count");
  if (gc.gate_count != c.gates().size() || gc.tables.size() != expected_table_size(c, gc.free_xor))
    fail(ErrorCode::CorruptTable, "garbled table size does not match circuit");

  std::vector<Label> val(c.num_wires());
  for (std::size_t i = 0; i < input_labels.size(); ++i) val[i] = input_labels[i].bytes;

  const std::uint8_t* table = gc.tables.data();
  std::uint8_t key[32];
  const auto& gates = c.gates();
  for (std::uint32_t g = 0; g < gates.size(); ++g) {
    const auto& gate = gates[g];
    if (gate.kind == GateKind::Inv) {
      val[gate.out] = val[gate.in0];
      continue;
    }
    if (!has_table(gate.kind, gc.free_xor)) {
      val[gate.out] = xor_labels(val[gate.in0], val[gate.in1]);
      continue;
    }
    const Label& a = val[gate.in0];
    const Label& b = val[gate.in1];
    const std::uint8_t* row = table + (2 * lsb(a) + lsb(b)) * kRowSize;
    row_key(a, b, g, gc.session_id, key);
    Label& out = val[gate.out];
    for (std::size_t i = 0; i < kLabelSize; ++i) out[i] = row[i] ^ key[i];
    std::uint8_t pad = 0;
    for (std::size_t i = kLabelSize; i < kRowSize; ++i) pad |= row[i] ^ key[i];
    if (pad != 0) fail(ErrorCode::CorruptTable, "row failed to decrypt at gate " + std::to_string(g));
    table += kRowsPerGate * kRowSize;
  }

  std::vector<WireLabel> out(c.num_outputs());
  for (std::uint32_t i = 0; i < c.num_outputs(); ++i) out[i].bytes = val[c.first_output_wire() + i];
  return out;
}

circuit::Bits decode_output(const OutputDecoding& dec, std::span<const WireLabel> output_labels) {
  if (output_labels.size() != dec.entries.size()) fail(ErrorCode::WidthMismatch, "output label count");
  circuit::Bits bits(output_labels.size());
  for (std::size_t i = 0; i < output_labels.size(); ++i) {
    auto chk = label_check(output_labels[i].bytes);
    if (chk == dec.entries[i].check0) {
      bits[i] = 0;
    } else if (chk == dec.entries[i].check1) {
      bits[i] = 1;
    } else {
      fail(ErrorCode::CorruptTable, "output label " + std::to_string(i) + " is not a valid label");
    }
  }
  return bits;
}

std::vector<WireLabel> encode_input(const InputEncoding& enc, std::span<const std::uint8_t> bits,
                                    Party party) {
  if (party == Party::Evaluator)
    fail(ErrorCode::ProtocolError, "evaluator labels are only obtainable through oblivious transfer");
  return enc.encode_garbler(bits);
}

namespace harness {

std::vector<WireLabel> select_evaluator_labels(InputEncoding& enc, std::span<const std::uint8_t> bits) {
  if (bits.size() != enc.evaluator_bits()) fail(ErrorCode::WidthMismatch, "evaluator input width");
  auto pairs = enc.take_evaluator_pairs();
  std::vector<WireLabel> out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) out[i] = bits[i] ? pairs[i].second : pairs[i].first;
  return out;
}

}  // namespace harness
}  // namespace qres::garble
