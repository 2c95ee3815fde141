#include "qres/circuit_builder.hpp"

#include <numeric>

#include "qres/error.hpp"

namespace qres::circuit {

BitVec Builder::add_input(std::uint32_t width) {
  if (!gates_.empty()) fail(ErrorCode::FormatError, "inputs must be declared before gates");
  input_widths_.push_back(width);
  BitVec bits(width);
  for (auto& b : bits) b.v = next_wire_++;
  return bits;
}

Bit Builder::emit(GateKind kind, Bit a, Bit b) {
  Bit out{next_wire_++};
  gates_.push_back({kind, a.v, kind == GateKind::Inv ? 0 : b.v, out.v});
  return out;
}

Bit Builder::materialize(Bit b) {
  if (!b.is_const()) return b;
  if (!have_const_wires_) {
    if (next_wire_ == 0) fail(ErrorCode::FormatError, "constants need at least one input wire");
    zero_wire_ = emit(GateKind::Xor, Bit{0}, Bit{0});
    one_wire_ = emit(GateKind::Inv, zero_wire_, {});
    have_const_wires_ = true;
  }
  return b.const_value() ? one_wire_ : zero_wire_;
}

Bit Builder::xor_(Bit a, Bit b) {
  if (fold_) {
    if (a.is_const() && b.is_const()) return constant(a.const_value() != b.const_value());
    if (a.is_const()) std::swap(a, b);
    if (b.is_const()) return b.const_value() ? not_(a) : a;
    if (a == b) return constant(false);
  }
  return emit(GateKind::Xor, materialize(a), materialize(b));
}

Bit Builder::and_(Bit a, Bit b) {
  if (fold_) {
    if (a.is_const() && b.is_const()) return constant(a.const_value() && b.const_value());
    if (a.is_const()) std::swap(a, b);
    if (b.is_const()) return b.const_value() ? a : constant(false);
    if (a == b) return a;
  }
  return emit(GateKind::And, materialize(a), materialize(b));
}

Bit Builder::not_(Bit a) {
  if (fold_ && a.is_const()) return constant(!a.const_value());
  return emit(GateKind::Inv, materialize(a), {});
}

BitVec Builder::xor_(const BitVec& a, const BitVec& b) {
  if (a.size() != b.size()) fail(ErrorCode::WidthMismatch, "xor of unequal widths");
  BitVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = xor_(a[i], b[i]);
  return out;
}

BitVec Builder::embed(const Circuit& sub, std::span<const Bit> inputs) {
  if (inputs.size() != sub.num_inputs()) {
    fail(ErrorCode::WidthMismatch, "embedded circuit takes " + std::to_string(sub.num_inputs()) +
                                       " inputs, got " + std::to_string(inputs.size()));
  }
  std::vector<Bit> map(sub.num_wires());
  for (std::size_t i = 0; i < inputs.size(); ++i) map[i] = materialize(inputs[i]);
  for (const auto& g : sub.gates()) {
    map[g.out] = emit(g.kind, map[g.in0], g.kind == GateKind::Inv ? Bit{} : map[g.in1]);
  }
  return BitVec(map.begin() + sub.first_output_wire(), map.end());
}

Circuit Builder::finish(const std::vector<BitVec>& outputs) {
  const std::uint32_t num_inputs =
      std::accumulate(input_widths_.begin(), input_widths_.end(), std::uint32_t{0});

  // Outputs must be distinct gate-produced wires so they can be moved to the tail.
  std::vector<std::uint8_t> claimed(next_wire_ + 1, 0);
  std::vector<BitVec> outs = outputs;
  for (auto& group : outs) {
    for (auto& b : group) {
      b = materialize(b);
      claimed.resize(next_wire_ + 1, 0);
      if (b.v < num_inputs || claimed[b.v]) {
        b = emit(GateKind::Inv, emit(GateKind::Inv, b, {}), {});
        claimed.resize(next_wire_ + 1, 0);
      }
      claimed[b.v] = 1;
    }
  }

  std::vector<std::uint32_t> output_widths;
  std::uint32_t num_outputs = 0;
  for (const auto& group : outs) {
    output_widths.push_back(static_cast<std::uint32_t>(group.size()));
    num_outputs += static_cast<std::uint32_t>(group.size());
  }

  const std::uint32_t total = next_wire_;
  std::vector<std::uint32_t> remap(total);
  std::uint32_t out_pos = total - num_outputs;
  for (const auto& group : outs) {
    for (auto b : group) remap[b.v] = out_pos++;
  }
  std::uint32_t next = 0;
  for (std::uint32_t w = 0; w < total; ++w) {
    if (w < claimed.size() && claimed[w]) continue;
    remap[w] = next++;
  }

  std::vector<Gate> gates = gates_;
  for (auto& g : gates) {
    g.in0 = remap[g.in0];
    if (g.kind != GateKind::Inv) g.in1 = remap[g.in1];
    g.out = remap[g.out];
  }
  return Circuit(std::move(gates), total, input_widths_, std::move(output_widths));
}

}  // namespace qres::circuit
