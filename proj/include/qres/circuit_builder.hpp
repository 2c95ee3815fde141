#pragma once

#include <span>
#include <vector>

#include "qres/circuit.hpp"

namespace qres::circuit {

// A bit is either a wire or a compile-time constant.
struct Bit {
  static constexpr std::uint32_t kZero = 0xfffffffe;
  static constexpr std::uint32_t kOne = 0xffffffff;
  std::uint32_t v = kZero;

  bool is_const() const { return v >= kZero; }
  bool const_value() const { return v == kOne; }
  friend bool operator==(Bit, Bit) = default;
};

using BitVec = std::vector<Bit>;

// Gate-level circuit builder. With folding enabled, operations on constants
// are simplified away; without it every call emits exactly one gate and
// constants are realised as wires (two gates, emitted once).
class Builder {
 public:
  explicit Builder(bool fold_constants = true) : fold_(fold_constants) {}

  // Input groups must all be declared before the first gate.
  BitVec add_input(std::uint32_t width);

  Bit xor_(Bit a, Bit b);
  Bit and_(Bit a, Bit b);
  Bit not_(Bit a);
  Bit xnor_(Bit a, Bit b) { return not_(xor_(a, b)); }
  Bit or_(Bit a, Bit b) { return xor_(xor_(a, b), and_(a, b)); }
  Bit constant(bool v) const { return Bit{v ? Bit::kOne : Bit::kZero}; }

  BitVec xor_(const BitVec& a, const BitVec& b);

  // Copies `sub` gate for gate, wiring its inputs to `inputs`.
  BitVec embed(const Circuit& sub, std::span<const Bit> inputs);

  std::size_t gate_count() const { return gates_.size(); }

  // Output groups in order; the result places them on the last wires.
  Circuit finish(const std::vector<BitVec>& outputs);

 private:
  Bit emit(GateKind kind, Bit a, Bit b);
  Bit materialize(Bit b);

  bool fold_;
  std::vector<std::uint32_t> input_widths_;
  std::uint32_t next_wire_ = 0;
  std::vector<Gate> gates_;
  Bit zero_wire_{}, one_wire_{};
  bool have_const_wires_ = false;
};

}  // namespace qres::circuit
