#include "qres/circuit.hpp"

#include <cctype>
#include <charconv>
#include <numeric>
#include <sstream>

#include "qres/error.hpp"

namespace qres::circuit {

Circuit::Circuit(std::vector<Gate> gates, std::uint32_t num_wires,
                 std::vector<std::uint32_t> input_widths, std::vector<std::uint32_t> output_widths)
    : gates_(std::move(gates)),
      num_wires_(num_wires),
      input_widths_(std::move(input_widths)),
      output_widths_(std::move(output_widths)) {
  num_inputs_ = std::accumulate(input_widths_.begin(), input_widths_.end(), std::uint32_t{0});
  num_outputs_ = std::accumulate(output_widths_.begin(), output_widths_.end(), std::uint32_t{0});
  if (num_inputs_ > num_wires_) {
    fail(ErrorCode::FormatError, "more inputs than wires");
  }
  if (num_outputs_ > num_wires_) fail(ErrorCode::FormatError, "more outputs than wires");

  std::vector<std::uint8_t> defined(num_wires_, 0);
  std::fill(defined.begin(), defined.begin() + num_inputs_, 1);
  auto check_in = [&](WireId w, std::size_t g) {
    if (w >= num_wires_) {
      fail(ErrorCode::FormatError, "gate " + std::to_string(g) + " reads wire " +
                                       std::to_string(w) + " outside [0, " +
                                       std::to_string(num_wires_) + ")");
    }
    if (!defined[w]) {
      fail(ErrorCode::NonTopological,
           "gate " + std::to_string(g) + " reads wire " + std::to_string(w) + " before it is set");
    }
  };
  for (std::size_t g = 0; g < gates_.size(); ++g) {
    const auto& gate = gates_[g];
    check_in(gate.in0, g);
    if (gate.kind != GateKind::Inv) check_in(gate.in1, g);
    if (gate.out >= num_wires_) {
      fail(ErrorCode::FormatError, "gate " + std::to_string(g) + " writes wire " +
                                       std::to_string(gate.out) + " out of range");
    }
    if (defined[gate.out]) {
      fail(ErrorCode::NonTopological, "wire " + std::to_string(gate.out) + " assigned twice");
    }
    defined[gate.out] = 1;
  }
  for (WireId w = first_output_wire(); w < num_wires_; ++w) {
    if (!defined[w]) fail(ErrorCode::FormatError, "output wire " + std::to_string(w) + " never set");
  }
}

std::size_t Circuit::count(GateKind kind) const {
  std::size_t n = 0;
  for (const auto& g : gates_) n += g.kind == kind;
  return n;
}

namespace {

class LineTokens {
 public:
  explicit LineTokens(std::string_view text) : text_(text) {}

  bool next_line() {
    while (pos_ < text_.size()) {
      auto end = text_.find('\n', pos_);
      if (end == std::string_view::npos) end = text_.size();
      line_ = text_.substr(pos_, end - pos_);
      pos_ = end + 1;
      ++line_no_;
      split();
      if (!tokens_.empty()) return true;
    }
    return false;
  }

  const std::vector<std::string_view>& tokens() const { return tokens_; }
  std::size_t line_no() const { return line_no_; }

  std::uint32_t number(std::size_t i) const {
    if (i >= tokens_.size()) error("missing field");
    std::uint32_t v = 0;
    auto tok = tokens_[i];
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size()) {
      error("expected a non-negative integer, got '" + std::string(tok) + "'");
    }
    return v;
  }

  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorCode::FormatError, "line " + std::to_string(line_no_) + ": " + what);
  }

 private:
  void split() {
    tokens_.clear();
    std::size_t i = 0;
    while (i < line_.size()) {
      while (i < line_.size() && std::isspace(static_cast<unsigned char>(line_[i]))) ++i;
      std::size_t start = i;
      while (i < line_.size() && !std::isspace(static_cast<unsigned char>(line_[i]))) ++i;
      if (i > start) tokens_.push_back(line_.substr(start, i - start));
    }
  }

  std::string_view text_;
  std::string_view line_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
  std::vector<std::string_view> tokens_;
};

std::vector<std::uint32_t> read_widths(LineTokens& lt) {
  if (!lt.next_line()) lt.error("unexpected end of header");
  auto n = lt.number(0);
  if (lt.tokens().size() != n + 1) lt.error("width list length does not match its count");
  std::vector<std::uint32_t> widths(n);
  for (std::uint32_t i = 0; i < n; ++i) widths[i] = lt.number(i + 1);
  return widths;
}

}  // namespace

Circuit parse_bristol(std::string_view text) {
  LineTokens lt(text);
  if (!lt.next_line()) fail(ErrorCode::FormatError, "empty circuit file");
  if (lt.tokens().size() != 2) lt.error("header must be '<gates> <wires>'");
  const auto num_gates = lt.number(0);
  const auto num_wires = lt.number(1);
  auto inputs = read_widths(lt);
  auto outputs = read_widths(lt);

  std::vector<Gate> gates;
  gates.reserve(num_gates);
  while (lt.next_line()) {
    const auto& t = lt.tokens();
    const auto& kind = t.back();
    auto n_in = lt.number(0);
    auto n_out = lt.number(1);
    if (kind != "AND" && kind != "XOR" && kind != "INV" && kind != "NOT") {
      fail(ErrorCode::UnsupportedGateKind,
           "line " + std::to_string(lt.line_no()) + ": gate kind '" + std::string(kind) + "'");
    }
    if (n_out != 1 || t.size() != n_in + n_out + 3) lt.error("malformed gate line");
    Gate g{};
    if (kind == "AND" || kind == "XOR") {
      if (n_in != 2) lt.error("binary gate needs 2 inputs");
      g = {kind == "AND" ? GateKind::And : GateKind::Xor, lt.number(2), lt.number(3), lt.number(4)};
    } else {
      if (n_in != 1) lt.error("INV gate needs 1 input");
      g = {GateKind::Inv, lt.number(2), 0, lt.number(3)};
    }
    gates.push_back(g);
  }
  if (gates.size() != num_gates) {
    fail(ErrorCode::FormatError, "header declares " + std::to_string(num_gates) + " gates, found " +
                                     std::to_string(gates.size()));
  }
  return Circuit(std::move(gates), num_wires, std::move(inputs), std::move(outputs));
}

std::string to_bristol(const Circuit& c) {
  std::string out;
  out.reserve(c.gates().size() * 20 + 64);
  auto widths = [&](const std::vector<std::uint32_t>& w) {
    out += std::to_string(w.size());
    for (auto x : w) out += ' ' + std::to_string(x);
    out += '\n';
  };
  out += std::to_string(c.gates().size()) + ' ' + std::to_string(c.num_wires()) + '\n';
  widths(c.input_widths());
  widths(c.output_widths());
  out += '\n';
  for (const auto& g : c.gates()) {
    switch (g.kind) {
      case GateKind::And:
      case GateKind::Xor:
        out += "2 1 " + std::to_string(g.in0) + ' ' + std::to_string(g.in1) + ' ' +
               std::to_string(g.out) + (g.kind == GateKind::And ? " AND\n" : " XOR\n");
        break;
      case GateKind::Inv:
        out += "1 1 " + std::to_string(g.in0) + ' ' + std::to_string(g.out) + " INV\n";
        break;
    }
  }
  return out;
}

Digest circuit_digest(const Circuit& c) { return hash(as_bytes(to_bristol(c))); }

Bits eval_plain(const Circuit& c, std::span<const std::uint8_t> inputs) {
  if (inputs.size() != c.num_inputs()) {
    fail(ErrorCode::WidthMismatch, "circuit takes " + std::to_string(c.num_inputs()) +
                                       " input bits, got " + std::to_string(inputs.size()));
  }
  Bits wires(c.num_wires(), 0);
  for (std::size_t i = 0; i < inputs.size(); ++i) wires[i] = inputs[i] & 1;
  for (const auto& g : c.gates()) {
    switch (g.kind) {
      case GateKind::And: wires[g.out] = wires[g.in0] & wires[g.in1]; break;
      case GateKind::Xor: wires[g.out] = wires[g.in0] ^ wires[g.in1]; break;
      case GateKind::Inv: wires[g.out] = wires[g.in0] ^ 1; break;
    }
  }
  return Bits(wires.begin() + c.first_output_wire(), wires.end());
}

Bits to_bits(ByteView bytes) {
  Bits bits(bytes.size() * 8);
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = (bytes[i / 8] >> (7 - i % 8)) & 1;
  return bits;
}

Bytes from_bits(std::span<const std::uint8_t> bits) {
  Bytes out((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] & 1) out[i / 8] |= static_cast<std::uint8_t>(1u << (7 - i % 8));
  }
  return out;
}

}  // namespace qres::circuit
