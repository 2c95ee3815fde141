#pragma once

#include "qres/garble.hpp"

// Omniscient helpers for test harnesses that play both roles without running
// oblivious transfer. Protocol code never includes this header.
namespace qres::garble::harness {

// Consumes the encoding exactly like the OT sender would.
std::vector<WireLabel> select_evaluator_labels(InputEncoding& enc, std::span<const std::uint8_t> bits);

}  // namespace qres::garble::harness
