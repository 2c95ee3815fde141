#pragma once

#include <optional>

#include "qres/garble.hpp"
#include "qres/group.hpp"

// 1-out-of-2 oblivious transfer over ristretto255, one instance per bit,
// fresh group randomness every time.
//
//   sender:   A = aG
//   receiver: B = rG (b = 0) or A + rG (b = 1); key k_b = H(A, B, rA)
//   sender:   k0 = H(A, B, aB), k1 = H(A, B, a(B - A)); each slot is
//             AES_k(m) || AES_k(0)[0..8]
namespace qres::ot {

using Message = garble::WireLabel;
inline constexpr std::size_t kSlotSize = 24;

struct SenderMsg {
  group::Element A;
};
struct ReceiverMsg {
  group::Element B;
};
struct Payload {
  ByteArray<kSlotSize> slot[2];
};

struct SenderState {
  group::Scalar a;
  group::Element A;
};
struct ReceiverState {
  bool choice = false;
  group::Element A;
  group::Element B;
  ByteArray<16> key{};
};

std::pair<SenderState, SenderMsg> sender_setup(Rng& rng);
// InvalidGroupElement when A is not a valid element.
std::pair<ReceiverState, ReceiverMsg> receiver_choose(bool b, const SenderMsg& s, Rng& rng);
// InvalidGroupElement when B is not a valid element or B == A.
Payload sender_respond(const SenderState& st, const ReceiverMsg& r, const Message& m0,
                       const Message& m1);
// OtFailure when the chosen slot fails its key check.
Message receiver_finish(const ReceiverState& st, const Payload& p);

// Attempts to open `slot` with the receiver's key; used to show the other
// slot stays closed.
std::optional<Message> try_open(const ReceiverState& st, const Payload& p, int slot);

struct BatchTranscript {
  std::vector<SenderMsg> sender;
  std::vector<ReceiverMsg> receiver;
  std::vector<Payload> payloads;
};

// Runs both roles in-process for each bit. LengthMismatch when the bit and
// pair counts differ.
std::vector<Message> ot_batch(std::span<const std::uint8_t> bits,
                              std::span<const garble::LabelPair> pairs, Rng& sender_rng,
                              Rng& receiver_rng, BatchTranscript* transcript = nullptr);

Bytes encode(const SenderMsg& m);
Bytes encode(const ReceiverMsg& m);
Bytes encode(const Payload& m);

}  // namespace qres::ot
