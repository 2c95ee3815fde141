#include "qres/ot.hpp"

#include <cstring>

#include "qres/error.hpp"

namespace qres::ot {
namespace {

constexpr std::string_view kDomain = "qres-ot-v1";

ByteArray<16> derive_key(const group::Element& A, const group::Element& B, const group::Element& P) {
  Digest d = hash({as_bytes(kDomain), A.bytes, B.bytes, P.bytes});
  ByteArray<16> k;
  std::memcpy(k.data(), d.data(), 16);
  return k;
}

ByteArray<kSlotSize> seal(const ByteArray<16>& key, const Message& m) {
  Aes128 aes(key);
  Block ct = aes.encrypt(m.bytes);
  Block kcv = aes.encrypt(Block{});
  ByteArray<kSlotSize> out;
  std::memcpy(out.data(), ct.data(), 16);
  std::memcpy(out.data() + 16, kcv.data(), 8);
  return out;
}

std::optional<Message> unseal(const ByteArray<16>& key, const ByteArray<kSlotSize>& slot) {
  Aes128 aes(key);
  Block kcv = aes.encrypt(Block{});
  if (std::memcmp(kcv.data(), slot.data() + 16, 8) != 0) return std::nullopt;
  Block ct;
  std::memcpy(ct.data(), slot.data(), 16);
  Message m;
  m.bytes = aes.decrypt(ct);
  return m;
}

void require_valid(const group::Element& e, const char* what) {
  if (!group::is_valid(e)) fail(ErrorCode::InvalidGroupElement, what);
}

}  // namespace

std::pair<SenderState, SenderMsg> sender_setup(Rng& rng) {
  SenderState st;
  st.a = group::random_scalar(rng);
  st.A = group::base_mul(st.a);
  return {st, SenderMsg{st.A}};
}

std::pair<ReceiverState, ReceiverMsg> receiver_choose(bool b, const SenderMsg& s, Rng& rng) {
  require_valid(s.A, "sender element");
  ReceiverState st;
  st.choice = b;
  st.A = s.A;
  auto r = group::random_scalar(rng);
  group::Element rG = group::base_mul(r);
  st.B = b ? group::add(s.A, rG) : rG;
  st.key = derive_key(st.A, st.B, group::mul(s.A, r));
  return {st, ReceiverMsg{st.B}};
}

Payload sender_respond(const SenderState& st, const ReceiverMsg& r, const Message& m0,
                       const Message& m1) {
  require_valid(r.B, "receiver element");
  if (r.B == st.A) fail(ErrorCode::InvalidGroupElement, "receiver element equals sender element");
  auto k0 = derive_key(st.A, r.B, group::mul(r.B, st.a));
  auto k1 = derive_key(st.A, r.B, group::mul(group::sub(r.B, st.A), st.a));
  Payload p;
  p.slot[0] = seal(k0, m0);
  p.slot[1] = seal(k1, m1);
  return p;
}

Message receiver_finish(const ReceiverState& st, const Payload& p) {
  auto m = unseal(st.key, p.slot[st.choice ? 1 : 0]);
  if (!m) fail(ErrorCode::OtFailure, "chosen slot failed its key check");
  return *m;
}

std::optional<Message> try_open(const ReceiverState& st, const Payload& p, int slot) {
  return unseal(st.key, p.slot[slot & 1]);
}

std::vector<Message> ot_batch(std::span<const std::uint8_t> bits,
                              std::span<const garble::LabelPair> pairs, Rng& sender_rng,
                              Rng& receiver_rng, BatchTranscript* transcript) {
  if (bits.size() != pairs.size()) fail(ErrorCode::LengthMismatch, "choice bits vs label pairs");
  std::vector<Message> out;
  out.reserve(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    auto [sst, smsg] = sender_setup(sender_rng);
    auto [rst, rmsg] = receiver_choose(bits[i] != 0, smsg, receiver_rng);
    auto payload = sender_respond(sst, rmsg, pairs[i].first, pairs[i].second);
    out.push_back(receiver_finish(rst, payload));
    if (transcript) {
      transcript->sender.push_back(smsg);
      transcript->receiver.push_back(rmsg);
      transcript->payloads.push_back(payload);
    }
  }
  return out;
}

Bytes encode(const SenderMsg& m) { return {m.A.bytes.begin(), m.A.bytes.end()}; }
Bytes encode(const ReceiverMsg& m) { return {m.B.bytes.begin(), m.B.bytes.end()}; }
Bytes encode(const Payload& m) {
  Bytes out(m.slot[0].begin(), m.slot[0].end());
  append(out, m.slot[1]);
  return out;
}

}  // namespace qres::ot
