#include "qres/qese.hpp"

#include <algorithm>

#include "qres/error.hpp"

namespace qres::qese {

using net::Frame;
using wire::FrameType;

namespace {

void check_count(std::uint32_t n, const Reader& r, std::size_t each, const char* what) {
  if (static_cast<std::size_t>(n) * each > r.remaining()) fail(ErrorCode::Truncated, what);
}

circuit::Bits evaluator_bits_bytes(QeseMode mode, const KeywordInput& kw) {
  return evaluator_input(mode, kw.w, kw.tag ? &*kw.tag : nullptr);
}

}  // namespace

Bytes KeywordBegin::encode() const {
  Writer w;
  w.u32(seq);
  w.u8(static_cast<std::uint8_t>(mode));
  w.u8(cac_copies);
  return std::move(w).take();
}

KeywordBegin KeywordBegin::decode(ByteView raw) {
  Reader r(raw);
  KeywordBegin k;
  k.seq = r.u32();
  std::uint8_t m = r.u8();
  if (m != 1 && m != 2) fail(ErrorCode::ProtocolError, "unknown QeSe mode");
  k.mode = static_cast<QeseMode>(m);
  k.cac_copies = r.u8();
  r.expect_done();
  return k;
}

Bytes GarbledCircuitMsg::encode() const {
  Writer w;
  w.blob(gc.serialize());
  w.u32(static_cast<std::uint32_t>(garbler_labels.size()));
  for (const auto& l : garbler_labels) w.raw(l.bytes);
  w.blob(decoding.serialize());
  return std::move(w).take();
}

GarbledCircuitMsg GarbledCircuitMsg::decode(ByteView raw) {
  Reader r(raw);
  GarbledCircuitMsg m;
  m.gc = garble::GarbledCircuit::deserialize(r.blob());
  std::uint32_t n = r.u32();
  check_count(n, r, garble::kLabelSize, "garbler labels");
  m.garbler_labels.resize(n);
  for (auto& l : m.garbler_labels) l.bytes = r.fixed<garble::kLabelSize>();
  m.decoding = garble::OutputDecoding::deserialize(r.blob());
  r.expect_done();
  return m;
}

Bytes encode_ot_sender(std::span<const ot::SenderMsg> msgs) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(msgs.size()));
  for (const auto& m : msgs) w.raw(m.A.bytes);
  return std::move(w).take();
}

std::vector<ot::SenderMsg> decode_ot_sender(ByteView raw) {
  Reader r(raw);
  std::uint32_t n = r.u32();
  check_count(n, r, 32, "OT sender elements");
  std::vector<ot::SenderMsg> out(n);
  for (auto& m : out) m.A.bytes = r.fixed<32>();
  r.expect_done();
  return out;
}

Bytes encode_ot_receiver(std::span<const ot::ReceiverMsg> msgs) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(msgs.size()));
  for (const auto& m : msgs) w.raw(m.B.bytes);
  return std::move(w).take();
}

std::vector<ot::ReceiverMsg> decode_ot_receiver(ByteView raw) {
  Reader r(raw);
  std::uint32_t n = r.u32();
  check_count(n, r, 32, "OT receiver elements");
  std::vector<ot::ReceiverMsg> out(n);
  for (auto& m : out) m.B.bytes = r.fixed<32>();
  r.expect_done();
  return out;
}

Bytes OtPayloadMsg::encode() const {
  Writer w;
  w.raw(echo);
  w.u32(static_cast<std::uint32_t>(payloads.size()));
  for (const auto& p : payloads) {
    w.raw(p.slot[0]);
    w.raw(p.slot[1]);
  }
  return std::move(w).take();
}

OtPayloadMsg OtPayloadMsg::decode(ByteView raw) {
  Reader r(raw);
  OtPayloadMsg m;
  m.echo = r.fixed<32>();
  std::uint32_t n = r.u32();
  check_count(n, r, 2 * ot::kSlotSize, "OT payloads");
  m.payloads.resize(n);
  for (auto& p : m.payloads) {
    p.slot[0] = r.fixed<ot::kSlotSize>();
    p.slot[1] = r.fixed<ot::kSlotSize>();
  }
  r.expect_done();
  return m;
}

Bytes encode_reveal_set(std::span<const std::uint32_t> reveal) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(reveal.size()));
  for (auto i : reveal) w.u32(i);
  return std::move(w).take();
}

std::vector<std::uint32_t> decode_reveal_set(ByteView raw) {
  Reader r(raw);
  std::uint32_t n = r.u32();
  check_count(n, r, 4, "reveal set");
  std::vector<std::uint32_t> out(n);
  for (auto& i : out) i = r.u32();
  r.expect_done();
  return out;
}

ProviderSession::ProviderSession(SymKey k, std::optional<MacKey> k_val) : k_(k), k_val_(k_val) {}

GarbledCircuitMsg ProviderSession::begin_keyword(QeseMode mode, Rng& rng) {
  if (active_) fail(ErrorCode::SessionInProgress, "previous keyword session still open");
  if (mode == QeseMode::Validated && !k_val_) fail(ErrorCode::ProtocolError, "no validation key loaded");
  const auto& qc = build_qese_circuit(mode);
  auto gbits = garbler_input(mode, k_, k_val_ ? &*k_val_ : nullptr);
  plain_ = garble::garble(qc.circuit, rng);
  cac_.reset();
  mode_ = mode;
  active_ = true;
  ot_states_.clear();
  return {plain_->gc, plain_->encoding.encode_garbler(gbits), plain_->decoding};
}

garble::CutAndChoosePack ProviderSession::begin_keyword_cac(QeseMode mode, std::size_t copies, Rng& rng) {
  if (active_) fail(ErrorCode::SessionInProgress, "previous keyword session still open");
  if (mode == QeseMode::Validated && !k_val_) fail(ErrorCode::ProtocolError, "no validation key loaded");
  const auto& qc = build_qese_circuit(mode);
  auto gbits = garbler_input(mode, k_, k_val_ ? &*k_val_ : nullptr);
  plain_.reset();
  cac_.emplace(qc.circuit, gbits, copies, rng);
  mode_ = mode;
  active_ = true;
  ot_states_.clear();
  return cac_->pack();
}

garble::CacOpening ProviderSession::cac_open(std::span<const std::uint32_t> reveal) {
  if (!active_ || !cac_) fail(ErrorCode::ProtocolError, "no cut-and-choose session open");
  return cac_->open(reveal);
}

garble::InputEncoding& ProviderSession::encoding() {
  if (!active_) fail(ErrorCode::ProtocolError, "no keyword session open");
  if (plain_) return plain_->encoding;
  return cac_->evaluated_encoding();
}

std::vector<ot::SenderMsg> ProviderSession::ot_setup(Rng& rng) {
  if (!active_) fail(ErrorCode::ProtocolError, "no keyword session open");
  const auto& qc = build_qese_circuit(mode_);
  ot_states_.clear();
  std::vector<ot::SenderMsg> out;
  for (std::uint32_t i = 0; i < qc.evaluator_bits(); ++i) {
    auto [st, msg] = ot::sender_setup(rng);
    ot_states_.push_back(st);
    out.push_back(msg);
  }
  return out;
}

OtPayloadMsg ProviderSession::ot_respond(ByteView receiver_payload) {
  auto& enc = encoding();
  auto msgs = decode_ot_receiver(receiver_payload);
  if (msgs.size() != ot_states_.size()) fail(ErrorCode::LengthMismatch, "OT receiver count");
  auto pairs = enc.take_evaluator_pairs();
  OtPayloadMsg out;
  out.echo = hash(receiver_payload);
  for (std::size_t i = 0; i < msgs.size(); ++i)
    out.payloads.push_back(ot::sender_respond(ot_states_[i], msgs[i], pairs[i].first, pairs[i].second));
  return out;
}

void ProviderSession::end_keyword() {
  active_ = false;
  plain_.reset();
  cac_.reset();
  ot_states_.clear();
}

void ProviderSession::handle(const Frame& f, net::Channel& ch, Rng& rng) {
  try {
    switch (f.type) {
      case FrameType::KeywordBegin: {
        auto kb = KeywordBegin::decode(f.payload);
        if (kb.cac_copies >= 2) {
          auto pack = begin_keyword_cac(kb.mode, kb.cac_copies, rng);
          ch.send({FrameType::CacPack, pack.serialize()});
        } else {
          auto msg = begin_keyword(kb.mode, rng);
          ch.send({FrameType::GarbledCircuit, msg.encode()});
        }
        ch.send({FrameType::OtSender, encode_ot_sender(ot_setup(rng))});
        return;
      }
      case FrameType::CacChallenge:
        ch.send({FrameType::CacOpening, cac_open(decode_reveal_set(f.payload)).serialize()});
        return;
      case FrameType::OtReceiver:
        ch.send({FrameType::OtPayload, ot_respond(f.payload).encode()});
        return;
      case FrameType::KeywordDone:
      case FrameType::SessionAbort:
        end_keyword();
        return;
      default:
        fail(ErrorCode::ProtocolError, "unexpected " + std::string(wire::frame_type_name(f.type)));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ChannelClosed) throw;
    if (e.code() != ErrorCode::SessionInProgress && e.code() != ErrorCode::EncodingConsumed) end_keyword();
    ch.send(wire::error_frame(e));
  }
}

void ProviderSession::serve(net::Channel& ch, Rng& rng) {
  try {
    for (;;) handle(ch.recv(), ch, rng);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ChannelClosed) throw;
  }
  end_keyword();
}

EncryptedToken broker_run_keyword(net::Channel& ch, std::uint32_t seq, const KeywordInput& kw,
                                  const BrokerOptions& opt, Rng& rng) {
  const auto& qc = build_qese_circuit(opt.mode);
  if (opt.mode == QeseMode::Validated && !kw.tag) fail(ErrorCode::ProtocolError, "Validated mode needs a keyword tag");
  const bool use_cac = opt.cac_copies >= 2;
  ch.send({FrameType::KeywordBegin,
           KeywordBegin{seq, opt.mode, static_cast<std::uint8_t>(use_cac ? opt.cac_copies : 0)}.encode()});

  garble::GarbledCircuit gc;
  std::vector<garble::WireLabel> labels;
  garble::OutputDecoding decoding;
  std::vector<ot::SenderMsg> sender;
  if (use_cac) {
    auto pack = garble::CutAndChoosePack::deserialize(ch.recv_expect(FrameType::CacPack).payload);
    if (pack.copies.size() != opt.cac_copies) fail(ErrorCode::ProtocolError, "cut-and-choose copy count");
    sender = decode_ot_sender(ch.recv_expect(FrameType::OtSender).payload);
    auto reveal = garble::cac_choose(opt.cac_copies, rng);
    ch.send({FrameType::CacChallenge, encode_reveal_set(reveal)});
    auto opening = garble::CacOpening::deserialize(ch.recv_expect(FrameType::CacOpening).payload);
    if (!garble::cac_verify(qc.circuit, pack, reveal, opening))
      fail(ErrorCode::ProtocolError, "cut-and-choose verification failed");
    gc = std::move(pack.copies[opening.evaluated].gc);
    labels = std::move(opening.garbler_labels);
    decoding = std::move(opening.decoding);
  } else {
    auto gcm = GarbledCircuitMsg::decode(ch.recv_expect(FrameType::GarbledCircuit).payload);
    sender = decode_ot_sender(ch.recv_expect(FrameType::OtSender).payload);
    gc = std::move(gcm.gc);
    labels = std::move(gcm.garbler_labels);
    decoding = std::move(gcm.decoding);
  }
  if (gc.circuit_digest != qc.digest) fail(ErrorCode::ProtocolError, "garbled circuit is for a different circuit");
  if (labels.size() != qc.garbler_bits()) fail(ErrorCode::ProtocolError, "garbler label count");

  auto bits = evaluator_bits_bytes(opt.mode, kw);
  if (sender.size() != bits.size()) fail(ErrorCode::LengthMismatch, "OT sender count");
  std::vector<ot::ReceiverState> states;
  std::vector<ot::ReceiverMsg> choices;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    auto [st, msg] = ot::receiver_choose(bits[i] != 0, sender[i], rng);
    states.push_back(st);
    choices.push_back(msg);
  }
  Bytes choice_payload = encode_ot_receiver(choices);
  const Digest commitment = hash(choice_payload);
  ch.send({FrameType::OtReceiver, std::move(choice_payload)});

  auto payload = OtPayloadMsg::decode(ch.recv_expect(FrameType::OtPayload).payload);
  if (payload.echo != commitment) fail(ErrorCode::ProtocolError, "OT payload answers a different choice message");
  if (payload.payloads.size() != states.size()) fail(ErrorCode::LengthMismatch, "OT payload count");
  for (std::size_t i = 0; i < states.size(); ++i) labels.push_back(ot::receiver_finish(states[i], payload.payloads[i]));

  auto out_bits = garble::decode_output(decoding, garble::evaluate_garbled(qc.circuit, gc, labels));
  ch.send({FrameType::KeywordDone, Writer{}.bytes()});
  auto c = encrypted_token_from_bytes(circuit::from_bits(out_bits));
  if (opt.mode == QeseMode::Validated && is_bottom(c)) fail(ErrorCode::ValidationRejected, "keyword tag rejected by the circuit");
  return c;
}

std::optional<std::uint32_t> search_index(const EncryptedToken& cw, std::span<const EncryptedToken> tokens) {
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (tokens[i] == cw) return static_cast<std::uint32_t>(i);
  return std::nullopt;
}

}  // namespace qres::qese

namespace qres::qese {

MatchList qese_match_provider(net::Channel& ch, std::span<const KeywordInput> keywords,
                              std::span<const EncryptedToken> tokens, const BrokerOptions& opt, Rng& rng) {
  MatchList ml;
  for (std::size_t i = 0; i < keywords.size(); ++i) {
    try {
      auto cw = broker_run_keyword(ch, static_cast<std::uint32_t>(i), keywords[i], opt, rng);
      ml.index.push_back(search_index(cw, tokens));
      ml.rows.push_back(ranking::match_row(cw, tokens));
      ml.rejected.push_back(0);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ValidationRejected) {
        ml.index.push_back(std::nullopt);
        ml.rows.emplace_back(tokens.size(), 0);
        ml.rejected.push_back(1);
        continue;
      }
      if (e.code() != ErrorCode::ChannelClosed && e.code() != ErrorCode::Timeout) {
        try {
          ch.send({FrameType::SessionAbort, {}});
        } catch (const Error&) {
        }
      }
      fail(e.code(), "keyword " + std::to_string(i) + ": " + e.detail());
    }
  }
  return ml;
}

}  // namespace qres::qese
