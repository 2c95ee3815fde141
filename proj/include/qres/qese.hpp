#pragma once

#include <optional>

#include "qres/cac.hpp"
#include "qres/channel.hpp"
#include "qres/ot.hpp"
#include "qres/qese_circuit.hpp"
#include "qres/ranking.hpp"

// Per-keyword provider/broker session: the provider garbles a fresh circuit
// with its key baked into the garbler inputs, the broker fetches its input
// labels by OT, evaluates, and matches the resulting ciphertext.
namespace qres::qese {

struct KeywordBegin {
  std::uint32_t seq = 0;
  QeseMode mode = QeseMode::Basic;
  std::uint8_t cac_copies = 0;  // 0 or 1: plain garbling

  Bytes encode() const;
  static KeywordBegin decode(ByteView raw);
};

struct GarbledCircuitMsg {
  garble::GarbledCircuit gc;
  std::vector<garble::WireLabel> garbler_labels;
  garble::OutputDecoding decoding;

  Bytes encode() const;
  static GarbledCircuitMsg decode(ByteView raw);
};

Bytes encode_ot_sender(std::span<const ot::SenderMsg> msgs);
std::vector<ot::SenderMsg> decode_ot_sender(ByteView raw);
Bytes encode_ot_receiver(std::span<const ot::ReceiverMsg> msgs);
std::vector<ot::ReceiverMsg> decode_ot_receiver(ByteView raw);

struct OtPayloadMsg {
  Digest echo{};  // hash of the OT_RECEIVER payload the provider answered
  std::vector<ot::Payload> payloads;

  Bytes encode() const;
  static OtPayloadMsg decode(ByteView raw);
};

Bytes encode_reveal_set(std::span<const std::uint32_t> reveal);
std::vector<std::uint32_t> decode_reveal_set(ByteView raw);

// Provider role. Holds k (and k_val in Validated mode); never sees keywords.
class ProviderSession {
 public:
  ProviderSession(SymKey k, std::optional<MacKey> k_val);

  bool in_session() const { return active_; }

  // Garbles a fresh circuit; SessionInProgress while one is open.
  GarbledCircuitMsg begin_keyword(QeseMode mode, Rng& rng);
  garble::CutAndChoosePack begin_keyword_cac(QeseMode mode, std::size_t copies, Rng& rng);
  garble::CacOpening cac_open(std::span<const std::uint32_t> reveal);

  std::vector<ot::SenderMsg> ot_setup(Rng& rng);
  // Consumes the evaluator encoding; a second call throws EncodingConsumed.
  OtPayloadMsg ot_respond(ByteView receiver_payload);
  void end_keyword();

  // Answers KEYWORD_BEGIN / CAC_CHALLENGE / OT_RECEIVER / KEYWORD_DONE /
  // SESSION_ABORT until the channel closes.
  void serve(net::Channel& ch, Rng& rng);
  // Handles one frame, writing replies to `ch`.
  void handle(const net::Frame& f, net::Channel& ch, Rng& rng);

 private:
  garble::InputEncoding& encoding();

  SymKey k_;
  std::optional<MacKey> k_val_;
  bool active_ = false;
  QeseMode mode_ = QeseMode::Basic;
  std::optional<garble::GarbleResult> plain_;
  std::optional<garble::CacGarbler> cac_;
  std::vector<ot::SenderState> ot_states_;
};

struct KeywordInput {
  Token w;
  std::optional<Tag> tag;  // Validated mode
};

struct BrokerOptions {
  QeseMode mode = QeseMode::Basic;
  std::size_t cac_copies = 0;
};

// Runs one keyword session; returns Enc(k, w). OtFailure, CorruptTable,
// ValidationRejected, ProtocolError.
EncryptedToken broker_run_keyword(net::Channel& ch, std::uint32_t seq, const KeywordInput& kw,
                                  const BrokerOptions& opt, Rng& rng);

std::optional<std::uint32_t> search_index(const EncryptedToken& cw, std::span<const EncryptedToken> tokens);

struct MatchList {
  std::vector<std::optional<std::uint32_t>> index;  // per keyword
  std::vector<ranking::MatchRow> rows;             // per keyword
  std::vector<std::uint8_t> rejected;              // per keyword, Validated-mode rejections
};

// Sequential keyword sessions against one provider. Validated-mode rejection
// zeroes only that keyword; other errors are rethrown with the keyword index.
MatchList qese_match_provider(net::Channel& ch, std::span<const KeywordInput> keywords,
                              std::span<const EncryptedToken> tokens, const BrokerOptions& opt, Rng& rng);

}  // namespace qres::qese
