#include "qres/wire.hpp"

namespace qres::wire {

std::string_view frame_type_name(FrameType t) {
  switch (t) {
    case FrameType::RegisterSecSla: return "REGISTER_SECSLA";
    case FrameType::RegisterAck: return "REGISTER_ACK";
    case FrameType::SubmitRequirements: return "SUBMIT_REQUIREMENTS";
    case FrameType::RankingResult: return "RANKING_RESULT";
    case FrameType::KeywordBegin: return "KEYWORD_BEGIN";
    case FrameType::GarbledCircuit: return "GARBLED_CIRCUIT";
    case FrameType::OtSender: return "OT_SENDER";
    case FrameType::OtReceiver: return "OT_RECEIVER";
    case FrameType::OtPayload: return "OT_PAYLOAD";
    case FrameType::KeywordDone: return "KEYWORD_DONE";
    case FrameType::SessionAbort: return "SESSION_ABORT";
    case FrameType::CacChallenge: return "CAC_CHALLENGE";
    case FrameType::CacOpening: return "CAC_OPENING";
    case FrameType::CacPack: return "CAC_PACK";
    case FrameType::ServeAttach: return "SERVE_ATTACH";
    case FrameType::AttachAck: return "ATTACH_ACK";
    case FrameType::ResolveRequest: return "RESOLVE_REQUEST";
    case FrameType::ResolveResult: return "RESOLVE_RESULT";
    case FrameType::AuditorRegister: return "AUDITOR_REGISTER";
    case FrameType::AuditorRegistered: return "AUDITOR_REGISTERED";
    case FrameType::AuditorSign: return "AUDITOR_SIGN";
    case FrameType::AuditorSignature: return "AUDITOR_SIGNATURE";
    case FrameType::Error: return "ERROR";
    case FrameType::OnionCreate: return "ONION_CREATE";
    case FrameType::OnionData: return "ONION_DATA";
  }
  return "UNKNOWN";
}

bool is_known_type(std::uint8_t t) { return frame_type_name(static_cast<FrameType>(t)) != "UNKNOWN"; }

Bytes frame_encode(const Frame& f) {
  if (f.payload.size() + 2 > kMaxFrameLength) fail(ErrorCode::FormatError, "frame too large");
  Writer w;
  w.u32(static_cast<std::uint32_t>(f.payload.size() + 2));
  w.u8(static_cast<std::uint8_t>(f.type));
  w.u8(kVersion);
  w.raw(f.payload);
  return std::move(w).take();
}

std::size_t frame_size_from_header(ByteView first4) {
  if (first4.size() < 4) fail(ErrorCode::Truncated, "frame header");
  Reader r(first4.first(4));
  std::uint32_t len = r.u32();
  if (len < 2) fail(ErrorCode::Truncated, "frame length below header size");
  if (len > kMaxFrameLength) fail(ErrorCode::FormatError, "frame length exceeds limit");
  return 4 + static_cast<std::size_t>(len);
}

Frame frame_decode(ByteView raw) {
  if (raw.size() < kHeaderSize) fail(ErrorCode::Truncated, "frame shorter than its header");
  std::size_t total = frame_size_from_header(raw);
  if (raw.size() < total) fail(ErrorCode::Truncated, "frame shorter than its length field");
  if (raw.size() > total) fail(ErrorCode::Truncated, "bytes beyond the frame length");
  std::uint8_t type = raw[4];
  if (!is_known_type(type)) fail(ErrorCode::UnknownType, "frame type " + std::to_string(type));
  if (raw[5] != kVersion) fail(ErrorCode::VersionMismatch, "frame version " + std::to_string(raw[5]));
  return Frame{static_cast<FrameType>(type), Bytes(raw.begin() + kHeaderSize, raw.end())};
}

Frame error_frame(ErrorCode code, std::string_view message) {
  Writer w;
  w.str(error_code_name(code));
  w.str(message);
  return {FrameType::Error, std::move(w).take()};
}

Frame error_frame(const qres::Error& e) { return error_frame(e.code(), e.detail()); }

void expect_type(const Frame& f, FrameType want) {
  if (f.type == want) return;
  if (f.type == FrameType::Error) {
    Reader r(f.payload);
    std::string name = r.str();
    std::string msg = r.str();
    fail(error_code_from_name(name).value_or(ErrorCode::ProtocolError), "peer: " + msg);
  }
  fail(ErrorCode::ProtocolError, "expected " + std::string(frame_type_name(want)) + ", got " +
                                     std::string(frame_type_name(f.type)));
}

}  // namespace qres::wire
