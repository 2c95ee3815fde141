#pragma once

#include <optional>
#include <string>

#include "qres/bytes.hpp"
#include "qres/error.hpp"

// Length-prefixed binary frames:
//   u32 length (big-endian, counts type + version + payload) || u8 type || u8 version || payload
namespace qres::wire {

inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kHeaderSize = 6;
inline constexpr std::uint32_t kMaxFrameLength = 512u << 20;

enum class FrameType : std::uint8_t {
  RegisterSecSla = 0x01,
  RegisterAck = 0x02,
  SubmitRequirements = 0x03,
  RankingResult = 0x04,

  KeywordBegin = 0x10,
  GarbledCircuit = 0x11,
  OtSender = 0x12,
  OtReceiver = 0x13,
  OtPayload = 0x14,
  KeywordDone = 0x15,
  SessionAbort = 0x16,
  CacChallenge = 0x17,
  CacOpening = 0x18,
  CacPack = 0x19,

  ServeAttach = 0x20,
  AttachAck = 0x21,

  ResolveRequest = 0x30,
  ResolveResult = 0x31,
  AuditorRegister = 0x32,
  AuditorRegistered = 0x33,
  AuditorSign = 0x34,
  AuditorSignature = 0x35,

  Error = 0x3f,

  OnionCreate = 0x40,
  OnionData = 0x41,
};

std::string_view frame_type_name(FrameType t);
bool is_known_type(std::uint8_t t);

struct Frame {
  FrameType type{};
  Bytes payload;

  friend bool operator==(const Frame&, const Frame&) = default;
};

Bytes frame_encode(const Frame& f);
// Exactly one frame; Truncated when short or overlong, UnknownType, VersionMismatch.
Frame frame_decode(ByteView raw);
// Total frame size from the first four bytes; Truncated if fewer, FormatError above the limit.
std::size_t frame_size_from_header(ByteView first4);

// ERROR frame payload: error-code name and message.
Frame error_frame(ErrorCode code, std::string_view message);
Frame error_frame(const qres::Error& e);
// Rethrows an ERROR frame as the Error it carries; otherwise checks the type.
void expect_type(const Frame& f, FrameType want);

}  // namespace qres::wire
