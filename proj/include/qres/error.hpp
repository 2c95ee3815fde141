#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qres {

enum class ErrorCode {
  // secsla-model
  MalformedXml,
  SchemaViolation,
  DuplicateId,
  MissingValue,
  EmptySubstring,
  TemplateMismatch,
  MissingPriority,
  // crypto-prims
  RngFailure,
  BadTokenLength,
  BadPadding,
  BadLength,
  InvalidGroupElement,
  // bool-circuit
  FormatError,
  NonTopological,
  UnsupportedGateKind,
  WidthMismatch,
  ResourceMissing,
  // garbling
  CorruptTable,
  EncodingConsumed,
  BadIndexSet,
  // oblivious-transfer
  LengthMismatch,
  OtFailure,
  // qese-protocol
  SessionInProgress,
  ValidationRejected,
  ProtocolError,
  // ranking
  EmptyInput,
  RaggedRows,
  // anonet
  CertInvalid,
  AlreadyRegistered,
  Unresolvable,
  PeelFailure,
  SignatureInvalid,
  // broker-service
  NotFound,
  Corrupt,
  NoProviders,
  ProviderUnreachable,
  Truncated,
  UnknownType,
  VersionMismatch,
  ChannelClosed,
  Io,
  Config,
  Timeout,
  Usage,
};

std::string_view error_code_name(ErrorCode code);
// Inverse of error_code_name; nullopt for unknown names.
std::optional<ErrorCode> error_code_from_name(std::string_view name);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  // The message without the code-name prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace qres
