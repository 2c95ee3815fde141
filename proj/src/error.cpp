#include "qres/error.hpp"

namespace qres {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedXml: return "MalformedXml";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::MissingValue: return "MissingValue";
    case ErrorCode::EmptySubstring: return "EmptySubstring";
    case ErrorCode::TemplateMismatch: return "TemplateMismatch";
    case ErrorCode::MissingPriority: return "MissingPriority";
    case ErrorCode::RngFailure: return "RngFailure";
    case ErrorCode::BadTokenLength: return "BadTokenLength";
    case ErrorCode::BadPadding: return "BadPadding";
    case ErrorCode::BadLength: return "BadLength";
    case ErrorCode::InvalidGroupElement: return "InvalidGroupElement";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::NonTopological: return "NonTopological";
    case ErrorCode::UnsupportedGateKind: return "UnsupportedGateKind";
    case ErrorCode::WidthMismatch: return "WidthMismatch";
    case ErrorCode::ResourceMissing: return "ResourceMissing";
    case ErrorCode::CorruptTable: return "CorruptTable";
    case ErrorCode::EncodingConsumed: return "EncodingConsumed";
    case ErrorCode::BadIndexSet: return "BadIndexSet";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::OtFailure: return "OtFailure";
    case ErrorCode::SessionInProgress: return "SessionInProgress";
    case ErrorCode::ValidationRejected: return "ValidationRejected";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::CertInvalid: return "CertInvalid";
    case ErrorCode::AlreadyRegistered: return "AlreadyRegistered";
    case ErrorCode::Unresolvable: return "Unresolvable";
    case ErrorCode::PeelFailure: return "PeelFailure";
    case ErrorCode::SignatureInvalid: return "SignatureInvalid";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::Corrupt: return "Corrupt";
    case ErrorCode::NoProviders: return "NoProviders";
    case ErrorCode::ProviderUnreachable: return "ProviderUnreachable";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::UnknownType: return "UnknownType";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::ChannelClosed: return "ChannelClosed";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Config: return "Config";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::Usage: return "Usage";
  }
  return "Unknown";
}

std::optional<ErrorCode> error_code_from_name(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(ErrorCode::Usage); ++i) {
    auto code = static_cast<ErrorCode>(i);
    if (error_code_name(code) == name) return code;
  }
  return std::nullopt;
}

}  // namespace qres
