#include "signforge/error.hpp"

namespace signforge {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::NoPerson: return "NoPerson";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::EmptyClip: return "EmptyClip";
    case ErrorCode::AllFramesInvalid: return "AllFramesInvalid";
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::WidthMismatch: return "WidthMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::BadArity: return "BadArity";
    case ErrorCode::CounterMismatch: return "CounterMismatch";
    case ErrorCode::UnparsableToken: return "UnparsableToken";
    case ErrorCode::NoTemplates: return "NoTemplates";
    case ErrorCode::BadSlot: return "BadSlot";
    case ErrorCode::MissingLanguage: return "MissingLanguage";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::AlreadyPrefixed: return "AlreadyPrefixed";
    case ErrorCode::UnknownToken: return "UnknownToken";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonScalarLoss: return "NonScalarLoss";
    case ErrorCode::DoubleBackward: return "DoubleBackward";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::TooLong: return "TooLong";
    case ErrorCode::UnknownLanguage: return "UnknownLanguage";
    case ErrorCode::DuplicateTag: return "DuplicateTag";
    case ErrorCode::EmptyMemory: return "EmptyMemory";
    case ErrorCode::DivergedLoss: return "DivergedLoss";
    case ErrorCode::MissingReverseModel: return "MissingReverseModel";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace signforge
