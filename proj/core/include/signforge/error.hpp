#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace signforge {

// Every failure surfaced by the library carries one of these codes so the
// CLI can emit a machine-readable record without parsing message text.
enum class ErrorCode {
  // ingest
  MalformedDocument,
  NoPerson,
  SchemaMismatch,
  EmptyClip,
  AllFramesInvalid,
  // storage
  DuplicateKey,
  BadMagic,
  TruncatedPayload,
  WidthMismatch,
  NonFiniteValue,
  BadArity,
  CounterMismatch,
  UnparsableToken,
  // prompts
  NoTemplates,
  BadSlot,
  MissingLanguage,
  // langgloss
  EmptyCorpus,
  AlreadyPrefixed,
  UnknownToken,
  // tensor
  ShapeMismatch,
  NonScalarLoss,
  DoubleBackward,
  // signmodel
  BadConfig,
  TooLong,
  UnknownLanguage,
  DuplicateTag,
  EmptyMemory,
  // training
  DivergedLoss,
  // metrics
  MissingReverseModel,
  // generic
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace signforge
