#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace linkstate {

enum class Errc {
  kParse,
  kValue,
  kDuplicateCallback,
  kUnknownHandle,
  kResumeWithoutDelay,
  kReentrantFlush,
  kDuplicateName,
  kCycleDetected,
  kDisposed,
  kTypeMismatch,
  kDuplicateClass,
  kUnknownClass,
  kNameRequired,
  kUnknownName,
  kInvalidPermutation,
  kNoRoot,
  kSelfLink,
  kDuplicateLink,
  kAlreadyUnlinked,
  kAlreadyAttached,
  kNotAttached,
  kStateMismatch,
  kNothingToUndo,
  kNothingToRedo,
  kIndexOutOfRange,
  kVersionMismatch,
  kMalformedMessage,
  kScriptError,
  kEmptyComponent,
  kKeyTypeMismatch,
  kFileNotFound,
  kMissingColumn,
  kIo,
};

std::string_view errc_name(Errc code) noexcept;

// Every framework failure is reported as an Error carrying a machine-checkable
// code; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  Errc code() const noexcept { return code_; }
  // The message without the code-name prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

// Non-fatal problems collected while applying state (unknown classes,
// verifier rejections, shape mismatches). Application never aborts on these.
struct Diagnostic {
  Errc code;
  std::string path;
  std::string message;
};

using Diagnostics = std::vector<Diagnostic>;

}  // namespace linkstate
