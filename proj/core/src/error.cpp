#include "linkstate/error.hpp"

namespace linkstate {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::kParse: return "ParseError";
    case Errc::kValue: return "ValueError";
    case Errc::kDuplicateCallback: return "DuplicateCallback";
    case Errc::kUnknownHandle: return "UnknownHandle";
    case Errc::kResumeWithoutDelay: return "ResumeWithoutDelay";
    case Errc::kReentrantFlush: return "ReentrantFlush";
    case Errc::kDuplicateName: return "DuplicateName";
    case Errc::kCycleDetected: return "CycleDetected";
    case Errc::kDisposed: return "Disposed";
    case Errc::kTypeMismatch: return "TypeMismatch";
    case Errc::kDuplicateClass: return "DuplicateClass";
    case Errc::kUnknownClass: return "UnknownClass";
    case Errc::kNameRequired: return "NameRequired";
    case Errc::kUnknownName: return "UnknownName";
    case Errc::kInvalidPermutation: return "InvalidPermutation";
    case Errc::kNoRoot: return "NoRoot";
    case Errc::kSelfLink: return "SelfLink";
    case Errc::kDuplicateLink: return "DuplicateLink";
    case Errc::kAlreadyUnlinked: return "AlreadyUnlinked";
    case Errc::kAlreadyAttached: return "AlreadyAttached";
    case Errc::kNotAttached: return "NotAttached";
    case Errc::kStateMismatch: return "StateMismatch";
    case Errc::kNothingToUndo: return "NothingToUndo";
    case Errc::kNothingToRedo: return "NothingToRedo";
    case Errc::kIndexOutOfRange: return "IndexOutOfRange";
    case Errc::kVersionMismatch: return "VersionMismatch";
    case Errc::kMalformedMessage: return "MalformedMessage";
    case Errc::kScriptError: return "ScriptError";
    case Errc::kEmptyComponent: return "EmptyComponent";
    case Errc::kKeyTypeMismatch: return "KeyTypeMismatch";
    case Errc::kFileNotFound: return "FileNotFound";
    case Errc::kMissingColumn: return "MissingColumn";
    case Errc::kIo: return "IoError";
  }
  return "Error";
}

}  // namespace linkstate
