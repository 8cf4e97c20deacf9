#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aag {

enum class ErrorCode {
  ParseError,
  UnknownField,
  InvalidNodeId,
  DuplicateNodeId,
  DuplicateEdge,
  DanglingEdge,
  CycleDetected,
  IllegalChildKind,
  MultiParentNonAccessMethod,
  EmptyOperator,
  RootNotAccount,
  UnknownNode,
  NotAnAccount,
  NotALeaf,
  InvalidPolicy,
  SizeLimitExceeded,
  NotMinimized,
  UnknownAccessMethod,
  MissingLabel,
  InvalidRecord,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Every engine failure carries a machine-readable code plus an optional
// location (node id, JSON pointer or record field path).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string path = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& path() const noexcept { return path_; }

 private:
  ErrorCode code_;
  std::string path_;
};

}  // namespace aag
