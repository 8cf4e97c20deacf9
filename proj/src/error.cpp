#include "aag/error.hpp"

namespace aag {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownField: return "UnknownField";
    case ErrorCode::InvalidNodeId: return "InvalidNodeId";
    case ErrorCode::DuplicateNodeId: return "DuplicateNodeId";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::DanglingEdge: return "DanglingEdge";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::IllegalChildKind: return "IllegalChildKind";
    case ErrorCode::MultiParentNonAccessMethod: return "MultiParentNonAccessMethod";
    case ErrorCode::EmptyOperator: return "EmptyOperator";
    case ErrorCode::RootNotAccount: return "RootNotAccount";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::NotAnAccount: return "NotAnAccount";
    case ErrorCode::NotALeaf: return "NotALeaf";
    case ErrorCode::InvalidPolicy: return "InvalidPolicy";
    case ErrorCode::SizeLimitExceeded: return "SizeLimitExceeded";
    case ErrorCode::NotMinimized: return "NotMinimized";
    case ErrorCode::UnknownAccessMethod: return "UnknownAccessMethod";
    case ErrorCode::MissingLabel: return "MissingLabel";
    case ErrorCode::InvalidRecord: return "InvalidRecord";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::string path)
    : std::runtime_error(message), code_(code), path_(std::move(path)) {}

}  // namespace aag
