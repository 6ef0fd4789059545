#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tshobam {

enum class ErrorKind {
  NotInScale,
  EmptyWindow,
  NonRegressive,
  SyntaxError,
  UnknownIdentifier,
  DomainError,
  HistoryTooShort,
  NonFinite,
  NonPositiveWeight,
  NoContraction,
  MaxIterExceeded,
  NotStable,
  BracketFailure,
  GridMismatch,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` carries the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failure in a coefficient expression; `offset()` is the byte offset into the source.
class SyntaxError : public Error {
 public:
  SyntaxError(ErrorKind kind, std::size_t offset, const std::string& what)
      : Error(kind, what + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotInScale: return "NotInScale";
    case ErrorKind::EmptyWindow: return "EmptyWindow";
    case ErrorKind::NonRegressive: return "NonRegressive";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::HistoryTooShort: return "HistoryTooShort";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorKind::NoContraction: return "NoContraction";
    case ErrorKind::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorKind::NotStable: return "NotStable";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace tshobam
