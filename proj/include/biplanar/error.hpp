#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace biplanar {

enum class ErrorKind {
  DegenerateProjection,
  InsufficientCorrespondences,
  DegenerateConfiguration,
  RankDeficient,
  PointAtInfinity,
  WeakGeometry,
  IllConditioned,
  EmptySample,
  ConfigInvalid,
  ParseError,
  SchemaVersionMismatch,
  ValidationError,
  IoError,
};

[[nodiscard]] constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DegenerateProjection: return "DegenerateProjection";
    case ErrorKind::InsufficientCorrespondences: return "InsufficientCorrespondences";
    case ErrorKind::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::PointAtInfinity: return "PointAtInfinity";
    case ErrorKind::WeakGeometry: return "WeakGeometry";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Geometric failures (degenerate data, weak rigs) are recoverable per trial;
/// configuration failures abort a run. Both share this type and differ by kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

  [[nodiscard]] bool is_config_error() const noexcept {
    return kind_ == ErrorKind::ConfigInvalid || kind_ == ErrorKind::ParseError ||
           kind_ == ErrorKind::SchemaVersionMismatch || kind_ == ErrorKind::ValidationError;
  }

 private:
  ErrorKind kind_;
};

}  // namespace biplanar
