#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace finestruct {

enum class ErrorKind {
  EmptyFeature,
  ConstantFeature,
  DegenerateSpread,
  TooFewPoints,
  BadRange,
  BadSpec,
  InvalidArgument,
  NoPlottableFeatures,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyFeature: return "EmptyFeature";
    case ErrorKind::ConstantFeature: return "ConstantFeature";
    case ErrorKind::DegenerateSpread: return "DegenerateSpread";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::BadRange: return "BadRange";
    case ErrorKind::BadSpec: return "BadSpec";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NoPlottableFeatures: return "NoPlottableFeatures";
  }
  return "Unknown";
}

// Every failure raised by the library carries a kind so callers can route on it
// (the engine turns most of them into per-feature diagnostics).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace finestruct
