#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace schottky {

enum class ErrorKind {
  InvalidInput,
  PoleError,
  NotLoxodromic,
  InvalidMultiplier,
  DegeneratePoints,
  OnBoundary,
  Inconclusive,
  NotConverged,
  DeltaTooLarge,
  NotUpperHalfPlane,
  InvalidQ,
  PoleAtOne,
  CoincidentPoints,
  VanishingDerivative,
  UnstableLimit,
  OrbitCollision,
  FitResidualTooLarge,
  SingularNormalization,
  QuadratureNotConverged,
  PathCrossesDisk,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::PoleError: return "PoleError";
    case ErrorKind::NotLoxodromic: return "NotLoxodromic";
    case ErrorKind::InvalidMultiplier: return "InvalidMultiplier";
    case ErrorKind::DegeneratePoints: return "DegeneratePoints";
    case ErrorKind::OnBoundary: return "OnBoundary";
    case ErrorKind::Inconclusive: return "Inconclusive";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::DeltaTooLarge: return "DeltaTooLarge";
    case ErrorKind::NotUpperHalfPlane: return "NotUpperHalfPlane";
    case ErrorKind::InvalidQ: return "InvalidQ";
    case ErrorKind::PoleAtOne: return "PoleAtOne";
    case ErrorKind::CoincidentPoints: return "CoincidentPoints";
    case ErrorKind::VanishingDerivative: return "VanishingDerivative";
    case ErrorKind::UnstableLimit: return "UnstableLimit";
    case ErrorKind::OrbitCollision: return "OrbitCollision";
    case ErrorKind::FitResidualTooLarge: return "FitResidualTooLarge";
    case ErrorKind::SingularNormalization: return "SingularNormalization";
    case ErrorKind::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorKind::PathCrossesDisk: return "PathCrossesDisk";
  }
  return "Unknown";
}

/// Every failure raised by the library. `kind()` is stable and machine readable;
/// the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace schottky
