#pragma once

#include <stdexcept>
#include <string>

namespace npw {

/// Process exit codes used by the CLI front-end.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitNumericalError = 3,
  kExitIoError = 4,
};

enum class SolverStatus {
  TotalInternalReflection,
  NoPhysicalRoot,
  CancellationUnderflow,
  GrazingDegenerate,
  InvalidIncidence,   // attenuation direction perpendicular/opposing phase (c <= 0)
  DegenerateFresnel,  // e1*q2 + e2*q1 ~ 0
};

class SolverError : public std::runtime_error {
 public:
  SolverError(SolverStatus s, const std::string& what) : std::runtime_error(what), status_(s) {}
  SolverStatus status() const { return status_; }

 private:
  SolverStatus status_;
};

enum class TraceStatus {
  TotalInternalReflection,
  SegmentOverflow,
  NoBracket,
  NonConvergence,
};

class TraceError : public std::runtime_error {
 public:
  TraceError(TraceStatus s, const std::string& what, double depth_km = 0.0)
      : std::runtime_error(what), status_(s), depth_km_(depth_km) {}
  TraceStatus status() const { return status_; }
  /// Altitude reached when the trace stopped (TIR reports).
  double depth_km() const { return depth_km_; }

 private:
  TraceStatus status_;
  double depth_km_;
};

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace npw
