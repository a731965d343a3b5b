#pragma once

#include <stdexcept>
#include <string>

namespace iongrad {

// Exit codes: 2 config, 3 physics/convergence, 4 I/O.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PhysicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Newton iteration for the crystal did not reach tolerance.
class SolverError : public PhysicsError {
 public:
  SolverError(const std::string& what, double last_residual)
      : PhysicsError(what), last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

/// A normal mode has a non-positive squared frequency (zig-zag transition).
class InstabilityError : public PhysicsError {
 public:
  InstabilityError(const std::string& what, int mode)
      : PhysicsError(what), mode_(mode) {}
  int mode() const { return mode_; }

 private:
  int mode_;
};

class CalibrationError : public PhysicsError {
 public:
  using PhysicsError::PhysicsError;
};

/// Population reached the top of the truncated Fock space.
class TruncationError : public PhysicsError {
 public:
  TruncationError(const std::string& what, double leakage)
      : PhysicsError(what), leakage_(leakage) {}
  double leakage() const { return leakage_; }

 private:
  double leakage_;
};

class FitError : public PhysicsError {
 public:
  FitError(const std::string& what, double residual)
      : PhysicsError(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace iongrad
