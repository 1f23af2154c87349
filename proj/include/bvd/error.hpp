#pragma once

#include <stdexcept>
#include <string>

namespace bvd {

// Base for everything the library throws on contract violations.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SizeMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Raised by the time stepper; carries the simulation time at which it happened.
class StepError : public Error {
 public:
  enum class Kind { cfl_violation, blow_up_suspected };

  StepError(Kind kind, double t, std::string detail)
      : Error(std::string(kind_name(kind)) + " at t=" + std::to_string(t) + ": " + detail),
        kind_(kind),
        t_(t),
        detail_(std::move(detail)) {}

  Kind kind() const { return kind_; }
  double time() const { return t_; }
  const std::string& detail() const { return detail_; }

  static const char* kind_name(Kind k) {
    return k == Kind::cfl_violation ? "cfl_violation" : "blow_up_suspected";
  }

 private:
  Kind kind_;
  double t_;
  std::string detail_;
};

}  // namespace bvd
