#pragma once

#include <stdexcept>
#include <string>

namespace bbq {

// Base of all structured errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument is outside its documented range (bad exponent, block index, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Input data is malformed (non-finite samples, short files, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

// A declared invariant failed (Hermitian symmetry, divergence certificate, ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

// A run configuration does not validate.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Time integration lost finiteness; carries the last time with finite fields.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double last_valid_time)
      : Error(what), last_valid_time_(last_valid_time) {}
  double last_valid_time() const { return last_valid_time_; }

 private:
  double last_valid_time_;
};

// Advective CFL bound exceeded by more than the escalation factor.
class StabilityError : public Error {
 public:
  StabilityError(const std::string& what, double last_valid_time)
      : Error(what), last_valid_time_(last_valid_time) {}
  double last_valid_time() const { return last_valid_time_; }

 private:
  double last_valid_time_;
};

}  // namespace bbq
