#pragma once

#include <stdexcept>
#include <string>

namespace detect {

/// Root of the library's exception hierarchy. `exit_code()` is the process
/// status the command-line front end reports for an uncaught error of this
/// kind: 1 usage/configuration, 2 data validation, 3 numerical failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 2; }
};

// API precondition violations; shape mismatches are the common case.
class ContractError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public ContractError {
 public:
  using ContractError::ContractError;
};

// Numerical failures.
class NumericalDomainError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

class TrainingDivergenceError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

class ScheduleExhaustedError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

// Configuration and usage.
class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 1; }
};

// Data validation.
class IngestionError : public Error {
 public:
  using Error::Error;
};

class PreprocessError : public Error {
 public:
  using Error::Error;
};

class SplitError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace detect
