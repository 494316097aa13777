#pragma once

#include <stdexcept>
#include <string>

namespace gbm {

// Base of every error the library throws. The CLI maps the three families
// below onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: configuration documents, parameters, functions, queries.
class InputError : public Error {
 public:
  using Error::Error;
};

// A numerical method failed to deliver its stated accuracy or stability.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A statistical procedure could not run on the data it was given.
class StatisticsError : public Error {
 public:
  using Error::Error;
};

class InvalidFunction : public InputError {
 public:
  using InputError::InputError;
};

class InvalidCoefficients : public InputError {
 public:
  using InputError::InputError;
};

class InvalidParameters : public InputError {
 public:
  using InputError::InputError;
};

class InvalidWindow : public InputError {
 public:
  using InputError::InputError;
};

class UnsupportedQuery : public InputError {
 public:
  using InputError::InputError;
};

class ContractNotApplicable : public InputError {
 public:
  using InputError::InputError;
};

class ConfigError : public InputError {
 public:
  ConfigError(std::string key, const std::string& what)
      : InputError(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class QuadratureError : public NumericError {
 public:
  QuadratureError(const std::string& what, double achieved)
      : NumericError(what + " (achieved error estimate " + std::to_string(achieved) + ")"),
        achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

class StepRejected : public NumericError {
 public:
  using NumericError::NumericError;
};

class HorizonTooShort : public NumericError {
 public:
  using NumericError::NumericError;
};

class EventCapExceeded : public NumericError {
 public:
  using NumericError::NumericError;
};

class NoData : public StatisticsError {
 public:
  using StatisticsError::StatisticsError;
};

class TooFewObservations : public StatisticsError {
 public:
  using StatisticsError::StatisticsError;
};

}  // namespace gbm
