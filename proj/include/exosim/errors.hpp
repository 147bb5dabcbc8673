#pragma once

#include <stdexcept>
#include <string>

namespace exosim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidSubject : public Error {
 public:
  using Error::Error;
};

class InvalidPosture : public Error {
 public:
  using Error::Error;
};

class GainOutOfRange : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Raised by the config reader; carries the 1-based line of the offending entry.
class ParseError : public ConfigError {
 public:
  ParseError(int line, const std::string& what)
      : ConfigError("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class UnknownKey : public ParseError {
 public:
  UnknownKey(int line, const std::string& key)
      : ParseError(line, "unknown key '" + key + "'"), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class NumericalFault : public Error {
 public:
  using Error::Error;
};

class SchedulerFault : public Error {
 public:
  using Error::Error;
};

class MetricsError : public Error {
 public:
  using Error::Error;
};

}  // namespace exosim
