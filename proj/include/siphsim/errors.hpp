#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace siphsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParams : public Error {
 public:
  using Error::Error;
};

class InvalidPlatform : public Error {
 public:
  using Error::Error;
};

class InvalidSubnetworkCount : public Error {
 public:
  using Error::Error;
};

class NotPhotonic : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class UnmappedLayer : public Error {
 public:
  using Error::Error;
};

class UnknownModel : public Error {
 public:
  using Error::Error;
};

class DeadlockDetected : public Error {
 public:
  using Error::Error;
};

class ZeroBits : public Error {
 public:
  using Error::Error;
};

/// Config errors carry the offending line (0 when not tied to a line) and key.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& msg, std::size_t line = 0, std::string key = {})
      : Error(format(msg, line, key)), line_(line), key_(std::move(key)) {}

  std::size_t line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  static std::string format(const std::string& msg, std::size_t line, const std::string& key) {
    std::string out = "config";
    if (line > 0) out += ":" + std::to_string(line);
    if (!key.empty()) out += " [" + key + "]";
    return out + ": " + msg;
  }

  std::size_t line_;
  std::string key_;
};

}  // namespace siphsim
