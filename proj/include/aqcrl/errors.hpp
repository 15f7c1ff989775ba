#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aqcrl {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes or dimensions that do not line up.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// An argument outside its documented domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// The request is valid but beyond what the chosen method supports
// (dense diagonalization size, brute-force enumeration size, ...).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// Time integration lost unitarity beyond the accepted drift.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double drift)
      : Error(what), drift_(drift) {}
  double drift() const noexcept { return drift_; }

 private:
  double drift_;
};

// Malformed serialized record. `position` is a byte offset when known,
// `field` names the offending key when the record parsed but was incomplete.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position = 0,
             std::string field = {})
      : Error(what), position_(position), field_(std::move(field)) {}
  std::size_t position() const noexcept { return position_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t position_;
  std::string field_;
};

// Invalid run configuration; `field` is the canonical key (e.g. "agent.gamma").
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::string field = {})
      : Error(what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace aqcrl
