#pragma once

#include <stdexcept>
#include <string>

namespace crashforge {

// Root of the library's error hierarchy. Every throwing path in the
// library raises a subclass of Error; std:: exceptions escaping the
// library indicate a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed file content; the message names the offending row/column.
class ParseError : public Error {
 public:
  using Error::Error;
};

class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

class SingularInput : public Error {
 public:
  using Error::Error;
};

class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

class InconsistentTrace : public Error {
 public:
  using Error::Error;
};

class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Internal consistency trap (e.g. energy balance blown); always a bug.
class SolverError : public Error {
 public:
  using Error::Error;
};

class InvalidExpression : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class StageError : public Error {
 public:
  using Error::Error;
};

class MissingArtifact : public Error {
 public:
  using Error::Error;
};

}  // namespace crashforge
