#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace synthgrid {

/// Root of every error the library throws. Anything else escaping a public
/// function is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// ---- gateway -------------------------------------------------------------

/// Network failure, timeout, 429 or 5xx. Retryable.
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& what, int status = 0) : Error(what), status(status) {}
  int status;
};

/// Non-retryable HTTP error with a response body.
class ApiError : public Error {
 public:
  ApiError(int status, const std::string& message)
      : Error("API error " + std::to_string(status) + ": " + message), status(status), message(message) {}
  int status;
  std::string message;
};

/// Raised by the offline transport: something tried to reach the network.
class NetworkDisabled : public Error {
 public:
  using Error::Error;
};

class FixtureMissing : public Error {
 public:
  explicit FixtureMissing(const std::string& key) : Error("no fixture for request " + key), key(key) {}
  std::string key;
};

class FixtureConflict : public Error {
 public:
  explicit FixtureConflict(const std::string& key)
      : Error("fixture " + key + " already recorded with different content"), key(key) {}
  std::string key;
};

// ---- prompts -------------------------------------------------------------

class MissingPlaceholder : public Error {
 public:
  explicit MissingPlaceholder(const std::string& name) : Error("missing binding for $" + name + "$"), name(name) {}
  std::string name;
};

class HistoryError : public Error {
 public:
  using Error::Error;
};

// ---- parsing -------------------------------------------------------------

/// Base for everything that means "the model output is unusable"; the stage
/// runners retry on any of these.
class OutputError : public Error {
 public:
  using Error::Error;
};

class EnvelopeError : public OutputError {
 public:
  enum class Kind { MissingStart, MissingEnd, EndBeforeStart, Empty };
  EnvelopeError(Kind kind, const std::string& what) : OutputError(what), kind(kind) {}
  Kind kind;
};

class ParseError : public OutputError {
 public:
  using OutputError::OutputError;
};

class ContentError : public OutputError {
 public:
  using OutputError::OutputError;
};

class RangeError : public OutputError {
 public:
  RangeError(std::string parameter, std::string season)
      : OutputError("inverted range for " + parameter + " in " + season),
        parameter(std::move(parameter)),
        season(std::move(season)) {}
  std::string parameter;
  std::string season;
};

class ShapeError : public OutputError {
 public:
  ShapeError(std::string series, std::size_t count, const std::string& detail = {})
      : OutputError("series " + series + " has " + std::to_string(count) + " entries" +
                    (detail.empty() ? std::string{} : " (" + detail + ")")),
        series(std::move(series)),
        count(count) {}
  std::string series;
  std::size_t count;
};

class MemberMismatch : public OutputError {
 public:
  MemberMismatch(std::vector<std::string> missing, std::vector<std::string> extra);
  std::vector<std::string> missing;
  std::vector<std::string> extra;
};

class ValueError : public OutputError {
 public:
  using OutputError::OutputError;
};

/// Output parsed fine but failed an error-severity validation rule.
class ValidationRejected : public OutputError {
 public:
  using OutputError::OutputError;
};

// ---- weather / calendar / analytics --------------------------------------

class CoordError : public Error {
 public:
  using Error::Error;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

class ComparisonError : public Error {
 public:
  using Error::Error;
};

/// A pipeline item that could not be produced within the retry budget.
class StageItemFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace synthgrid
