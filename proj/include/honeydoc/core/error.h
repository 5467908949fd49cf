#ifndef HONEYDOC_CORE_ERROR_H_
#define HONEYDOC_CORE_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace honeydoc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input. `line` is 1-based (0 when unknown); `offset` is the
// byte offset within the line.
class ParseError : public Error {
 public:
  ParseError(std::string message, std::size_t line, std::size_t offset)
      : Error(Describe(message, line, offset)),
        line_(line),
        offset_(offset),
        detail_(std::move(message)) {}

  std::size_t line() const { return line_; }
  std::size_t offset() const { return offset_; }
  const std::string& detail() const { return detail_; }

 private:
  static std::string Describe(const std::string& message, std::size_t line,
                              std::size_t offset) {
    if (line == 0) return message + " (offset " + std::to_string(offset) + ")";
    return "line " + std::to_string(line) + ", offset " +
           std::to_string(offset) + ": " + message;
  }

  std::size_t line_;
  std::size_t offset_;
  std::string detail_;
};

// Inconsistent scenario, ruleset or topology.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A caller broke an operation's precondition.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// A segment field is out of range or violates a segment invariant.
class SegmentError : public Error {
 public:
  SegmentError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace honeydoc

#endif  // HONEYDOC_CORE_ERROR_H_
