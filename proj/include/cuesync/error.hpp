#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace cuesync {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data. Binary formats report the byte offset of the fault,
/// text formats the 1-based line number.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
  ParseError(const std::string& what, std::size_t byte_offset)
      : Error(what + " (at byte " + std::to_string(byte_offset) + ")"), byte_offset_(byte_offset) {}

  std::optional<std::size_t> byte_offset() const { return byte_offset_; }

 private:
  std::optional<std::size_t> byte_offset_;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class LabelingError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cuesync
