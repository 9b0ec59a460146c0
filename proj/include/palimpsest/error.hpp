#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace palimpsest {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters or arguments supplied by the caller (CLI exit code 1).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Bad or inconsistent input data: files, corpora, gold annotations (exit 2).
class DataError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public DataError {
 public:
  DecodeError(const std::string& what, std::size_t byte_offset)
      : DataError(what), byte_offset_(byte_offset) {}

  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

}  // namespace palimpsest
