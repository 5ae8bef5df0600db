#pragma once

#include <stdexcept>
#include <string>

namespace chronoline {

// Violated precondition or invariant of a library operation.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. Line numbers are 1-based; 0 means "whole file".
class ParseError : public ContractError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : ContractError(source + (line ? ":" + std::to_string(line) : std::string{}) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

[[noreturn]] inline void fail(const std::string& msg) { throw ContractError(msg); }

inline void require(bool cond, const std::string& msg) {
  if (!cond) fail(msg);
}

}  // namespace detail
}  // namespace chronoline
