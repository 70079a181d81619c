#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hashrec {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A resource file could not be opened or read.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// A resource loaded fine but holds nothing usable (no words, zero total count).
class EmptyResourceError : public Error {
 public:
  using Error::Error;
};

/// Malformed line in a TSV or text input.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Caller-supplied value violates a precondition (bad hashtag, k out of range, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Unknown identifier (synset id, profile id).
class ReferenceError : public Error {
 public:
  using Error::Error;
};

/// Structural defect in a graph resource, e.g. a cycle in the is-a edges.
class StructureError : public Error {
 public:
  using Error::Error;
};

}  // namespace hashrec
