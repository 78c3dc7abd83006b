#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace specmine {

/// Base class for every failure surfaced by the pipeline.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Raised when no top-level type can be recovered from a unit.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what), line_(line), column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Closure exceeded the configured hard cap; the result is not a subsystem.
class TooLarge : public Error {
 public:
  using Error::Error;
};

class MappingFileUnreadable : public Error {
 public:
  using Error::Error;
};

class EmptyAbstraction : public Error {
 public:
  using Error::Error;
};

class AbstractionSyntaxError : public Error {
 public:
  AbstractionSyntaxError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " at " + std::to_string(line) + ":" + std::to_string(column)),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class NoViableMatch : public Error {
 public:
  NoViableMatch(const std::string& what, double score) : Error(what), score_(score) {}
  double score() const { return score_; }

 private:
  double score_;
};

class TransformConflict : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class MissingPrerequisite : public Error {
 public:
  using Error::Error;
};

}  // namespace specmine
