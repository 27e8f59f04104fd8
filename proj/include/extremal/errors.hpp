#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace extremal {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The adapter could not construct a legal move within the redraw bound.
class AdapterMoveImpossible : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class CalibrationUnstable : public Error {
 public:
  using Error::Error;
};

class FitDegenerate : public Error {
 public:
  using Error::Error;
};

class CollapseUnstable : public Error {
 public:
  using Error::Error;
};

class MassNotConserved : public Error {
 public:
  using Error::Error;
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

class EmptySet : public Error {
 public:
  using Error::Error;
};

}  // namespace extremal
