#pragma once

#include <stdexcept>
#include <string>

namespace isochar {

/// Base of every error raised by the library. Each subclass maps onto one of
/// the named failure modes of the public operations.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotSublattice : public Error {
 public:
  using Error::Error;
};

class InfiniteIndex : public Error {
 public:
  using Error::Error;
};

class DegreeCapExceeded : public Error {
 public:
  using Error::Error;
};

class MassFormulaViolation : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class AsymmetryError : public Error {
 public:
  using Error::Error;
};

class NonCommuting : public Error {
 public:
  using Error::Error;
};

class NotStable : public Error {
 public:
  using Error::Error;
};

class OperatorDoesNotRestrict : public Error {
 public:
  using Error::Error;
};

class RankMismatch : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace isochar
