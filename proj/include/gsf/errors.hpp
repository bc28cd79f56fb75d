#pragma once

#include <stdexcept>
#include <string>

namespace gsf {

/// Base of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the inputs failed (gauge mismatch, point outside the
/// domain, unsupported combination, bad syntax).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative or numerical procedure did not reach its target.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A hypothesis of a theorem was decided False or Indeterminate on the grid.
class CertificateError : public Error {
 public:
  using Error::Error;
};

}  // namespace gsf
