#pragma once

#include <stdexcept>
#include <string>

namespace isodiam {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vectors of incompatible length were combined.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// A coordinate vector (or normal, radius, tangent) violates the invariant of its space.
class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

// Coincident, antipodal or otherwise degenerate configuration.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class UnboundedRegion : public Error {
 public:
  using Error::Error;
};

// Malformed or invalid region/config document. `where()` is a JSON pointer.
class DocumentError : public Error {
 public:
  DocumentError(std::string where, const std::string& what)
      : Error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

}  // namespace isodiam
