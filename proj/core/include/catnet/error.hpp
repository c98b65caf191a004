#pragma once

#include <stdexcept>
#include <string>

namespace catnet {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Misuse of the graph build phase: mutation after freeze, self-loops, unknown ids.
class BuildError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data (schema, rows, ids, dimensions).
class DataError : public Error {
 public:
  using Error::Error;
};

// Convergence failures, non-finite values, singular systems.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace catnet
