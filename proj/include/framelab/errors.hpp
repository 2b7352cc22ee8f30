#pragma once

#include <stdexcept>
#include <string>

namespace framelab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad arguments, schema violations, mismatched grids.
class InputError : public Error {
 public:
  using Error::Error;
};

// A required hypothesis does not hold for the supplied objects
// (e.g. the base system is not a frame).
class HypothesisError : public Error {
 public:
  using Error::Error;
};

// Eigen-solver failure, iterative non-convergence, evaluation blow-up.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace framelab
