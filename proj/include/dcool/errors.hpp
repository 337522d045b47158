#pragma once

#include <stdexcept>
#include <string>

namespace dcool {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A vector argument has the wrong dimension for the operation.
class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

// A direction vector required to be nonzero is (numerically) zero.
class DegenerateDirection : public Error {
 public:
  explicit DegenerateDirection(const std::string& what, int index = -1)
      : Error(what), index_(index) {}
  // Index of the offending anchor/edge when known, -1 otherwise.
  int index() const { return index_; }

 private:
  int index_;
};

// An iterate of an iterative solver became NaN or infinite.
class NonFiniteIterate : public Error {
 public:
  explicit NonFiniteIterate(const std::string& what) : Error(what) {}
};

// The simulator tried to complete a round without all expected messages.
class MissingNeighborMessage : public Error {
 public:
  explicit MissingNeighborMessage(const std::string& what) : Error(what) {}
};

// The outer loop observed a cost increase beyond the allowed slack.
class DescentViolation : public Error {
 public:
  DescentViolation(int outer_iter, double increase, const std::string& what)
      : Error(what), outer_iter_(outer_iter), increase_(increase) {}
  int outer_iter() const { return outer_iter_; }
  double increase() const { return increase_; }

 private:
  int outer_iter_;
  double increase_;
};

// Random geometric graph generation failed to produce a connected network
// within the retry budget.
class ConnectivityExhausted : public Error {
 public:
  explicit ConnectivityExhausted(const std::string& what) : Error(what) {}
};

// Aggregate metrics were requested over an empty trial set.
class EmptyTrialSet : public Error {
 public:
  explicit EmptyTrialSet(const std::string& what) : Error(what) {}
};

// A problem file could not be parsed against the expected schema.
class ProblemFormatError : public Error {
 public:
  explicit ProblemFormatError(const std::string& what) : Error(what) {}
};

}  // namespace dcool
