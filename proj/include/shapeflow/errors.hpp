#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace shapeflow {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument or precondition violation (bad grid spec, bad config, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A sample point fell outside the admissible region of a field.
class OutOfDomain : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class DegenerateGradient : public Error {
 public:
  using Error::Error;
};

class DegenerateNormal : public Error {
 public:
  explicit DegenerateNormal(std::size_t vertex)
      : Error("degenerate vertex normal at vertex " + std::to_string(vertex)), vertex_(vertex) {}
  std::size_t vertex() const { return vertex_; }

 private:
  std::size_t vertex_;
};

class NonManifoldVertex : public Error {
 public:
  explicit NonManifoldVertex(std::size_t vertex)
      : Error("incident faces of vertex " + std::to_string(vertex) + " do not form a single cycle"),
        vertex_(vertex) {}
  std::size_t vertex() const { return vertex_; }

 private:
  std::size_t vertex_;
};

class InsufficientNeighbors : public Error {
 public:
  using Error::Error;
};

class SingularFit : public Error {
 public:
  using Error::Error;
};

class NonFiniteUpdate : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Loaded data violates a structural invariant (open mesh, bad indices, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace shapeflow
