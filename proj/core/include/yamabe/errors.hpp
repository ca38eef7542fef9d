#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace yamabe {

/// Base class of every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Structural misuse of jets: arity mismatch, base-point mismatch, bad index.
struct JetError : Error {
  using Error::Error;
};

/// An operator chain asked for more derivatives than the jet order carries.
struct OrderError : Error {
  using Error::Error;
};

/// Division by a jet with vanishing constant term, sqrt/log outside the domain.
struct SingularJetError : Error {
  using Error::Error;
};

/// Domain violation while evaluating an expression tree; the message names
/// the offending subexpression.
struct EvalError : Error {
  using Error::Error;
};

/// Scenario or expression text failed to parse. `position` is a 0-based
/// offset into the source string.
struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t pos) : Error(msg), position(pos) {}
  std::size_t position = 0;
};

/// Metric not positive definite at an evaluation point.
struct GeometryError : Error {
  using Error::Error;
};

/// Rank-deficient Jacobian, non-normalizable normal, degenerate variation.
struct EmbeddingError : Error {
  using Error::Error;
};

/// A formula or identity was requested outside its scenario scope, or an
/// argument violated a contract (e.g. a non-trace-free LOP argument).
struct ScopeError : Error {
  using Error::Error;
};

/// Two independent computation paths of the same quantity disagree beyond
/// tolerance. Signals a bug, never a data problem.
struct InconsistencyError : Error {
  using Error::Error;
};

/// A sigma coefficient was requested at one of its pole dimensions.
struct PoleError : Error {
  using Error::Error;
};

}  // namespace yamabe
