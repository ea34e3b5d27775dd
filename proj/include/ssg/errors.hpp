#pragma once

#include <stdexcept>
#include <string>

namespace ssg {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input shape does not match the game (wrong player, wrong action axis, ...).
class DimensionError : public Error {
 public:
  DimensionError(const std::string& msg, int player, int axis)
      : Error(msg), player(player), axis(axis) {}
  int player;
  int axis;
};

// A symbol outside the observation alphabet of a belief.
class AlphabetError : public Error {
 public:
  explicit AlphabetError(const std::string& msg) : Error(msg) {}
};

// Every atom of a finite-support prior assigns zero probability to the
// observed symbol; Bayes' rule is undefined.
class ZeroLikelihoodError : public Error {
 public:
  explicit ZeroLikelihoodError(const std::string& msg) : Error(msg) {}
};

// Operation is only defined for a restricted class of inputs
// (binary alphabet, 2x2 game, ...).
class UnsupportedError : public Error {
 public:
  explicit UnsupportedError(const std::string& msg) : Error(msg) {}
};

// The LP solver failed; carries a printable dump of the instance.
class LpError : public Error {
 public:
  LpError(const std::string& msg, std::string instance)
      : Error(msg), instance(std::move(instance)) {}
  std::string instance;
};

// Config / JSON schema violation; `where` is a JSON-pointer-ish path to the
// offending field.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& msg, std::string where)
      : Error(msg + " (at " + where + ")"), where(std::move(where)) {}
  std::string where;
};

}  // namespace ssg
