#pragma once

#include <stdexcept>
#include <string>

namespace spcgt {

/// Precondition violated by the caller (bad dimensions, out-of-range genus, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

/// A configured size cap would be exceeded.
class ResourceLimit : public std::runtime_error {
 public:
  explicit ResourceLimit(const std::string& what) : std::runtime_error(what) {}
};

/// An operation needs data that has not been computed yet (e.g. Cayley data).
class StateError : public std::logic_error {
 public:
  explicit StateError(const std::string& what) : std::logic_error(what) {}
};

/// Inputs lie outside the hypotheses under which a closed-form answer is known.
class UnsupportedCase : public std::runtime_error {
 public:
  explicit UnsupportedCase(const std::string& what) : std::runtime_error(what) {}
};

/// An internal consistency check failed; indicates a bug.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace spcgt
