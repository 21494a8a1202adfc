#pragma once

#include <stdexcept>
#include <string>

namespace gistline {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent authored content (trees, schemas, lexicons, packs).
class ContentError : public Error {
 public:
  using Error::Error;
};

/// A caller violated an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class OffTrackLimitError : public Error {
 public:
  using Error::Error;
};

class SessionOverError : public Error {
 public:
  using Error::Error;
};

class FeasibilityError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

}  // namespace gistline
