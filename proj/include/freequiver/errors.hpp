#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace freequiver {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed quiver, path, or relation presentation.
class QuiverError : public Error {
 public:
  explicit QuiverError(const std::string& what, std::vector<std::string> issues = {})
      : Error(what), issues_(std::move(issues)) {}
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

/// Matrix shapes do not fit the quiver or each other.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Expression fails the parallelism/composability typing rules.
class TypeError : public Error {
 public:
  TypeError(const std::string& what, std::string location)
      : Error(what + " at " + location), message_(what), location_(std::move(location)) {}
  const std::string& message() const { return message_; }
  const std::string& location() const { return location_; }

 private:
  std::string message_;
  std::string location_;
};

/// An inverse node was evaluated outside its regularity domain.
class RegularityError : public Error {
 public:
  RegularityError(const std::string& what, std::string node)
      : Error(what), node_(std::move(node)) {}
  /// Rendered inverse node plus its location in the entry.
  const std::string& node() const { return node_; }

 private:
  std::string node_;
};

/// Input text could not be parsed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at offset " + std::to_string(position) + ")"), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

}  // namespace freequiver
