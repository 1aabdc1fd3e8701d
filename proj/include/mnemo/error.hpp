#ifndef MNEMO_ERROR_HPP
#define MNEMO_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mnemo {

// Base for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad or missing configuration / resource files.
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Malformed input (resource rows, model responses).
class ParseError : public Error {
public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

// Transport or protocol failure talking to the model backend.
class BackendError : public Error {
public:
  explicit BackendError(const std::string& msg) : Error(msg) {}
};

// No candidate survived filtering.
class NoValidCueError : public Error {
public:
  explicit NoValidCueError(const std::string& msg) : Error(msg) {}
};

} // namespace mnemo

#endif
