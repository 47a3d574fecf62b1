#pragma once

#include <stdexcept>
#include <string>

namespace herdscope {

/// Base class for all library errors. The CLI maps the three subclasses
/// onto exit codes 1 (usage/config), 2 (data validation) and 3 (compute).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ComputeError : public Error {
 public:
  using Error::Error;
};

}  // namespace herdscope
