#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pcl {

// Base for everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad numeric input: N < 2, a >= b, eps <= 0 and the like.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Closed form requested outside the regime it was derived for.
class UnsupportedRegime : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Malformed or inconsistent configuration. `field` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class IoError : public Error {
 public:
  IoError(std::string path, const std::string& message)
      : Error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

}  // namespace pcl
