#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ojoin {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A caller broke a documented precondition (duplicate keys fed to annotate, ...).
class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

class SizeLimit : public Error {
 public:
  using Error::Error;
};

class GhdInvalid : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Raised by expand when the real join size does not fit the public bound.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(std::string site, std::uint64_t required, std::uint64_t tau)
      : Error("budget exceeded at " + site + ": need " + std::to_string(required) +
              " slots, bound is " + std::to_string(tau)),
        site_(std::move(site)),
        required_(required),
        tau_(tau) {}

  const std::string& site() const { return site_; }
  std::uint64_t required() const { return required_; }
  std::uint64_t tau() const { return tau_; }

 private:
  std::string site_;
  std::uint64_t required_;
  std::uint64_t tau_;
};

// Raised when a size computation leaves the representable range or the slot cap.
class BudgetOverflow : public Error {
 public:
  using Error::Error;
};

}  // namespace ojoin
