#pragma once

#include <stdexcept>
#include <string>

namespace starsos {

// Bad user input: dimension mismatch, invalid parameters, unreadable files.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The conic solver could not decide a problem (iteration limit, stall).
class SolverIndeterminate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical result failed its independent re-check.
class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace starsos
