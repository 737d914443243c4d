#pragma once

#include <stdexcept>
#include <string>

namespace nct {

/// Raised when an argument violates an operation's precondition.
class rejected_input : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a requested object would exceed a configured size cap.
class size_cap_exceeded : public rejected_input {
 public:
  size_cap_exceeded(const std::string& what, long long requested, long long cap)
      : rejected_input(what + ": size " + std::to_string(requested) + " exceeds cap " +
                       std::to_string(cap)),
        requested_(requested),
        cap_(cap) {}

  long long requested() const noexcept { return requested_; }
  long long cap() const noexcept { return cap_; }

 private:
  long long requested_;
  long long cap_;
};

/// Raised when a formula is evaluated outside the region where it is finite.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace nct
