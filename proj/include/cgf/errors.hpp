#pragma once

#include <stdexcept>
#include <string>

namespace cgf {

// Precondition violated (bad index, radius out of range, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A configured computational limit was exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The requested geometric construction cannot exist.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A truncated series still carries too much mass beyond k_max.
class InsufficientTruncation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cgf
