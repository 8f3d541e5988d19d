#pragma once

#include <stdexcept>

namespace evt {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Sequences fall outside the family where the regime conditions are decidable.
class ClassificationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace evt
