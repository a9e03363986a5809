#pragma once

#include <stdexcept>

namespace riemann_accel {

/// Precondition broken by the caller (mismatched bases, wrong manifold,
/// inconsistent parameters).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A quantity left the domain where it is defined, e.g. sqrt(K_max) D >= pi.
class DomainViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid optimizer or experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace riemann_accel
