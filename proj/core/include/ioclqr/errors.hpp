#pragma once

#include <stdexcept>
#include <string>

namespace ioclqr {

// Observed data contradicts the model (e.g. an inverse problem's defining
// linear system is unsolvable beyond tolerance, or a structural condition
// that valid data must satisfy fails).
class InconsistencyError : public std::runtime_error {
 public:
  explicit InconsistencyError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical integration blew up or otherwise failed to produce usable
// values (norm escaping past the divergence guard, non-finite entries).
class IntegrationError : public std::runtime_error {
 public:
  explicit IntegrationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ioclqr
