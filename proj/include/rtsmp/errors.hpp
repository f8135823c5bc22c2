#pragma once

#include <stdexcept>
#include <string>

namespace rtsmp {

/// Invalid scenario or field input. `key()` names the offending config key
/// (e.g. "measure.atoms") when one is known.
class ValidationError : public std::runtime_error {
  public:
    ValidationError(std::string key, const std::string& message)
        : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

  private:
    std::string key_;
};

/// Grid access outside what the discretization supports.
class GridError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// rho^gamma requested with gamma < 0 at rho == 0.
class RhoDegenerateError : public std::runtime_error {
  public:
    explicit RhoDegenerateError(long x_index)
        : std::runtime_error("rho-degenerate: rho = 0 with negative gamma at x-node " +
                             std::to_string(x_index)),
          x_index_(x_index) {}

    long x_index() const noexcept { return x_index_; }

  private:
    long x_index_;
};

class PreconditionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
  public:
    ConvergenceError(long iterations, double last_update)
        : std::runtime_error("no convergence after " + std::to_string(iterations) +
                             " iterations (last update norm " + std::to_string(last_update) + ")"),
          iterations_(iterations), last_update_(last_update) {}

    long iterations() const noexcept { return iterations_; }
    double last_update() const noexcept { return last_update_; }

  private:
    long iterations_;
    double last_update_;
};

}  // namespace rtsmp
