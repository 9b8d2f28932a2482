#ifndef WEYLAB_ERRORS_HPP
#define WEYLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace weylab {

/// Bad arguments (non-finite points, out-of-domain parameters, malformed input).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A request exceeds a documented cap (jet order, recursion depth, ...).
class CapabilityError : public std::runtime_error {
 public:
  explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

/// Division by a vanishing symbol value.
class SingularityError : public std::runtime_error {
 public:
  explicit SingularityError(const std::string& what) : std::runtime_error(what) {}
};

/// Quadrature or extrapolation failed to reach the requested accuracy.
class AccuracyError : public std::runtime_error {
 public:
  explicit AccuracyError(const std::string& what) : std::runtime_error(what) {}
};

/// A query lies outside the range the data can answer (trusted spectrum, sublevel sets).
class RangeError : public std::runtime_error {
 public:
  explicit RangeError(const std::string& what) : std::runtime_error(what) {}
};

/// Truncation tail too large for the requested evaluation.
class ResolutionError : public std::runtime_error {
 public:
  explicit ResolutionError(const std::string& what) : std::runtime_error(what) {}
};

/// The input degenerates on the scanned region (e.g. a symbol vanishing on a grid).
class DegenerateInputError : public std::runtime_error {
 public:
  explicit DegenerateInputError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace weylab

#endif  // WEYLAB_ERRORS_HPP
