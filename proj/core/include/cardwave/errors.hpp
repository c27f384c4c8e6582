#ifndef CARDWAVE_ERRORS_HPP
#define CARDWAVE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cardwave {

/// Invalid configuration or invalid arguments to a library call.
/// The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical blow-up (non-finite state detected). Carries the node index
/// and simulated time at which the problem was found. CLI exit code 3.
class InstabilityError : public std::runtime_error {
public:
  InstabilityError(const std::string& msg, long node, double t_ms)
      : std::runtime_error(msg + " (node " + std::to_string(node) + ", t = " +
                           std::to_string(t_ms) + " ms)"),
        node_index(node), time_ms(t_ms) {}
  long node_index;
  double time_ms;
};

/// File system failure, always including the offending path. CLI exit code 4.
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace cardwave

#endif
