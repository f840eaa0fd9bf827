#ifndef SPS_ERROR_HPP
#define SPS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace sps {

/// Failure category. Each maps onto one CLI exit code.
enum class ErrorKind {
  config,     // invalid configuration or arguments
  data,       // malformed or inconsistent input data
  numerical,  // weight collapse, singular proposal variance, non-finite likelihood
  mixing,     // M phase exceeded its step cap
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::config:
      return 2;
    case ErrorKind::data:
      return 3;
    case ErrorKind::numerical:
      return 4;
    case ErrorKind::mixing:
      return 5;
  }
  return 1;
}

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::config:
      return "config";
    case ErrorKind::data:
      return "data";
    case ErrorKind::numerical:
      return "numerical";
    case ErrorKind::mixing:
      return "mixing";
  }
  return "unknown";
}

}  // namespace sps

#endif
