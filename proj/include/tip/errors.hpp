#ifndef TIP_ERRORS_HPP_
#define TIP_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace tip {

// Invalid numeric input to a kernel or special function (argument outside
// its mathematical domain).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Malformed data, configuration, or schema violation. Messages name the
// offending row/field where applicable.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what)
      : std::runtime_error(what) {}
};

// File-system failure (missing file, unreadable, unwritable).
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tip

#endif  // TIP_ERRORS_HPP_
