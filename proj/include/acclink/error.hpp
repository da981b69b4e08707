#pragma once

#include <stdexcept>
#include <string>

namespace acclink {

// Error categories line up with the CLI exit codes and the C API status codes.
enum class ErrorKind {
  Usage = 1,         // bad arguments or configuration
  Data = 2,          // malformed or inconsistent input data
  Prerequisite = 4,  // an upstream artifact is missing or stale
  Internal = 3,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error usage_error(const std::string& what) { return Error(ErrorKind::Usage, what); }
inline Error data_error(const std::string& what) { return Error(ErrorKind::Data, what); }
inline Error prerequisite_error(const std::string& what) {
  return Error(ErrorKind::Prerequisite, what);
}

}  // namespace acclink
