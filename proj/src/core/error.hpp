#pragma once

#include <stdexcept>
#include <string>

namespace aforge {

// Numeric values are shared with the C API (af_status) and the CLI exit codes
// are derived from them, so keep them stable.
enum class ErrorCode {
  kInvalidArgument = 1,
  kIo = 2,
  kFormat = 3,
  kData = 4,
  kConfig = 5,
  kPlacement = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace aforge
