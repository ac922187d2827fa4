#pragma once

#include <stdexcept>
#include <string>

namespace procsim {

enum class ErrorCode {
  InvalidArgument = 1,
  Parse = 2,
  Io = 3,
  Model = 4,
  Internal = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace procsim
