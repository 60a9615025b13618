#pragma once

#include <stdexcept>
#include <string>

namespace rproc {

enum class ErrorCode {
  kInvalidArgument = 1,
  kNotPositiveDefinite = 2,
  kNumerical = 3,
  kIo = 4,
  kParse = 5,
  kOutOfRange = 6,
};

// Every failure raised by the core library carries one of the codes above so
// the C layer can translate it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, const std::string& what,
                    ErrorCode code = ErrorCode::kInvalidArgument) {
  if (!condition) fail(code, what);
}

}  // namespace rproc
