#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace glwords {

/// Library error with a stable machine-readable code alongside the message.
/// Codes are lowercase snake_case ("not_invertible", "hypotheses_fail", ...)
/// and are what the CLI reports in its error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool cond, const std::string& code, const std::string& message) {
  if (!cond) fail(code, message);
}

}  // namespace glwords
