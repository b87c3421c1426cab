#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace guidepost {

/// Machine-readable failure category. Each code maps to exactly one HTTP
/// status in the service layer.
enum class ErrorCode {
  invalid_argument,   // malformed input, bad query parameters
  parse_error,        // unreadable or inconsistent CSV
  not_found,          // unknown dataset / guidepost / session
  stale_bundle,       // sketch bundle built for a different dataset
  bundle_not_ready,   // approximate query before the bundle finished
  incomparable,       // hyperplane sketches with different (k, seed)
  too_large,          // upload exceeds the configured cap
  corrupt,            // undecodable bundle or session bytes
  internal,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace guidepost
