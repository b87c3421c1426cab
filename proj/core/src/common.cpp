#include "guidepost/error.hpp"
#include "guidepost/hashing.hpp"

namespace guidepost {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::stale_bundle: return "stale_bundle";
    case ErrorCode::bundle_not_ready: return "bundle_not_ready";
    case ErrorCode::incomparable: return "incomparable_sketches";
    case ErrorCode::too_large: return "too_large";
    case ErrorCode::corrupt: return "corrupt";
    case ErrorCode::internal: return "internal";
  }
  return "internal";
}

std::string to_hex(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace guidepost
