#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace omnizoom {

enum class ErrorCode {
  bad_dims,
  near_singular,
  degenerate_arc,
  no_crossing,
  dim_mismatch,
  too_small,
  io_error,
  invalid_argument,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::bad_dims: return "BadDims";
    case ErrorCode::near_singular: return "NearSingular";
    case ErrorCode::degenerate_arc: return "DegenerateArc";
    case ErrorCode::no_crossing: return "NoCrossing";
    case ErrorCode::dim_mismatch: return "DimMismatch";
    case ErrorCode::too_small: return "TooSmall";
    case ErrorCode::io_error: return "IoError";
    case ErrorCode::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace omnizoom
