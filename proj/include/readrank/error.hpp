#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace readrank {

enum class ErrorCode {
  kEmptyLead,
  kMalformedInput,
  kDuplicateId,
  kEmptyText,
  kDegenerateData,
  kNotFound,
  kUpstream,
  kRateLimited,
  kInvalidRequest,
  kModelNotLoaded,
  kIo,
  kFormat,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace readrank
